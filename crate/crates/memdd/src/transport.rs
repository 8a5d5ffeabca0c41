//! Fully implicit time stepping for the coupled density–potential system.
//!
//! One backward-Euler step advances electrons, holes, and vacancies together
//! with the potential as a single nonlinear system, solved by damped Newton
//! with an analytic Jacobian. Unknowns interleave per cell as `[n, p, d, v]`,
//! so the Jacobian stays banded on the tensor mesh.
//!
//! Edge fluxes use entropy variables: the flux of a species with density `u`
//! across an edge is `mobility * (w_left - w_right) / dist * area`, where
//! `w = mu(u) + drift_sign * v` and the mobility is a nonnegative average of
//! the adjacent densities. This form dissipates the discrete free energy in
//! insulated runs.

use crate::banded::Banded;
use crate::cutoff::CutoffFamily;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::model::{BoundarySpec, ModelParams, Species, State};
use crate::par;

/// How the edge mobility averages the two adjacent densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mobility {
    /// Arithmetic mean; reproduces the pure quadratic-diffusion flux exactly.
    ArithmeticMean,
    /// Donor cell by entropy-variable comparison; more robust near vacuum.
    Upwind,
}

/// Knobs for an implicit step.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub mobility: Mobility,
    /// Newton stops when the residual max-norm falls below this.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Line-search halvings tried per Newton iteration before giving up.
    pub max_halvings: usize,
    /// All-Neumann potential: project the charge to zero mean, pin one cell
    /// during the solve, then shift to volume-weighted zero mean.
    pub gauge: bool,
    /// Couple the potential into the species fluxes. Disable for pure
    /// degenerate-diffusion runs.
    pub drift: bool,
    /// Evaluate edge kernels on the data-parallel path when compiled in.
    pub parallel: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            mobility: Mobility::ArithmeticMean,
            newton_tol: 1e-10,
            newton_max_iter: 25,
            max_halvings: 30,
            gauge: false,
            drift: true,
            parallel: true,
        }
    }
}

impl StepOptions {
    fn validate(&self) -> Result<()> {
        if !(self.newton_tol.is_finite() && self.newton_tol > 0.0) {
            return Err(Error::Parameter(format!(
                "newton_tol must be positive, got {}",
                self.newton_tol
            )));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::Parameter("newton_max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Convergence record of one Newton solve.
#[derive(Debug, Clone, Copy)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Max-norm of the residual at exit.
    pub final_residual: f64,
    /// Iterations that accepted a shortened update.
    pub damping_events: usize,
    pub converged: bool,
}

/// Chemical potential `alpha/(alpha-1) * v^(alpha-1)` of a nonnegative
/// density, no clamping.
pub fn chemical_potential(alpha: f64, v: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::Parameter(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::Domain(format!(
            "chemical potential needs a nonnegative density, got {v}"
        )));
    }
    Ok(alpha / (alpha - 1.0) * v.powf(alpha - 1.0))
}

/// Scheme chemical potential: truncated closed form when a cutoff is active,
/// floored power law otherwise.
pub(crate) fn mu_scheme(
    params: &ModelParams,
    fam: Option<&CutoffFamily>,
    s: Species,
    v: f64,
) -> f64 {
    let a = params.alpha(s);
    match fam {
        Some(f) => a / (a - 1.0) * f.s_unchecked(a - 1.0, v),
        None => {
            let vf = v.max(params.effective_floor());
            a / (a - 1.0) * vf.powf(a - 1.0)
        }
    }
}

fn mu_scheme_deriv(params: &ModelParams, fam: Option<&CutoffFamily>, s: Species, v: f64) -> f64 {
    let a = params.alpha(s);
    match fam {
        Some(f) => a * f.truncate(v).powf(a - 2.0),
        None => {
            let floor = params.effective_floor();
            if v >= floor && v > 0.0 {
                a * v.powf(a - 2.0)
            } else {
                0.0
            }
        }
    }
}

/// Density value a cell contributes to the edge mobility.
pub(crate) fn mobility_density(params: &ModelParams, fam: Option<&CutoffFamily>, v: f64) -> f64 {
    match fam {
        Some(f) => f.truncate(v),
        None => v.max(params.effective_floor()),
    }
}

fn mobility_density_deriv(params: &ModelParams, fam: Option<&CutoffFamily>, v: f64) -> f64 {
    match fam {
        Some(f) => f.truncate_deriv(v),
        None => {
            if v >= params.effective_floor() {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Edge mobility from the two adjacent contributions; always nonnegative.
pub(crate) fn edge_mobility(mob: Mobility, m_left: f64, m_right: f64, w_left: f64, w_right: f64) -> f64 {
    match mob {
        Mobility::ArithmeticMean => 0.5 * (m_left + m_right),
        Mobility::Upwind => {
            if w_left >= w_right {
                m_left
            } else {
                m_right
            }
        }
    }
}

/// Flattens a state into the interleaved unknown vector `[n, p, d, v]` per
/// cell, the layout used by the residual and Jacobian.
pub fn pack_state(state: &State) -> Vec<f64> {
    let nc = state.n.len();
    let mut u = vec![0.0; 4 * nc];
    for i in 0..nc {
        u[4 * i] = state.n[i];
        u[4 * i + 1] = state.p[i];
        u[4 * i + 2] = state.d[i];
        u[4 * i + 3] = state.v[i];
    }
    u
}

fn unpack_state(u: &[f64], time: f64) -> State {
    let nc = u.len() / 4;
    let pick = |off: usize| (0..nc).map(|i| u[4 * i + off]).collect();
    State {
        time,
        n: pick(0),
        p: pick(1),
        d: pick(2),
        v: pick(3),
    }
}

/// Precomputed pieces of one implicit step.
struct Stepper<'a> {
    mesh: &'a Mesh,
    params: &'a ModelParams,
    opts: StepOptions,
    fam: Option<CutoffFamily>,
    old: &'a State,
    dt: f64,
    /// Pin value per cell for `n` and `p`; a contact cell's mass balance is
    /// replaced by `density - pin`. The first Dirichlet face of a cell wins.
    pin_n: Vec<Option<f64>>,
    pin_p: Vec<Option<f64>>,
    /// `(cell, lambda^2 * area / dist, value)` per Dirichlet potential face,
    /// bias multiplier applied.
    vdir: Vec<(usize, f64, f64)>,
    /// Mean charge projected off the Poisson right side in gauge mode,
    /// computed from the previous state (masses are conserved, so the
    /// converged mean is the same and the Jacobian stays banded).
    mean_charge: f64,
}

impl<'a> Stepper<'a> {
    fn new(
        mesh: &'a Mesh,
        bc: &BoundarySpec,
        params: &'a ModelParams,
        opts: StepOptions,
        old: &'a State,
        dt: f64,
    ) -> Result<Self> {
        params.validate(mesh)?;
        bc.validate(mesh)?;
        opts.validate()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
        }
        let nc = mesh.num_cells();
        for (name, f) in [("n", &old.n), ("p", &old.p), ("d", &old.d), ("v", &old.v)] {
            if f.len() != nc {
                return Err(Error::Data(format!(
                    "state field {name} has {} entries for a mesh of {nc} cells",
                    f.len()
                )));
            }
        }
        if opts.gauge && bc.has_dirichlet_v() {
            return Err(Error::Config("gauge mode is only for an all-Neumann potential".into()));
        }
        if !opts.gauge && !bc.has_dirichlet_v() {
            return Err(Error::Config(
                "potential has no Dirichlet segment; enable gauge mode for insulated runs".into(),
            ));
        }
        let fam = params.cutoff_k.map(CutoffFamily::new).transpose()?;
        let mut pin_n = vec![None; nc];
        let mut pin_p = vec![None; nc];
        let l2 = params.lambda * params.lambda;
        let mut vdir = Vec::new();
        for f in mesh.boundary_faces() {
            if let Some(v) = bc.n_value(f) {
                if pin_n[f.cell].is_none() {
                    pin_n[f.cell] = Some(v);
                }
            }
            if let Some(v) = bc.p_value(f) {
                if pin_p[f.cell].is_none() {
                    pin_p[f.cell] = Some(v);
                }
            }
            if let Some(v) = bc.v_value(f) {
                vdir.push((f.cell, l2 * f.area / f.dist, v));
            }
        }
        let mean_charge = if opts.gauge {
            let tot: f64 = mesh.total_volume();
            mesh.cells()
                .iter()
                .enumerate()
                .map(|(i, c)| c.volume * (old.n[i] - old.p[i] - old.d[i] + params.doping[i]))
                .sum::<f64>()
                / tot
        } else {
            0.0
        };
        Ok(Stepper {
            mesh,
            params,
            opts,
            fam,
            old,
            dt,
            pin_n,
            pin_p,
            vdir,
            mean_charge,
        })
    }

    /// Entropy variables `[w_n, w_p, w_d]` per cell at the candidate `u`.
    fn entropy(&self, u: &[f64]) -> Vec<[f64; 3]> {
        let drift = if self.opts.drift { 1.0 } else { 0.0 };
        let params = self.params;
        let fam = self.fam.as_ref();
        par::map_range(self.mesh.num_cells(), self.opts.parallel, move |i| {
            let vv = u[4 * i + 3];
            let mut w = [0.0; 3];
            for s in Species::ALL {
                let so = s.offset();
                w[so] = mu_scheme(params, fam, s, u[4 * i + so]) + drift * s.drift_sign() * vv;
            }
            w
        })
    }

    /// Per-edge totals `[f_n, f_p, f_d, poisson]`: species fluxes through the
    /// edge (positive left to right) and the potential's two-point term.
    fn edge_terms(&self, u: &[f64], w: &[[f64; 3]]) -> Vec<[f64; 4]> {
        let edges = self.mesh.edges();
        let params = self.params;
        let fam = self.fam.as_ref();
        let mob = self.opts.mobility;
        let l2 = params.lambda * params.lambda;
        par::map_range(edges.len(), self.opts.parallel, move |ei| {
            let e = &edges[ei];
            let inv_d = 1.0 / e.dist;
            let mut out = [0.0; 4];
            for s in Species::ALL {
                let so = s.offset();
                let vl = u[4 * e.left + so];
                let vr = u[4 * e.right + so];
                let m = edge_mobility(
                    mob,
                    mobility_density(params, fam, vl),
                    mobility_density(params, fam, vr),
                    w[e.left][so],
                    w[e.right][so],
                );
                out[so] = e.area * m * (w[e.left][so] - w[e.right][so]) * inv_d;
            }
            out[3] = l2 * e.area * inv_d * (u[4 * e.left + 3] - u[4 * e.right + 3]);
            out
        })
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let nc = self.mesh.num_cells();
        let w = self.entropy(u);
        let ef = self.edge_terms(u, &w);
        let mut res = vec![0.0; 4 * nc];
        for (i, cell) in self.mesh.cells().iter().enumerate() {
            let vol = cell.volume;
            for s in Species::ALL {
                let so = s.offset();
                res[4 * i + so] = vol * (u[4 * i + so] - self.old.field(s)[i]) / self.dt;
            }
            let rho =
                u[4 * i] - u[4 * i + 1] - u[4 * i + 2] + self.params.doping[i] - self.mean_charge;
            res[4 * i + 3] = -vol * rho;
        }
        for (e, t) in self.mesh.edges().iter().zip(&ef) {
            for (c, term) in t.iter().enumerate() {
                res[4 * e.left + c] += term;
                res[4 * e.right + c] -= term;
            }
        }
        for &(cell, coef, val) in &self.vdir {
            res[4 * cell + 3] += coef * (u[4 * cell + 3] - val);
        }
        for (off, pins) in [(0usize, &self.pin_n), (1usize, &self.pin_p)] {
            for (i, pin) in pins.iter().enumerate() {
                if let Some(pv) = pin {
                    res[4 * i + off] = u[4 * i + off] - pv;
                }
            }
        }
        if self.opts.gauge {
            res[3] = u[3];
        }
        res
    }

    fn jacobian(&self, u: &[f64]) -> Banded {
        let nc = self.mesh.num_cells();
        let bw = 4 * self.mesh.max_neighbor_stride() + 3;
        let mut j = Banded::new(4 * nc, bw, bw);
        let fam = self.fam.as_ref();
        let drift = if self.opts.drift { 1.0 } else { 0.0 };
        let l2 = self.params.lambda * self.params.lambda;

        for (i, cell) in self.mesh.cells().iter().enumerate() {
            let vol = cell.volume;
            for s in Species::ALL {
                let so = s.offset();
                j.add(4 * i + so, 4 * i + so, vol / self.dt);
            }
            j.add(4 * i + 3, 4 * i, -vol);
            j.add(4 * i + 3, 4 * i + 1, vol);
            j.add(4 * i + 3, 4 * i + 2, vol);
        }

        let w = self.entropy(u);
        for e in self.mesh.edges() {
            let (left, right) = (e.left, e.right);
            let inv_d = 1.0 / e.dist;
            for s in Species::ALL {
                let so = s.offset();
                let row_l = 4 * left + so;
                let row_r = 4 * right + so;
                let vl = u[4 * left + so];
                let vr = u[4 * right + so];
                let (wl, wr) = (w[left][so], w[right][so]);
                let ml = mobility_density(self.params, fam, vl);
                let mr = mobility_density(self.params, fam, vr);
                let m = edge_mobility(self.opts.mobility, ml, mr, wl, wr);
                let (dm_dvl, dm_dvr) = match self.opts.mobility {
                    Mobility::ArithmeticMean => (
                        0.5 * mobility_density_deriv(self.params, fam, vl),
                        0.5 * mobility_density_deriv(self.params, fam, vr),
                    ),
                    Mobility::Upwind => {
                        if wl >= wr {
                            (mobility_density_deriv(self.params, fam, vl), 0.0)
                        } else {
                            (0.0, mobility_density_deriv(self.params, fam, vr))
                        }
                    }
                };
                let g = (wl - wr) * inv_d;
                let mul = mu_scheme_deriv(self.params, fam, s, vl);
                let mur = mu_scheme_deriv(self.params, fam, s, vr);
                let df_dvl = e.area * (dm_dvl * g + m * mul * inv_d);
                let df_dvr = e.area * (dm_dvr * g - m * mur * inv_d);
                let df_dpl = e.area * m * drift * s.drift_sign() * inv_d;
                j.add(row_l, 4 * left + so, df_dvl);
                j.add(row_l, 4 * right + so, df_dvr);
                j.add(row_l, 4 * left + 3, df_dpl);
                j.add(row_l, 4 * right + 3, -df_dpl);
                j.add(row_r, 4 * left + so, -df_dvl);
                j.add(row_r, 4 * right + so, -df_dvr);
                j.add(row_r, 4 * left + 3, -df_dpl);
                j.add(row_r, 4 * right + 3, df_dpl);
            }
            let cp = l2 * e.area * inv_d;
            j.add(4 * left + 3, 4 * left + 3, cp);
            j.add(4 * left + 3, 4 * right + 3, -cp);
            j.add(4 * right + 3, 4 * right + 3, cp);
            j.add(4 * right + 3, 4 * left + 3, -cp);
        }

        for &(cell, coef, _) in &self.vdir {
            j.add(4 * cell + 3, 4 * cell + 3, coef);
        }
        for (off, pins) in [(0usize, &self.pin_n), (1usize, &self.pin_p)] {
            for (i, pin) in pins.iter().enumerate() {
                if pin.is_some() {
                    let row = 4 * i + off;
                    j.zero_row(row);
                    j.set(row, row, 1.0);
                }
            }
        }
        if self.opts.gauge {
            j.zero_row(3);
            j.set(3, 3, 1.0);
        }
        j
    }

    fn newton(&self, mut u: Vec<f64>) -> Result<(Vec<f64>, NewtonReport)> {
        let tol = self.opts.newton_tol;
        let norms = |r: &[f64]| {
            let l2: f64 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            let linf = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            (l2, linf)
        };
        let mut res = self.residual(&u);
        let (mut l2, mut linf) = norms(&res);
        let mut iterations = 0;
        let mut damping_events = 0;
        while linf > tol {
            if iterations >= self.opts.newton_max_iter {
                return Err(Error::StepFailure {
                    residual: linf,
                    iterations,
                });
            }
            let delta = self.jacobian(&u).factor()?.solve(&res);
            let mut lam = 1.0;
            let mut accepted = false;
            for halving in 0..=self.opts.max_halvings {
                let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, b)| a - lam * b).collect();
                let tres = self.residual(&trial);
                let (tl2, tlinf) = norms(&tres);
                if (tl2.is_finite() && tl2 < l2) || tlinf <= tol {
                    u = trial;
                    res = tres;
                    l2 = tl2;
                    linf = tlinf;
                    if halving > 0 {
                        damping_events += 1;
                    }
                    accepted = true;
                    break;
                }
                lam *= 0.5;
            }
            iterations += 1;
            if !accepted {
                return Err(Error::StepFailure {
                    residual: linf,
                    iterations,
                });
            }
        }
        Ok((
            u,
            NewtonReport {
                iterations,
                final_residual: linf,
                damping_events,
                converged: true,
            },
        ))
    }
}

/// Residual of the implicit step equations at a packed candidate vector
/// (layout of [`pack_state`]). Zero at the converged new state.
pub fn assemble_residual(
    mesh: &Mesh,
    bc: &BoundarySpec,
    params: &ModelParams,
    old: &State,
    dt: f64,
    opts: StepOptions,
    candidate: &[f64],
) -> Result<Vec<f64>> {
    let stepper = Stepper::new(mesh, bc, params, opts, old, dt)?;
    if candidate.len() != 4 * mesh.num_cells() {
        return Err(Error::Data(format!(
            "candidate has {} entries, expected {}",
            candidate.len(),
            4 * mesh.num_cells()
        )));
    }
    Ok(stepper.residual(candidate))
}

/// Analytic Jacobian of [`assemble_residual`] at a packed candidate vector.
pub fn assemble_jacobian(
    mesh: &Mesh,
    bc: &BoundarySpec,
    params: &ModelParams,
    old: &State,
    dt: f64,
    opts: StepOptions,
    candidate: &[f64],
) -> Result<Banded> {
    let stepper = Stepper::new(mesh, bc, params, opts, old, dt)?;
    if candidate.len() != 4 * mesh.num_cells() {
        return Err(Error::Data(format!(
            "candidate has {} entries, expected {}",
            candidate.len(),
            4 * mesh.num_cells()
        )));
    }
    Ok(stepper.jacobian(candidate))
}

/// One backward-Euler step of size `dt` from `old`.
pub fn advance(
    mesh: &Mesh,
    bc: &BoundarySpec,
    params: &ModelParams,
    old: &State,
    dt: f64,
    opts: StepOptions,
) -> Result<(State, NewtonReport)> {
    let stepper = Stepper::new(mesh, bc, params, opts, old, dt)?;
    let (mut u, report) = stepper.newton(pack_state(old))?;
    if opts.gauge {
        let tot = mesh.total_volume();
        let mean: f64 = mesh
            .cells()
            .iter()
            .enumerate()
            .map(|(i, c)| c.volume * u[4 * i + 3])
            .sum::<f64>()
            / tot;
        for i in 0..mesh.num_cells() {
            u[4 * i + 3] -= mean;
        }
    }
    Ok((unpack_state(&u, old.time + dt), report))
}

/// Outcome of an adaptive advance over a time interval.
#[derive(Debug, Clone, Copy, Default)]
pub struct AdaptiveReport {
    pub substeps: usize,
    /// Times the substep was halved after a failed solve.
    pub bisections: usize,
    pub newton_iterations: usize,
    pub damping_events: usize,
}

/// Advances by `dt`, halving the substep (up to `max_bisections` times) when
/// a solve fails, under fixed boundary data.
pub fn advance_adaptive(
    mesh: &Mesh,
    bc: &BoundarySpec,
    params: &ModelParams,
    old: &State,
    dt: f64,
    opts: StepOptions,
    max_bisections: usize,
) -> Result<(State, AdaptiveReport)> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    let target = old.time + dt;
    let mut state = old.clone();
    let mut h = dt;
    let mut report = AdaptiveReport::default();
    let mut remaining = dt;
    while remaining > 1e-12 * dt {
        let step = h.min(remaining);
        match advance(mesh, bc, params, &state, step, opts) {
            Ok((s, rep)) => {
                state = s;
                remaining -= step;
                report.substeps += 1;
                report.newton_iterations += rep.iterations;
                report.damping_events += rep.damping_events;
            }
            Err(e @ (Error::StepFailure { .. } | Error::Numerical(_))) => {
                report.bisections += 1;
                if report.bisections > max_bisections {
                    return Err(e);
                }
                h *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    state.time = target;
    Ok((state, report))
}

/// Conventional electric current leaving the domain through one contact
/// segment: hole outflux minus electron outflux, evaluated from the interior
/// fluxes of the segment's contact cells (their pinned values are constant in
/// time, so interior flux balances boundary flux).
pub fn terminal_current(
    mesh: &Mesh,
    bc: &BoundarySpec,
    params: &ModelParams,
    state: &State,
    segment: &str,
    opts: StepOptions,
) -> Result<f64> {
    params.validate(mesh)?;
    bc.validate(mesh)?;
    let seg = mesh.segment_index(segment)?;
    if !bc.is_dirichlet(Species::N, seg) && !bc.is_dirichlet(Species::P, seg) {
        return Err(Error::Domain(format!(
            "segment '{segment}' has no carrier contact to carry a terminal current"
        )));
    }
    let nc = mesh.num_cells();
    for (name, f) in [("n", &state.n), ("p", &state.p), ("v", &state.v)] {
        if f.len() != nc {
            return Err(Error::Data(format!(
                "state field {name} has {} entries for a mesh of {nc} cells",
                f.len()
            )));
        }
    }
    // Segment owning each contact cell, first Dirichlet face wins (the same
    // rule that picks the pin during a step).
    let mut owner = [vec![None; nc], vec![None; nc]];
    for f in mesh.boundary_faces() {
        if bc.n_value(f).is_some() && owner[0][f.cell].is_none() {
            owner[0][f.cell] = Some(f.segment);
        }
        if bc.p_value(f).is_some() && owner[1][f.cell].is_none() {
            owner[1][f.cell] = Some(f.segment);
        }
    }
    let fam = params.cutoff_k.map(CutoffFamily::new).transpose()?;
    let drift = if opts.drift { 1.0 } else { 0.0 };
    let carriers = [Species::N, Species::P];
    let w: Vec<[f64; 2]> = (0..nc)
        .map(|i| {
            let mut out = [0.0; 2];
            for (slot, s) in carriers.iter().enumerate() {
                out[slot] = mu_scheme(params, fam.as_ref(), *s, state.field(*s)[i])
                    + drift * s.drift_sign() * state.v[i];
            }
            out
        })
        .collect();
    // Electrons carry negative charge: current = sum over contact cells of
    // (interior flux divergence of n) - (same for p).
    let mut current = 0.0;
    for e in mesh.edges() {
        for (slot, s, sign) in [(0usize, Species::N, 1.0), (1usize, Species::P, -1.0)] {
            let vl = state.field(s)[e.left];
            let vr = state.field(s)[e.right];
            let m = edge_mobility(
                opts.mobility,
                mobility_density(params, fam.as_ref(), vl),
                mobility_density(params, fam.as_ref(), vr),
                w[e.left][slot],
                w[e.right][slot],
            );
            let f = e.area * m * (w[e.left][slot] - w[e.right][slot]) / e.dist;
            if owner[slot][e.left] == Some(seg) {
                current += sign * f;
            }
            if owner[slot][e.right] == Some(seg) {
                current -= sign * f;
            }
        }
    }
    Ok(current)
}
