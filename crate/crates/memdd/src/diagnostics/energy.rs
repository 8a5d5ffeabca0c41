//! Discrete free energy, dissipation, relative entropies, and norms.

use crate::banded::Banded;
use crate::cutoff::CutoffFamily;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::model::{BoundarySpec, ModelParams, Species, State};
use crate::par;
use crate::transport::{edge_mobility, mobility_density, mu_scheme, Mobility};

/// Solves `laplace(u) = 0` with Dirichlet values at the given boundary faces
/// and homogeneous Neumann elsewhere; `None` when no face carries data.
/// Constant boundary data lifts to the same constant exactly.
fn harmonic_lift(mesh: &Mesh, face_values: &[Option<f64>]) -> Result<Option<Vec<f64>>> {
    if face_values.iter().all(|v| v.is_none()) {
        return Ok(None);
    }
    let nc = mesh.num_cells();
    let stride = mesh.max_neighbor_stride();
    let mut m = Banded::new(nc, stride, stride);
    let mut b = vec![0.0; nc];
    for e in mesh.edges() {
        let c = e.area / e.dist;
        m.add(e.left, e.left, c);
        m.add(e.right, e.right, c);
        m.add(e.left, e.right, -c);
        m.add(e.right, e.left, -c);
    }
    for (f, val) in mesh.boundary_faces().iter().zip(face_values) {
        if let Some(v) = val {
            let c = f.area / f.dist;
            m.add(f.cell, f.cell, c);
            b[f.cell] += c * v;
        }
    }
    Ok(Some(m.factor()?.solve(&b)))
}

/// Free energy split into its physical pieces.
#[derive(Debug, Clone, Copy)]
pub struct EnergyBreakdown {
    pub internal_n: f64,
    pub internal_p: f64,
    pub internal_d: f64,
    /// Squared-gradient energy of the potential relative to its boundary
    /// lift, including the Dirichlet half-cell faces.
    pub electric: f64,
    /// Coupling of the vacancy density to the potential's boundary lift.
    pub cross: f64,
    pub total: f64,
}

/// Discrete free energy of a state under the given boundary data.
///
/// Internal energies are `u * (u^(a-1) - l^(a-1)) / (a-1)` per unit volume,
/// where `l` is the harmonic lift of the species' Dirichlet data (zero when
/// the species has no contact, as for the vacancies). The electric term sums
/// `(lambda^2/2) * (area/dist) * jump^2` over interior edges and potential
/// Dirichlet faces of `v - lift(v)`; the cross term couples the vacancies to
/// that lift. Negative density excursions clamp to zero.
pub fn free_energy(
    mesh: &Mesh,
    bc: &BoundarySpec,
    params: &ModelParams,
    state: &State,
) -> Result<EnergyBreakdown> {
    params.validate(mesh)?;
    bc.validate(mesh)?;
    let nc = mesh.num_cells();
    for (name, f) in [("n", &state.n), ("p", &state.p), ("d", &state.d), ("v", &state.v)] {
        if f.len() != nc {
            return Err(Error::Data(format!(
                "state field {name} has {} entries for a mesh of {nc} cells",
                f.len()
            )));
        }
    }
    let faces = mesh.boundary_faces();
    let collect = |pick: &dyn Fn(&crate::mesh::BoundaryFace) -> Option<f64>| {
        faces.iter().map(pick).collect::<Vec<_>>()
    };
    let lift_n = harmonic_lift(mesh, &collect(&|f| bc.n_value(f)))?;
    let lift_p = harmonic_lift(mesh, &collect(&|f| bc.p_value(f)))?;
    let lift_v = harmonic_lift(mesh, &collect(&|f| bc.v_value(f)))?;

    let internal = |alpha: f64, field: &[f64], lift: &Option<Vec<f64>>| -> f64 {
        mesh.cells()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let u = field[i].max(0.0);
                let l = lift.as_ref().map_or(0.0, |l| l[i].max(0.0));
                c.volume * u * (u.powf(alpha - 1.0) - l.powf(alpha - 1.0)) / (alpha - 1.0)
            })
            .sum()
    };
    let internal_n = internal(params.alpha_n, &state.n, &lift_n);
    let internal_p = internal(params.alpha_p, &state.p, &lift_p);
    let internal_d = internal(params.alpha_d, &state.d, &None);

    let l2 = params.lambda * params.lambda;
    let u: Vec<f64> = (0..nc)
        .map(|i| state.v[i] - lift_v.as_ref().map_or(0.0, |l| l[i]))
        .collect();
    let mut electric = 0.0;
    for e in mesh.edges() {
        let du = u[e.right] - u[e.left];
        electric += 0.5 * l2 * e.area / e.dist * du * du;
    }
    for f in faces {
        if bc.v_value(f).is_some() {
            electric += 0.5 * l2 * f.area / f.dist * u[f.cell] * u[f.cell];
        }
    }
    let cross = match &lift_v {
        Some(l) => mesh
            .cells()
            .iter()
            .enumerate()
            .map(|(i, c)| c.volume * state.d[i] * l[i])
            .sum(),
        None => 0.0,
    };
    let total = internal_n + internal_p + internal_d + electric + cross;
    Ok(EnergyBreakdown {
        internal_n,
        internal_p,
        internal_d,
        electric,
        cross,
        total,
    })
}

/// Entropy dissipation of a state: `sum_species sum_edges
/// mobility * (area/dist) * (w_left - w_right)^2`, the decrease rate the
/// implicit step guarantees for the free energy in insulated runs.
pub fn dissipation(
    mesh: &Mesh,
    params: &ModelParams,
    state: &State,
    mobility: Mobility,
) -> Result<f64> {
    params.validate(mesh)?;
    let nc = mesh.num_cells();
    for (name, f) in [("n", &state.n), ("p", &state.p), ("d", &state.d), ("v", &state.v)] {
        if f.len() != nc {
            return Err(Error::Data(format!(
                "state field {name} has {} entries for a mesh of {nc} cells",
                f.len()
            )));
        }
    }
    let fam = params.cutoff_k.map(CutoffFamily::new).transpose()?;
    let mut out = 0.0;
    for s in Species::ALL {
        let field = state.field(s);
        let w: Vec<f64> = (0..nc)
            .map(|i| mu_scheme(params, fam.as_ref(), s, field[i]) + s.drift_sign() * state.v[i])
            .collect();
        for e in mesh.edges() {
            let m = edge_mobility(
                mobility,
                mobility_density(params, fam.as_ref(), field[e.left]),
                mobility_density(params, fam.as_ref(), field[e.right]),
                w[e.left],
                w[e.right],
            );
            let dw = w[e.left] - w[e.right];
            out += m * e.area / e.dist * dw * dw;
        }
    }
    Ok(out)
}

/// Pointwise relative internal energy of density `v` against `vbar`:
/// the convexity gap of `u^alpha / (alpha-1)`. Nonnegative; zero only at
/// `v == vbar`. The quadratic case reduces to `(v - vbar)^2` exactly.
pub fn relative_density(alpha: f64, v: f64, vbar: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::Parameter(format!("alpha must exceed 1, got {alpha}")));
    }
    for (name, x) in [("density", v), ("reference density", vbar)] {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::Domain(format!("{name} must be nonnegative, got {x}")));
        }
    }
    if alpha == 2.0 {
        let d = v - vbar;
        return Ok(d * d);
    }
    Ok((v.powf(alpha) - vbar.powf(alpha) - alpha * vbar.powf(alpha - 1.0) * (v - vbar))
        / (alpha - 1.0))
}

/// Relative free energy of `state` against `reference`: volume-weighted
/// relative internal energies of all species plus the interior-edge electric
/// gap of the potentials. Negative density excursions clamp to zero.
pub fn relative_free_energy(
    mesh: &Mesh,
    params: &ModelParams,
    state: &State,
    reference: &State,
) -> Result<f64> {
    params.validate(mesh)?;
    let nc = mesh.num_cells();
    for (name, f) in [
        ("n", &state.n),
        ("p", &state.p),
        ("d", &state.d),
        ("v", &state.v),
        ("reference n", &reference.n),
        ("reference p", &reference.p),
        ("reference d", &reference.d),
        ("reference v", &reference.v),
    ] {
        if f.len() != nc {
            return Err(Error::Data(format!(
                "field {name} has {} entries for a mesh of {nc} cells",
                f.len()
            )));
        }
    }
    let mut out = 0.0;
    for s in Species::ALL {
        let a = params.alpha(s);
        let (f, g) = (state.field(s), reference.field(s));
        for (i, c) in mesh.cells().iter().enumerate() {
            out += c.volume * relative_density(a, f[i].max(0.0), g[i].max(0.0))?;
        }
    }
    let l2 = params.lambda * params.lambda;
    for e in mesh.edges() {
        let du = (state.v[e.right] - reference.v[e.right]) - (state.v[e.left] - reference.v[e.left]);
        out += 0.5 * l2 * e.area / e.dist * du * du;
    }
    Ok(out)
}

/// Volume-weighted `L^q` norm of a cell field; `q = infinity` gives the
/// max-norm.
pub fn lq_norm(mesh: &Mesh, field: &[f64], q: f64) -> Result<f64> {
    if field.len() != mesh.num_cells() {
        return Err(Error::Data(format!(
            "field has {} entries for a mesh of {} cells",
            field.len(),
            mesh.num_cells()
        )));
    }
    if q == f64::INFINITY {
        return Ok(field.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    }
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::Parameter(format!("norm exponent must be >= 1, got {q}")));
    }
    let sum: f64 = mesh
        .cells()
        .iter()
        .zip(field)
        .map(|(c, x)| c.volume * x.abs().powf(q))
        .sum();
    Ok(sum.powf(1.0 / q))
}

/// Grid scan of the ratio `relative_density(alpha, v, vbar) / (v - vbar)^2`
/// over `[m, big_m]^2`, with the diagonal filled by its limit
/// `alpha * vbar^(alpha-2) / 2`.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticBoundReport {
    pub infimum: f64,
    /// Infimum on a grid four times finer per axis.
    pub refined_infimum: f64,
    pub relative_change: f64,
    /// Relative change below one percent under refinement.
    pub stable: bool,
}

/// Verifies that the relative internal energy controls the squared distance
/// on a density window `[m, big_m]`: returns the scanned infimum of the
/// ratio and its stability under grid refinement. The quadratic exponent
/// gives exactly one.
pub fn verify_quadratic_bound(
    alpha: f64,
    m: f64,
    big_m: f64,
    grid: usize,
) -> Result<QuadraticBoundReport> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::Parameter(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(m.is_finite() && big_m.is_finite() && 0.0 < m && m < big_m) {
        return Err(Error::Parameter(format!(
            "need 0 < m < M, got m = {m}, M = {big_m}"
        )));
    }
    if grid < 2 {
        return Err(Error::Parameter("grid must have at least 2 points".into()));
    }
    let scan = |g: usize| -> Result<f64> {
        let point = |i: usize| m + (big_m - m) * i as f64 / (g - 1) as f64;
        let rows: Vec<Result<f64>> = par::map_range(g, true, |i| {
            let v = point(i);
            let mut row_min = f64::INFINITY;
            for j in 0..g {
                let vbar = point(j);
                let ratio = if v == vbar {
                    0.5 * alpha * vbar.powf(alpha - 2.0)
                } else {
                    let d = v - vbar;
                    relative_density(alpha, v, vbar)? / (d * d)
                };
                row_min = row_min.min(ratio);
            }
            Ok(row_min)
        });
        let mut min = f64::INFINITY;
        for r in rows {
            min = min.min(r?);
        }
        Ok(min)
    };
    let infimum = scan(grid)?;
    let refined_infimum = scan(4 * grid)?;
    let relative_change = (infimum - refined_infimum).abs() / refined_infimum.abs().max(1e-300);
    Ok(QuadraticBoundReport {
        infimum,
        refined_infimum,
        relative_change,
        stable: relative_change < 0.01,
    })
}
