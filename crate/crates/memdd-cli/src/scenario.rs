//! Scenario execution: builds the discrete problem from a config, marches it
//! with harness-level step bisection, runs per-step monitors, and writes the
//! records/snapshot/summary files.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use memdd::diagnostics::{dissipation, exponent_report, free_energy};
use memdd::mesh::Mesh;
use memdd::model::{total_mass, BoundarySpec, ModelParams, SegmentBc, SegmentData, Species, State};
use memdd::poisson::solve_poisson;
use memdd::transport::{advance, terminal_current, Mobility, StepOptions};

use crate::config::{CliError, Config, Kind, MobilityConfig, Schedule};
use crate::output::{fmt_f, write_csv, write_snapshot, write_summary};

/// A fully validated, ready-to-march problem.
pub struct Problem {
    pub cfg: Config,
    pub mesh: Mesh,
    pub params: ModelParams,
    /// Boundary at unit bias; sweeps scale its potential data per step.
    pub bc: BoundarySpec,
    pub opts: StepOptions,
    pub schedule: Option<Schedule>,
    /// `(segment index, name)` of every carrier contact, in mesh order.
    pub current_segments: Vec<(usize, String)>,
}

impl Problem {
    pub fn build(cfg: Config) -> Result<Problem, CliError> {
        cfg.validate()?;
        let mesh = if cfg.mesh.ny == 0 {
            Mesh::line(cfg.mesh.lx, cfg.mesh.nx)?
        } else {
            Mesh::rectangle(cfg.mesh.lx, cfg.mesh.ly, cfg.mesh.nx, cfg.mesh.ny)?
        };
        let mut bc = BoundarySpec::insulated(&mesh);
        for (name, seg) in &cfg.boundary {
            let idx = mesh.segment_index(name).map_err(|_| {
                CliError::Config(format!(
                    "boundary.{name} does not match a mesh segment (have: {})",
                    mesh.segments().join(", ")
                ))
            })?;
            bc.set_segment(
                idx,
                SegmentBc {
                    n: seg.n.map(SegmentData::Const),
                    p: seg.p.map(SegmentData::Const),
                    v: seg.v.map(SegmentData::Const),
                },
            );
        }
        bc.validate(&mesh)?;
        let params = ModelParams {
            alpha_n: cfg.model.alpha_n,
            alpha_p: cfg.model.alpha_p,
            alpha_d: cfg.model.alpha_d,
            lambda: cfg.model.lambda,
            doping: vec![cfg.model.doping; mesh.num_cells()],
            cutoff_k: cfg.model.cutoff_k,
            vacuum_floor: cfg.model.vacuum_floor,
        };
        params.validate(&mesh)?;
        let opts = StepOptions {
            mobility: match cfg.solver.mobility {
                MobilityConfig::Arithmetic => Mobility::ArithmeticMean,
                MobilityConfig::Upwind => Mobility::Upwind,
            },
            newton_tol: cfg.solver.newton_tol,
            newton_max_iter: cfg.solver.newton_max_iter,
            gauge: !bc.has_dirichlet_v(),
            drift: cfg.solver.drift,
            parallel: cfg.solver.parallel,
            ..StepOptions::default()
        };
        let current_segments: Vec<(usize, String)> = mesh
            .segments()
            .iter()
            .enumerate()
            .filter(|&(i, _)| bc.is_dirichlet(Species::N, i) || bc.is_dirichlet(Species::P, i))
            .map(|(i, name)| (i, name.to_string()))
            .collect();
        let schedule = cfg
            .sweep
            .as_ref()
            .map(|s| Schedule::new(s.breakpoints.clone()));
        if let Some(sw) = &cfg.sweep {
            if !current_segments.iter().any(|(_, n)| *n == sw.segment) {
                return Err(CliError::Config(format!(
                    "sweep.segment '{}' has no carrier contact to measure a current at",
                    sw.segment
                )));
            }
        }
        Ok(Problem {
            cfg,
            mesh,
            params,
            bc,
            opts,
            schedule,
            current_segments,
        })
    }

    /// Boundary data effective at time `t` (bias multiplier applied).
    pub fn bc_at(&self, t: f64) -> BoundarySpec {
        match &self.schedule {
            Some(s) => self.bc.with_vd_multiplier(s.eval(t)),
            None => self.bc.clone(),
        }
    }

    pub fn initial_state(&self) -> Result<State, CliError> {
        let (lx, _) = self.mesh.lengths();
        let sample = |f: crate::config::FieldInit| {
            self.mesh
                .sample(move |x, _| f.base + f.amplitude * (f.mode as f64 * PI * x / lx).sin())
        };
        let ini = &self.cfg.initial;
        let mut state = State::init(&self.mesh, sample(ini.n), sample(ini.p), sample(ini.d))?;
        let bc0 = self.bc_at(0.0);
        state.v = solve_poisson(
            &self.mesh,
            &bc0,
            &self.params,
            &state.n,
            &state.p,
            &state.d,
            self.opts.gauge,
        )?;
        Ok(state)
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct StepStats {
    newton_iterations: usize,
    bisections: usize,
    damping_events: usize,
}

/// Marches `state` to `target`, halving the substep on failed solves. The
/// bias multiplier is re-evaluated at the end of each attempted substep, so
/// bisected steps still follow the schedule.
fn advance_to(p: &Problem, state: &mut State, target: f64) -> Result<StepStats, CliError> {
    let dt = p.cfg.scenario.dt;
    let mut stats = StepStats::default();
    while state.time < target - 1e-12 * dt {
        let remaining = target - state.time;
        // Accumulated time rounding can leave a sliver remainder far smaller
        // than dt; a step that small is unsolvable (its 1/h mass terms
        // amplify roundoff past any Newton tolerance), so a near-full
        // remainder is absorbed into one slightly stretched substep.
        let mut h = if remaining < dt * (1.0 + 1e-6) { remaining } else { dt };
        let mut halvings = 0usize;
        loop {
            let bc_h = p.bc_at(state.time + h);
            match advance(&p.mesh, &bc_h, &p.params, state, h, p.opts) {
                Ok((next, rep)) => {
                    stats.newton_iterations += rep.iterations;
                    stats.damping_events += rep.damping_events;
                    *state = next;
                    break;
                }
                Err(e @ (memdd::Error::StepFailure { .. } | memdd::Error::Numerical(_))) => {
                    halvings += 1;
                    stats.bisections += 1;
                    if halvings > p.cfg.solver.max_bisections {
                        return Err(CliError::Numerical(format!(
                            "step from t={:.6e} failed after {} halvings: {e}",
                            state.time,
                            halvings - 1
                        )));
                    }
                    h *= 0.5;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(stats)
}

fn min_of(field: &[f64]) -> f64 {
    field.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// One per-step monitor with a running verdict.
struct Monitor {
    name: &'static str,
    failures: usize,
    first: Option<String>,
}

impl Monitor {
    fn new(name: &'static str) -> Self {
        Monitor {
            name,
            failures: 0,
            first: None,
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(detail());
            }
        }
    }

    fn verdict(&self) -> String {
        match &self.first {
            None => format!("monitor {}: PASS", self.name),
            Some(d) => format!("monitor {}: FAIL ({} violations; first: {d})", self.name, self.failures),
        }
    }
}

pub fn cmd_run(cfg: Config, out: &Path) -> Result<(), CliError> {
    if cfg.scenario.kind == Kind::Convergence {
        let levels = cfg.convergence.as_ref().map(|c| c.levels).unwrap_or(3);
        return cmd_converge(cfg, levels, out);
    }
    run_time_scenario(cfg, out)
}

fn run_time_scenario(cfg: Config, out: &Path) -> Result<(), CliError> {
    let kind = cfg.scenario.kind;
    let p = Problem::build(cfg)?;
    fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;

    let mut header: Vec<String> = [
        "step",
        "time",
        "vd_multiplier",
        "newton_iterations",
        "mass_n",
        "mass_p",
        "mass_d",
        "min_n",
        "min_p",
        "min_d",
        "free_energy",
        "dissipation",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for (_, name) in &p.current_segments {
        header.push(format!("current_{name}"));
    }

    let mut state = p.initial_state()?;
    let scn = p.cfg.scenario.clone();
    let steps = (scn.t_end / scn.dt).ceil() as usize;

    let observe =
        |state: &State, iters: usize| -> Result<(Vec<String>, f64, [f64; 3], f64), CliError> {
            let bc_now = p.bc_at(state.time);
            let h = free_energy(&p.mesh, &bc_now, &p.params, state)?.total;
            let diss = dissipation(&p.mesh, &p.params, state, p.opts.mobility)?;
            let masses = [
                total_mass(&p.mesh, &state.n),
                total_mass(&p.mesh, &state.p),
                total_mass(&p.mesh, &state.d),
            ];
            let mult = bc_now.vd_multiplier();
            let mut row = vec![format!("{}", (state.time / scn.dt).round() as usize)];
            for x in [
                state.time,
                mult,
                iters as f64,
                masses[0],
                masses[1],
                masses[2],
                min_of(&state.n),
                min_of(&state.p),
                min_of(&state.d),
                h,
                diss,
            ] {
                row.push(fmt_f(x));
            }
            row[3] = format!("{iters}");
            let mut current_at_sweep_seg = f64::NAN;
            for (idx, name) in &p.current_segments {
                let i = terminal_current(&p.mesh, &bc_now, &p.params, state, name, p.opts)?;
                row.push(fmt_f(i));
                if let Some(sw) = &p.cfg.sweep {
                    if sw.segment == *name {
                        current_at_sweep_seg = i;
                    }
                }
                let _ = idx;
            }
            Ok((row, h, masses, current_at_sweep_seg))
        };

    let mut rows = Vec::new();
    let (row0, mut h_prev, mut masses_prev, mut current_prev) = observe(&state, 0)?;
    rows.push(row0);

    let mut mon_energy = Monitor::new("energy_nonincreasing");
    let mut mon_mass = Monitor::new("mass_conservation");
    let mut mon_pos = Monitor::new("nonnegativity");
    let mut mult_prev = p.bc_at(0.0).vd_multiplier();
    let mut loop_area = 0.0f64;
    let mut totals = StepStats::default();

    for m in 1..=steps {
        let target = (m as f64 * scn.dt).min(scn.t_end);
        let stats = advance_to(&p, &mut state, target)?;
        totals.newton_iterations += stats.newton_iterations;
        totals.bisections += stats.bisections;
        totals.damping_events += stats.damping_events;

        let (row, h, masses, current) = observe(&state, stats.newton_iterations)?;
        if kind == Kind::InsulatedEnergyTest {
            mon_energy.check(h <= h_prev + 1e-10, || {
                format!("step {m}: energy {h:.16e} from {:.16e}", h_prev)
            });
            let drift = masses
                .iter()
                .zip(&masses_prev)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            mon_mass.check(drift <= 1e-12, || format!("step {m}: mass drift {drift:.3e}"));
            let floor = min_of(&state.n).min(min_of(&state.p)).min(min_of(&state.d));
            mon_pos.check(floor >= -1e-12, || format!("step {m}: density {floor:.3e}"));
        }
        if p.schedule.is_some() {
            let mult = p.bc_at(state.time).vd_multiplier();
            loop_area += 0.5 * (mult - mult_prev) * (current + current_prev);
            mult_prev = mult;
            current_prev = current;
        }
        h_prev = h;
        masses_prev = masses;
        if m % scn.record_every == 0 || m == steps {
            rows.push(row);
        }
        if scn.snapshot_every > 0 && m % scn.snapshot_every == 0 {
            let path = out.join(format!("snapshot_{m:06}.csv"));
            write_snapshot(&path, &p.mesh, &state)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        }
    }

    let io_err = |path: &Path, e: std::io::Error| {
        CliError::Config(format!("cannot write {}: {e}", path.display()))
    };
    let records = out.join("records.csv");
    write_csv(&records, &header, &rows).map_err(|e| io_err(&records, e))?;
    let final_snap = out.join("snapshot_final.csv");
    write_snapshot(&final_snap, &p.mesh, &state).map_err(|e| io_err(&final_snap, e))?;

    let mut summary = vec![
        format!("scenario: {}", kind_name(kind)),
        format!("steps: {steps}"),
        format!("final_time: {}", fmt_f(state.time)),
        format!("free_energy_final: {}", fmt_f(h_prev)),
        format!("newton_iterations_total: {}", totals.newton_iterations),
        format!("step_bisections_total: {}", totals.bisections),
        format!("damping_events_total: {}", totals.damping_events),
    ];
    let mut failed = 0usize;
    if kind == Kind::InsulatedEnergyTest {
        for mon in [&mon_energy, &mon_mass, &mon_pos] {
            summary.push(mon.verdict());
            failed += mon.failures;
        }
    }
    if let Some(sw) = &p.cfg.sweep {
        summary.push(format!("sweep_segment: {}", sw.segment));
        summary.push(format!("loop_area: {}", fmt_f(loop_area)));
    }
    let summary_path = out.join("summary.txt");
    write_summary(&summary_path, &summary).map_err(|e| io_err(&summary_path, e))?;
    for line in &summary {
        println!("{line}");
    }
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} monitor violations; see {}",
            summary_path.display()
        )));
    }
    Ok(())
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Relax => "relax",
        Kind::InsulatedEnergyTest => "insulated-energy-test",
        Kind::Sweep => "sweep",
        Kind::Convergence => "convergence",
    }
}

/// Block-mean projection onto the next-coarser mesh (cells halved per axis).
fn project_halved(fine: &[f64], nx_c: usize, ny_c: usize) -> Vec<f64> {
    if ny_c <= 1 && fine.len() == 2 * nx_c {
        return fine.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    }
    let nx_f = 2 * nx_c;
    let mut out = Vec::with_capacity(nx_c * ny_c);
    for j in 0..ny_c {
        for i in 0..nx_c {
            let mut acc = 0.0;
            for dj in 0..2 {
                for di in 0..2 {
                    acc += fine[(2 * j + dj) * nx_f + (2 * i + di)];
                }
            }
            out.push(0.25 * acc);
        }
    }
    out
}

pub fn cmd_converge(cfg: Config, levels: usize, out: &Path) -> Result<(), CliError> {
    if levels < 2 {
        return Err(CliError::Config(format!(
            "a convergence study needs at least 2 levels, got {levels}"
        )));
    }
    fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;

    struct Level {
        nx: usize,
        ny: usize,
        dt: f64,
        vols: f64,
        fields: [Vec<f64>; 3],
    }
    let mut runs = Vec::new();
    for l in 0..levels {
        let mut c = cfg.clone();
        c.scenario.kind = Kind::Relax;
        c.mesh.nx = cfg.mesh.nx << l;
        if cfg.mesh.ny > 0 {
            c.mesh.ny = cfg.mesh.ny << l;
        }
        // parabolic step refinement keeps the time error subordinate
        c.scenario.dt = cfg.scenario.dt / 4f64.powi(l as i32);
        let p = Problem::build(c)?;
        let mut state = p.initial_state()?;
        let steps = (p.cfg.scenario.t_end / p.cfg.scenario.dt).ceil() as usize;
        for m in 1..=steps {
            let target = (m as f64 * p.cfg.scenario.dt).min(p.cfg.scenario.t_end);
            advance_to(&p, &mut state, target)?;
        }
        let (nx, ny) = p.mesh.cell_counts();
        runs.push(Level {
            nx,
            ny,
            dt: p.cfg.scenario.dt,
            vols: p.mesh.cells()[0].volume,
            fields: [state.n, state.p, state.d],
        });
    }

    let mut gaps = Vec::new();
    for w in runs.windows(2) {
        let (coarse, fine) = (&w[0], &w[1]);
        let mut l1 = 0.0;
        for s in 0..3 {
            let proj = project_halved(&fine.fields[s], coarse.nx, coarse.ny);
            l1 += coarse.fields[s]
                .iter()
                .zip(&proj)
                .map(|(a, b)| coarse.vols * (a - b).abs())
                .sum::<f64>();
        }
        gaps.push(l1);
    }

    let header: Vec<String> = ["level", "cells_x", "cells_y", "dt", "l1_gap_to_finer", "order"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    println!("level  cells      dt            l1_gap_to_finer   order");
    for (l, run) in runs.iter().enumerate() {
        let gap = gaps.get(l).map(|&g| fmt_f(g)).unwrap_or_else(|| "-".into());
        let order = if l >= 1 && l < gaps.len() {
            format!("{:.3}", (gaps[l - 1] / gaps[l]).log2())
        } else {
            "-".into()
        };
        println!(
            "{:<6} {:<10} {:<13.6e} {:<17} {order}",
            l,
            format!("{}x{}", run.nx, run.ny.max(1)),
            run.dt,
            gap
        );
        rows.push(vec![
            l.to_string(),
            run.nx.to_string(),
            run.ny.max(1).to_string(),
            fmt_f(run.dt),
            gap,
            order,
        ]);
    }
    let path = out.join("convergence.csv");
    write_csv(&path, &header, &rows)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub fn cmd_check(cfg: &Config) -> Result<(), CliError> {
    let p = Problem::build(cfg.clone())?;
    print!("{}", p.cfg.echo());
    println!();
    println!("# derived");
    let (nx, ny) = p.mesh.cell_counts();
    println!("# cells: {}", p.mesh.num_cells());
    println!("# grid: {}x{}", nx, ny.max(1));
    println!(
        "# potential gauge: {}",
        if p.opts.gauge { "all-neumann (zero mean)" } else { "contact pinned" }
    );
    for (i, name) in p.mesh.segments().iter().enumerate() {
        let mut kinds = Vec::new();
        for (label, sp) in [("n", Species::N), ("p", Species::P)] {
            if p.bc.is_dirichlet(sp, i) {
                kinds.push(label);
            }
        }
        if p.cfg.boundary.get(*name).is_some_and(|s| s.v.is_some()) {
            kinds.push("v");
        }
        println!(
            "# segment {name}: {}",
            if kinds.is_empty() { "insulated".to_string() } else { format!("contacts [{}]", kinds.join(", ")) }
        );
    }
    Ok(())
}

pub fn cmd_exponents(alphas: &[f64]) -> Result<(), CliError> {
    println!("alpha,theta,theta_companion,gradient,dual,iteration_fixed_point");
    for &a in alphas {
        let rep = exponent_report(a)?;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.12}")).unwrap_or_else(|| "-".into());
        println!(
            "{:.12},{:.12},{},{:.12},{:.12},{}",
            rep.alpha,
            rep.theta,
            opt(rep.theta_tilde),
            rep.gradient_exponent,
            rep.dual_exponent,
            opt(rep.moser_fixed_point),
        );
    }
    Ok(())
}
