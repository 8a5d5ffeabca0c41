//! TOML scenario configuration: strict parsing (unknown keys rejected),
//! explicit defaults, and structural validation with key names in messages.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Failures split by exit code: bad setup (2) versus a run that went
/// numerically wrong (3).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl From<memdd::Error> for CliError {
    fn from(e: memdd::Error) -> Self {
        match e {
            memdd::Error::StepFailure { .. } | memdd::Error::Numerical(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn default_dt() -> f64 {
    1e-3
}
fn default_record_every() -> usize {
    1
}
fn default_newton_tol() -> f64 {
    1e-10
}
fn default_newton_max_iter() -> usize {
    25
}
fn default_max_bisections() -> usize {
    12
}
fn default_true() -> bool {
    true
}
fn default_mode() -> usize {
    1
}
fn default_levels() -> usize {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Fixed boundary data, march to `t_end`.
    Relax,
    /// Relaxation with per-step energy/mass/positivity monitors; requires an
    /// all-Neumann boundary.
    InsulatedEnergyTest,
    /// Piecewise-linear bias schedule on the potential contacts, with
    /// terminal current and hysteresis loop area.
    Sweep,
    /// Mesh-refinement study of the configured problem.
    Convergence,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    /// Final physical time.
    pub t_end: f64,
    /// Nominal step; the harness bisects it when a solve fails.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Write a records row every this many steps (plus start and end).
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Write a field snapshot every this many steps (0 = final only).
    #[serde(default)]
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Domain length along x.
    pub lx: f64,
    /// Cells along x.
    pub nx: usize,
    /// Domain length along y; 0 for a one-dimensional run.
    #[serde(default)]
    pub ly: f64,
    /// Cells along y; 0 for a one-dimensional run.
    #[serde(default)]
    pub ny: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha_n: f64,
    pub alpha_p: f64,
    pub alpha_d: f64,
    pub lambda: f64,
    /// Uniform background doping.
    #[serde(default)]
    pub doping: f64,
    /// Truncation level for the regularized scheme; omit for the direct one.
    #[serde(default)]
    pub cutoff_k: Option<f64>,
    /// Density floor for mobilities and entropy variables.
    #[serde(default)]
    pub vacuum_floor: Option<f64>,
}

/// Initial profile `base + amplitude * sin(mode * pi * x / lx)`, constant
/// along y.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldInit {
    pub base: f64,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "default_mode")]
    pub mode: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub n: FieldInit,
    pub p: FieldInit,
    pub d: FieldInit,
}

/// Dirichlet values on one boundary segment; omitted fields mean no-flux.
/// The vacancy density never gets a contact.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    #[serde(default)]
    pub n: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub v: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MobilityConfig {
    Arithmetic,
    Upwind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_newton_max_iter")]
    pub newton_max_iter: usize,
    #[serde(default = "default_mobility")]
    pub mobility: MobilityConfig,
    /// Step halvings the harness may spend per nominal step.
    #[serde(default = "default_max_bisections")]
    pub max_bisections: usize,
    /// Couple the potential into the species fluxes.
    #[serde(default = "default_true")]
    pub drift: bool,
    /// Use the data-parallel assembly path when compiled in.
    #[serde(default = "default_true")]
    pub parallel: bool,
}

fn default_mobility() -> MobilityConfig {
    MobilityConfig::Arithmetic
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: default_newton_tol(),
            newton_max_iter: default_newton_max_iter(),
            mobility: default_mobility(),
            max_bisections: default_max_bisections(),
            drift: true,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Segment whose terminal current is reported.
    pub segment: String,
    /// `(time, bias multiplier)` knots of the piecewise-linear schedule;
    /// clamped outside the covered interval.
    pub breakpoints: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    /// Mesh levels, doubling the resolution each time.
    #[serde(default = "default_levels")]
    pub levels: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub mesh: MeshConfig,
    pub model: ModelConfig,
    pub initial: InitialConfig,
    #[serde(default)]
    pub boundary: BTreeMap<String, SegmentConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub convergence: Option<ConvergenceConfig>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Config = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Structural checks with the offending key in every message; model and
    /// boundary values are validated later by the library against the mesh.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let s = &self.scenario;
        if !(s.t_end.is_finite() && s.t_end > 0.0) {
            return bad(format!("scenario.t_end must be positive, got {}", s.t_end));
        }
        if !(s.dt.is_finite() && s.dt > 0.0) {
            return bad(format!("scenario.dt must be positive, got {}", s.dt));
        }
        if s.record_every == 0 {
            return bad("scenario.record_every must be at least 1".into());
        }
        let m = &self.mesh;
        if m.nx == 0 || !(m.lx.is_finite() && m.lx > 0.0) {
            return bad(format!(
                "mesh.nx and mesh.lx must be positive, got nx={}, lx={}",
                m.nx, m.lx
            ));
        }
        if (m.ny == 0) != (m.ly == 0.0) {
            return bad("mesh.ny and mesh.ly must be given together for a 2d run".into());
        }
        for (key, f) in [("n", self.initial.n), ("p", self.initial.p), ("d", self.initial.d)] {
            if !(f.base.is_finite() && f.amplitude.is_finite()) {
                return bad(format!("initial.{key} has non-finite entries"));
            }
            if f.base - f.amplitude.abs() < 0.0 {
                return bad(format!(
                    "initial.{key} dips below zero (base {} minus amplitude {})",
                    f.base, f.amplitude
                ));
            }
        }
        let sol = &self.solver;
        if !(sol.newton_tol.is_finite() && sol.newton_tol > 0.0) {
            return bad(format!(
                "solver.newton_tol must be positive, got {}",
                sol.newton_tol
            ));
        }
        if sol.newton_max_iter == 0 {
            return bad("solver.newton_max_iter must be at least 1".into());
        }
        match s.kind {
            Kind::Sweep => {
                let sw = self
                    .sweep
                    .as_ref()
                    .ok_or_else(|| CliError::Config("sweep scenario needs a [sweep] table".into()))?;
                if sw.breakpoints.len() < 2 {
                    return bad("sweep.breakpoints needs at least two knots".into());
                }
                if sw.breakpoints[0].0 != 0.0 {
                    return bad("sweep.breakpoints must start at time 0".into());
                }
                for w in sw.breakpoints.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return bad(format!(
                            "sweep.breakpoints times must increase, got {} then {}",
                            w[0].0, w[1].0
                        ));
                    }
                }
                if !self.boundary.values().any(|b| b.v.is_some()) {
                    return bad("sweep scenario needs a potential contact to bias".into());
                }
            }
            Kind::InsulatedEnergyTest => {
                if self
                    .boundary
                    .values()
                    .any(|b| b.n.is_some() || b.p.is_some() || b.v.is_some())
                {
                    return bad(
                        "insulated-energy-test requires an all-Neumann boundary; remove the [boundary] contacts"
                            .into(),
                    );
                }
            }
            Kind::Convergence => {
                if let Some(c) = &self.convergence {
                    if c.levels < 2 {
                        return bad("convergence.levels must be at least 2".into());
                    }
                }
            }
            Kind::Relax => {}
        }
        Ok(())
    }

    /// The effective settings after defaults, as TOML.
    pub fn echo(&self) -> String {
        toml::to_string_pretty(self).unwrap_or_else(|e| format!("(unprintable: {e})"))
    }
}

/// Piecewise-linear bias schedule, clamped outside its knots.
#[derive(Debug, Clone)]
pub struct Schedule {
    points: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        Schedule { points }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        for w in pts.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t <= t1 {
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
        }
        pts[pts.len() - 1].1
    }
}
