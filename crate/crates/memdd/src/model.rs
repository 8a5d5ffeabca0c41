//! Model parameters, boundary data, and simulation state.
//!
//! Three nonnegative densities evolve: electrons `n`, holes `p`, and oxygen
//! vacancies `d`, each with a power-law diffusion exponent. The electric
//! potential `v` solves `lambda^2 * laplace(v) = n - p - d + doping`.
//! Electrons and holes may have Dirichlet contacts; the vacancy density is
//! insulated (zero flux) on the whole boundary.

use crate::error::{Error, Result};
use crate::mesh::{BoundaryFace, Mesh};

/// The three mobile species.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    N,
    P,
    D,
}

impl Species {
    pub const ALL: [Species; 3] = [Species::N, Species::P, Species::D];

    /// Sign of the potential in the entropy variable `mu + drift_sign * v`:
    /// electrons drift against the field, holes and vacancies with it.
    pub fn drift_sign(self) -> f64 {
        match self {
            Species::N => -1.0,
            Species::P | Species::D => 1.0,
        }
    }

    /// Position of this species inside a per-cell unknown block
    /// `[n, p, d, v]`.
    pub fn offset(self) -> usize {
        match self {
            Species::N => 0,
            Species::P => 1,
            Species::D => 2,
        }
    }
}

/// Physical and scheme parameters.
#[derive(Debug, Clone)]
pub struct ModelParams {
    /// Diffusion exponent of the electron density (> 1; 5/3 models the
    /// high-density statistics limit).
    pub alpha_n: f64,
    /// Diffusion exponent of the hole density (> 1).
    pub alpha_p: f64,
    /// Diffusion exponent of the vacancy density (> 1).
    pub alpha_d: f64,
    /// Scaled Debye length (> 0).
    pub lambda: f64,
    /// Fixed background doping, one value per cell.
    pub doping: Vec<f64>,
    /// Truncation level `k >= 2` of the cutoff scheme; `None` runs the
    /// direct scheme on raw densities.
    pub cutoff_k: Option<f64>,
    /// Lower clamp for chemical-potential evaluation. `None` selects the
    /// default: 0 with a cutoff (the clamp is built in), 1e-14 otherwise.
    pub vacuum_floor: Option<f64>,
}

impl ModelParams {
    pub fn alpha(&self, s: Species) -> f64 {
        match s {
            Species::N => self.alpha_n,
            Species::P => self.alpha_p,
            Species::D => self.alpha_d,
        }
    }

    pub fn effective_floor(&self) -> f64 {
        self.vacuum_floor
            .unwrap_or(if self.cutoff_k.is_some() { 0.0 } else { 1e-14 })
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        for (key, a) in [
            ("alpha_n", self.alpha_n),
            ("alpha_p", self.alpha_p),
            ("alpha_d", self.alpha_d),
        ] {
            if !(a.is_finite() && a > 1.0) {
                return Err(Error::Parameter(format!("{key} must exceed 1, got {a}")));
            }
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::Parameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.doping.len() != mesh.num_cells() {
            return Err(Error::Data(format!(
                "doping has {} entries for a mesh of {} cells",
                self.doping.len(),
                mesh.num_cells()
            )));
        }
        if let Some(k) = self.cutoff_k {
            if !(k.is_finite() && k >= 2.0) {
                return Err(Error::Parameter(format!(
                    "cutoff_k must be at least 2, got {k}"
                )));
            }
        }
        if let Some(f) = self.vacuum_floor {
            if !(f.is_finite() && f >= 0.0) {
                return Err(Error::Parameter(format!(
                    "vacuum_floor must be nonnegative, got {f}"
                )));
            }
        }
        Ok(())
    }
}

/// Dirichlet data on one segment: a constant or one value per face.
#[derive(Debug, Clone)]
pub enum SegmentData {
    Const(f64),
    PerFace(Vec<f64>),
}

impl SegmentData {
    fn value(&self, ordinal: usize) -> f64 {
        match self {
            SegmentData::Const(c) => *c,
            SegmentData::PerFace(v) => v[ordinal],
        }
    }

    fn len_ok(&self, faces: usize) -> bool {
        match self {
            SegmentData::Const(_) => true,
            SegmentData::PerFace(v) => v.len() == faces,
        }
    }
}

/// Boundary roles and data for one segment. A present entry means Dirichlet,
/// an absent one homogeneous Neumann. The vacancy density has no entry: it is
/// insulated everywhere.
#[derive(Debug, Clone, Default)]
pub struct SegmentBc {
    pub n: Option<SegmentData>,
    pub p: Option<SegmentData>,
    pub v: Option<SegmentData>,
}

/// Boundary specification for the whole mesh, plus the bias multiplier
/// applied to the potential's Dirichlet data (swept in hysteresis runs).
#[derive(Debug, Clone)]
pub struct BoundarySpec {
    segments: Vec<SegmentBc>,
    vd_multiplier: f64,
}

impl BoundarySpec {
    /// All-Neumann boundary (insulated device).
    pub fn insulated(mesh: &Mesh) -> Self {
        BoundarySpec {
            segments: vec![SegmentBc::default(); mesh.segments().len()],
            vd_multiplier: 1.0,
        }
    }

    pub fn new(mesh: &Mesh, segments: Vec<SegmentBc>) -> Result<Self> {
        if segments.len() != mesh.segments().len() {
            return Err(Error::Config(format!(
                "boundary spec has {} segments, mesh has {}",
                segments.len(),
                mesh.segments().len()
            )));
        }
        let bc = BoundarySpec {
            segments,
            vd_multiplier: 1.0,
        };
        bc.validate(mesh)?;
        Ok(bc)
    }

    pub fn set_segment(&mut self, segment: usize, bc: SegmentBc) {
        self.segments[segment] = bc;
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        for (i, seg) in self.segments.iter().enumerate() {
            let faces = mesh
                .boundary_faces()
                .iter()
                .filter(|f| f.segment == i)
                .count();
            let name = mesh.segments()[i];
            for (unknown, data) in [("n", &seg.n), ("p", &seg.p), ("v", &seg.v)] {
                if let Some(d) = data {
                    if !d.len_ok(faces) {
                        return Err(Error::Data(format!(
                            "per-face data for {unknown} on segment '{name}' does not match its {faces} faces"
                        )));
                    }
                }
            }
            for (unknown, data) in [("n", &seg.n), ("p", &seg.p)] {
                if let Some(d) = data {
                    let bad = match d {
                        SegmentData::Const(c) => *c < 0.0 || !c.is_finite(),
                        SegmentData::PerFace(v) => v.iter().any(|c| *c < 0.0 || !c.is_finite()),
                    };
                    if bad {
                        return Err(Error::Data(format!(
                            "Dirichlet data for {unknown} on segment '{name}' must be nonnegative and finite"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Copy with the potential's Dirichlet data scaled by `m`.
    pub fn with_vd_multiplier(&self, m: f64) -> Self {
        BoundarySpec {
            segments: self.segments.clone(),
            vd_multiplier: m,
        }
    }

    pub fn vd_multiplier(&self) -> f64 {
        self.vd_multiplier
    }

    /// Dirichlet value of `n` at a boundary face, if that segment is a
    /// contact for `n`.
    pub fn n_value(&self, face: &BoundaryFace) -> Option<f64> {
        self.segments[face.segment].n.as_ref().map(|d| d.value(face.ordinal))
    }

    pub fn p_value(&self, face: &BoundaryFace) -> Option<f64> {
        self.segments[face.segment].p.as_ref().map(|d| d.value(face.ordinal))
    }

    /// Dirichlet value of the potential at a boundary face with the bias
    /// multiplier applied.
    pub fn v_value(&self, face: &BoundaryFace) -> Option<f64> {
        self.segments[face.segment]
            .v
            .as_ref()
            .map(|d| d.value(face.ordinal) * self.vd_multiplier)
    }

    /// Unscaled Dirichlet value of the potential (multiplier ignored).
    pub fn v_value_base(&self, face: &BoundaryFace) -> Option<f64> {
        self.segments[face.segment].v.as_ref().map(|d| d.value(face.ordinal))
    }

    pub fn has_dirichlet_v(&self) -> bool {
        self.segments.iter().any(|s| s.v.is_some())
    }

    pub fn has_dirichlet_np(&self) -> bool {
        self.segments.iter().any(|s| s.n.is_some() || s.p.is_some())
    }

    /// Whether `species` has Dirichlet data on `segment` (`D` never does).
    pub fn is_dirichlet(&self, species: Species, segment: usize) -> bool {
        match species {
            Species::N => self.segments[segment].n.is_some(),
            Species::P => self.segments[segment].p.is_some(),
            Species::D => false,
        }
    }
}

/// Simulation state: time and the four cell-centered fields.
#[derive(Debug, Clone)]
pub struct State {
    pub time: f64,
    pub n: Vec<f64>,
    pub p: Vec<f64>,
    pub d: Vec<f64>,
    /// Potential consistent with the densities; zeros until the first
    /// Poisson solve.
    pub v: Vec<f64>,
}

impl State {
    /// State at time 0 from per-cell density profiles. The potential starts
    /// at zero; run a Poisson solve to make it consistent.
    pub fn init(mesh: &Mesh, n: Vec<f64>, p: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        let nc = mesh.num_cells();
        for (name, field) in [("n", &n), ("p", &p), ("d", &d)] {
            if field.len() != nc {
                return Err(Error::Data(format!(
                    "initial {name} has {} entries for a mesh of {nc} cells",
                    field.len()
                )));
            }
            if field.iter().any(|x| !x.is_finite()) {
                return Err(Error::Data(format!("initial {name} contains non-finite entries")));
            }
        }
        Ok(State {
            time: 0.0,
            n,
            p,
            d,
            v: vec![0.0; nc],
        })
    }

    pub fn field(&self, s: Species) -> &[f64] {
        match s {
            Species::N => &self.n,
            Species::P => &self.p,
            Species::D => &self.d,
        }
    }
}

/// Volume-weighted total of a cell field (mass when the field is a density).
pub fn total_mass(mesh: &Mesh, field: &[f64]) -> f64 {
    mesh.cells()
        .iter()
        .zip(field)
        .map(|(c, x)| c.volume * x)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mesh: &Mesh) -> ModelParams {
        ModelParams {
            alpha_n: 5.0 / 3.0,
            alpha_p: 5.0 / 3.0,
            alpha_d: 5.0 / 3.0,
            lambda: 1.0,
            doping: vec![0.0; mesh.num_cells()],
            cutoff_k: None,
            vacuum_floor: None,
        }
    }

    #[test]
    fn params_validation() {
        let mesh = Mesh::line(1.0, 4).unwrap();
        assert!(params(&mesh).validate(&mesh).is_ok());

        let mut bad = params(&mesh);
        bad.alpha_n = 1.0;
        let err = bad.validate(&mesh).unwrap_err().to_string();
        assert!(err.contains("alpha_n must exceed 1"), "{err}");

        let mut bad = params(&mesh);
        bad.doping = vec![0.0; 3];
        assert!(matches!(bad.validate(&mesh), Err(Error::Data(_))));

        let mut bad = params(&mesh);
        bad.cutoff_k = Some(1.5);
        assert!(bad.validate(&mesh).is_err());
    }

    #[test]
    fn floor_defaults_track_scheme() {
        let mesh = Mesh::line(1.0, 4).unwrap();
        let mut p = params(&mesh);
        assert_eq!(p.effective_floor(), 1e-14);
        p.cutoff_k = Some(4.0);
        assert_eq!(p.effective_floor(), 0.0);
        p.vacuum_floor = Some(1e-12);
        assert_eq!(p.effective_floor(), 1e-12);
    }

    #[test]
    fn boundary_roles_and_multiplier() {
        let mesh = Mesh::line(1.0, 4).unwrap();
        let mut bc = BoundarySpec::insulated(&mesh);
        assert!(!bc.has_dirichlet_v());
        bc.set_segment(
            0,
            SegmentBc {
                n: Some(SegmentData::Const(1.0)),
                p: Some(SegmentData::Const(2.0)),
                v: Some(SegmentData::Const(0.5)),
            },
        );
        bc.validate(&mesh).unwrap();
        assert!(bc.has_dirichlet_v());
        assert!(bc.is_dirichlet(Species::N, 0));
        assert!(!bc.is_dirichlet(Species::D, 0));
        let face = mesh.boundary_faces()[0];
        assert_eq!(bc.v_value(&face), Some(0.5));
        let scaled = bc.with_vd_multiplier(-2.0);
        assert_eq!(scaled.v_value(&face), Some(-1.0));
        assert_eq!(scaled.n_value(&face), Some(1.0));
        assert_eq!(scaled.v_value_base(&face), Some(0.5));
    }

    #[test]
    fn negative_contact_density_rejected() {
        let mesh = Mesh::line(1.0, 4).unwrap();
        let mut bc = BoundarySpec::insulated(&mesh);
        bc.set_segment(
            0,
            SegmentBc {
                n: Some(SegmentData::Const(-1.0)),
                p: None,
                v: None,
            },
        );
        assert!(bc.validate(&mesh).is_err());
    }

    #[test]
    fn per_face_data_length_checked() {
        let mesh = Mesh::rectangle(1.0, 1.0, 3, 2).unwrap();
        let mut bc = BoundarySpec::insulated(&mesh);
        bc.set_segment(
            0,
            SegmentBc {
                n: None,
                p: None,
                v: Some(SegmentData::PerFace(vec![0.0; 3])),
            },
        );
        assert!(bc.validate(&mesh).is_err());
        bc.set_segment(
            0,
            SegmentBc {
                n: None,
                p: None,
                v: Some(SegmentData::PerFace(vec![0.0; 2])),
            },
        );
        bc.validate(&mesh).unwrap();
    }

    #[test]
    fn state_shape_checked() {
        let mesh = Mesh::line(1.0, 4).unwrap();
        let s = State::init(&mesh, vec![1.0; 4], vec![1.0; 4], vec![0.0; 4]).unwrap();
        assert_eq!(s.time, 0.0);
        assert_eq!(s.v, vec![0.0; 4]);
        assert!(State::init(&mesh, vec![1.0; 3], vec![1.0; 4], vec![0.0; 4]).is_err());
        assert!(State::init(&mesh, vec![f64::NAN; 4], vec![1.0; 4], vec![0.0; 4]).is_err());
    }

    #[test]
    fn mass_is_volume_weighted() {
        let mesh = Mesh::line(2.0, 4).unwrap();
        let mass = total_mass(&mesh, &[1.0, 2.0, 3.0, 4.0]);
        assert!((mass - 0.5 * 10.0).abs() < 1e-14);
    }
}
