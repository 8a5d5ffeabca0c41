//! Discrete Poisson solve for the electric potential.
//!
//! Two-point flux finite volumes on the uniform mesh:
//! `lambda^2 * laplace(v) = n - p - d + doping`, Dirichlet values imposed at
//! boundary-face centers through half-cell faces, homogeneous Neumann faces
//! simply absent. The operator depends only on the mesh and the boundary
//! layout, so one factorization serves any number of right-hand sides.
//!
//! With no Dirichlet segment for the potential the operator is singular;
//! gauge mode restores solvability by projecting the charge to zero mean and
//! pinning the potential (cell 0 during the solve, then a shift to
//! volume-weighted zero mean).

use crate::banded::{Banded, BandedLu};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::model::{BoundarySpec, ModelParams};

/// Assembled and factored Poisson operator.
#[derive(Debug, Clone)]
pub struct PoissonSystem {
    matrix: Banded,
    lu: BandedLu,
    gauge: bool,
    vols: Vec<f64>,
    total_volume: f64,
    /// `(boundary face index, cell, lambda^2 * area / dist)` for each
    /// Dirichlet face of the potential.
    dirichlet: Vec<(usize, usize, f64)>,
}

pub(crate) fn assemble_operator(
    mesh: &Mesh,
    bc: &BoundarySpec,
    params: &ModelParams,
    gauge: bool,
) -> Banded {
    let nc = mesh.num_cells();
    let stride = mesh.max_neighbor_stride();
    let l2 = params.lambda * params.lambda;
    let mut m = Banded::new(nc, stride, stride);
    for e in mesh.edges() {
        let c = l2 * e.area / e.dist;
        m.add(e.left, e.left, c);
        m.add(e.right, e.right, c);
        m.add(e.left, e.right, -c);
        m.add(e.right, e.left, -c);
    }
    for f in mesh.boundary_faces() {
        if bc.v_value_base(f).is_some() {
            m.add(f.cell, f.cell, l2 * f.area / f.dist);
        }
    }
    if gauge {
        m.zero_row(0);
        m.set(0, 0, 1.0);
    }
    m
}

impl PoissonSystem {
    pub fn new(mesh: &Mesh, bc: &BoundarySpec, params: &ModelParams, gauge: bool) -> Result<Self> {
        params.validate(mesh)?;
        bc.validate(mesh)?;
        if !bc.has_dirichlet_v() && !gauge {
            return Err(Error::Config(
                "potential has no Dirichlet segment; enable gauge mode for insulated runs".into(),
            ));
        }
        if bc.has_dirichlet_v() && gauge {
            return Err(Error::Config(
                "gauge mode is only for an all-Neumann potential".into(),
            ));
        }
        let matrix = assemble_operator(mesh, bc, params, gauge);
        let lu = matrix.clone().factor()?;
        let l2 = params.lambda * params.lambda;
        let dirichlet = mesh
            .boundary_faces()
            .iter()
            .enumerate()
            .filter(|(_, f)| bc.v_value_base(f).is_some())
            .map(|(i, f)| (i, f.cell, l2 * f.area / f.dist))
            .collect();
        Ok(PoissonSystem {
            matrix,
            lu,
            gauge,
            vols: mesh.cells().iter().map(|c| c.volume).collect(),
            total_volume: mesh.total_volume(),
            dirichlet,
        })
    }

    /// Signed charge `n - p - d + doping` per cell.
    fn charge(&self, params: &ModelParams, n: &[f64], p: &[f64], d: &[f64]) -> Vec<f64> {
        (0..n.len())
            .map(|i| n[i] - p[i] - d[i] + params.doping[i])
            .collect()
    }

    /// Solves for the potential given candidate densities. `bc` must have the
    /// same Dirichlet layout the system was built with (only the values and
    /// the bias multiplier may differ).
    pub fn solve(
        &self,
        mesh: &Mesh,
        bc: &BoundarySpec,
        params: &ModelParams,
        n: &[f64],
        p: &[f64],
        d: &[f64],
    ) -> Result<Vec<f64>> {
        let nc = self.vols.len();
        for (name, f) in [("n", n), ("p", p), ("d", d)] {
            if f.len() != nc {
                return Err(Error::Data(format!(
                    "field {name} has {} entries for a mesh of {nc} cells",
                    f.len()
                )));
            }
        }
        let mut rho = self.charge(params, n, p, d);
        if self.gauge {
            let mean: f64 =
                rho.iter().zip(&self.vols).map(|(r, v)| r * v).sum::<f64>() / self.total_volume;
            for r in rho.iter_mut() {
                *r -= mean;
            }
        }
        let mut b: Vec<f64> = rho
            .iter()
            .zip(&self.vols)
            .map(|(r, vol)| -vol * r)
            .collect();
        for &(face, cell, coef) in &self.dirichlet {
            let vd = bc.v_value(&mesh.boundary_faces()[face]).ok_or_else(|| {
                Error::Config("boundary spec no longer matches the assembled Dirichlet layout".into())
            })?;
            b[cell] += coef * vd;
        }
        if self.gauge {
            b[0] = 0.0;
        }
        let mut v = self.lu.solve(&b);

        // backward-error check: |Av - b| against |A| |v| + |b|
        let ax = self.matrix.matvec(&v);
        let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let bmax = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let scale = (self.matrix.inf_norm() * vmax + bmax).max(1e-300);
        let worst = ax
            .iter()
            .zip(&b)
            .fold(0.0f64, |m, (a, bi)| m.max((a - bi).abs()));
        if worst > 1e-12 * scale {
            return Err(Error::Numerical(format!(
                "Poisson solve residual {worst:.3e} exceeds 1e-12 relative to scale {scale:.3e}"
            )));
        }

        if self.gauge {
            let mean: f64 =
                v.iter().zip(&self.vols).map(|(x, vol)| x * vol).sum::<f64>() / self.total_volume;
            for x in v.iter_mut() {
                *x -= mean;
            }
        }
        Ok(v)
    }
}

/// One-shot Poisson solve (assembles, factors, solves).
pub fn solve_poisson(
    mesh: &Mesh,
    bc: &BoundarySpec,
    params: &ModelParams,
    n: &[f64],
    p: &[f64],
    d: &[f64],
    gauge: bool,
) -> Result<Vec<f64>> {
    PoissonSystem::new(mesh, bc, params, gauge)?.solve(mesh, bc, params, n, p, d)
}

/// Discrete `L^r` norm of the potential gradient, `r >= 1`.
///
/// Edge differences are weighted by the edge diamonds `area * dist`, rescaled
/// to the full domain measure so that constant-gradient fields evaluate to
/// their exact continuum norm on any mesh. Interior edges only.
pub fn grad_lr_norm(mesh: &Mesh, v: &[f64], r: f64) -> Result<f64> {
    if v.len() != mesh.num_cells() {
        return Err(Error::Data(format!(
            "field has {} entries for a mesh of {} cells",
            v.len(),
            mesh.num_cells()
        )));
    }
    if !(r.is_finite() && r >= 1.0) {
        return Err(Error::Parameter(format!("grad norm exponent must be >= 1, got {r}")));
    }
    let mut wsum = 0.0;
    let mut acc = 0.0;
    for e in mesh.edges() {
        let w = e.area * e.dist;
        let g = ((v[e.right] - v[e.left]) / e.dist).abs();
        wsum += w;
        acc += w * g.powf(r);
    }
    if wsum == 0.0 {
        return Ok(0.0);
    }
    Ok((mesh.total_volume() * acc / wsum).powf(1.0 / r))
}
