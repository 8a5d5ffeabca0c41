//! Uniform tensor-product finite-volume meshes on an interval or a rectangle.
//!
//! Cells are axis-aligned boxes addressed row-major (`index = iy*nx + ix`).
//! Interior faces connect axis neighbours; boundary faces sit on one of the
//! named side segments and carry the half-cell distance used to impose
//! Dirichlet values at face centers.

use crate::error::{Error, Result};

/// A control volume.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    /// Cell-center coordinates (`center[1]` is 0 in 1D).
    pub center: [f64; 2],
    /// Cell measure: length in 1D, area in 2D.
    pub volume: f64,
}

/// An interior face between two adjacent cells.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    /// Cell on the lower-coordinate side.
    pub left: usize,
    /// Cell on the higher-coordinate side.
    pub right: usize,
    /// Face measure: 1 in 1D, side length in 2D.
    pub area: f64,
    /// Distance between the two cell centers.
    pub dist: f64,
}

/// A face of a cell lying on the domain boundary.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryFace {
    /// The adjacent cell.
    pub cell: usize,
    /// Face measure.
    pub area: f64,
    /// Distance from the cell center to the face center (half a cell).
    pub dist: f64,
    /// Index into [`Mesh::segments`].
    pub segment: usize,
    /// Position of this face within its segment, in mesh order.
    pub ordinal: usize,
    /// Face-center coordinates.
    pub center: [f64; 2],
}

/// Uniform finite-volume mesh of an interval `(0, lx)` or a rectangle
/// `(0, lx) x (0, ly)`.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    lx: f64,
    ly: f64,
    cells: Vec<Cell>,
    edges: Vec<Edge>,
    boundary_faces: Vec<BoundaryFace>,
    segments: Vec<&'static str>,
}

impl Mesh {
    /// Uniform mesh of the interval `(0, length)` with `n` cells.
    pub fn line(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Parameter(format!(
                "mesh length must be positive and finite, got {length}"
            )));
        }
        if n == 0 {
            return Err(Error::Parameter("mesh needs at least one cell".into()));
        }
        let h = length / n as f64;
        let cells = (0..n)
            .map(|i| Cell {
                center: [(i as f64 + 0.5) * h, 0.0],
                volume: h,
            })
            .collect();
        let edges = (0..n.saturating_sub(1))
            .map(|i| Edge {
                left: i,
                right: i + 1,
                area: 1.0,
                dist: h,
            })
            .collect();
        let boundary_faces = vec![
            BoundaryFace {
                cell: 0,
                area: 1.0,
                dist: 0.5 * h,
                segment: 0,
                ordinal: 0,
                center: [0.0, 0.0],
            },
            BoundaryFace {
                cell: n - 1,
                area: 1.0,
                dist: 0.5 * h,
                segment: 1,
                ordinal: 0,
                center: [length, 0.0],
            },
        ];
        Ok(Mesh {
            dim: 1,
            nx: n,
            ny: 1,
            hx: h,
            hy: 1.0,
            lx: length,
            ly: 1.0,
            cells,
            edges,
            boundary_faces,
            segments: vec!["left", "right"],
        })
    }

    /// Uniform mesh of the rectangle `(0, lx) x (0, ly)` with `nx` by `ny`
    /// cells.
    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Parameter(format!(
                    "mesh {name} must be positive and finite, got {l}"
                )));
            }
        }
        if nx == 0 || ny == 0 {
            return Err(Error::Parameter("mesh needs at least one cell per axis".into()));
        }
        let hx = lx / nx as f64;
        let hy = ly / ny as f64;
        let idx = |ix: usize, iy: usize| iy * nx + ix;
        let mut cells = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                cells.push(Cell {
                    center: [(ix as f64 + 0.5) * hx, (iy as f64 + 0.5) * hy],
                    volume: hx * hy,
                });
            }
        }
        let mut edges = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx - 1 {
                edges.push(Edge {
                    left: idx(ix, iy),
                    right: idx(ix + 1, iy),
                    area: hy,
                    dist: hx,
                });
            }
        }
        for iy in 0..ny - 1 {
            for ix in 0..nx {
                edges.push(Edge {
                    left: idx(ix, iy),
                    right: idx(ix, iy + 1),
                    area: hx,
                    dist: hy,
                });
            }
        }
        let mut boundary_faces = Vec::new();
        for iy in 0..ny {
            boundary_faces.push(BoundaryFace {
                cell: idx(0, iy),
                area: hy,
                dist: 0.5 * hx,
                segment: 0,
                ordinal: iy,
                center: [0.0, (iy as f64 + 0.5) * hy],
            });
        }
        for iy in 0..ny {
            boundary_faces.push(BoundaryFace {
                cell: idx(nx - 1, iy),
                area: hy,
                dist: 0.5 * hx,
                segment: 1,
                ordinal: iy,
                center: [lx, (iy as f64 + 0.5) * hy],
            });
        }
        for ix in 0..nx {
            boundary_faces.push(BoundaryFace {
                cell: idx(ix, 0),
                area: hx,
                dist: 0.5 * hy,
                segment: 2,
                ordinal: ix,
                center: [(ix as f64 + 0.5) * hx, 0.0],
            });
        }
        for ix in 0..nx {
            boundary_faces.push(BoundaryFace {
                cell: idx(ix, ny - 1),
                area: hx,
                dist: 0.5 * hy,
                segment: 3,
                ordinal: ix,
                center: [(ix as f64 + 0.5) * hx, ly],
            });
        }
        Ok(Mesh {
            dim: 2,
            nx,
            ny,
            hx,
            hy,
            lx,
            ly,
            cells,
            edges,
            boundary_faces,
            segments: vec!["left", "right", "bottom", "top"],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    /// Names of the side segments: `left`, `right` (1D) plus `bottom`, `top`
    /// (2D).
    pub fn segments(&self) -> &[&'static str] {
        &self.segments
    }

    pub fn segment_index(&self, name: &str) -> Result<usize> {
        self.segments
            .iter()
            .position(|s| *s == name)
            .ok_or_else(|| Error::Config(format!("unknown boundary segment '{name}'")))
    }

    /// Largest cell-index offset between edge neighbours (1 in 1D, `nx` in
    /// 2D); determines the bandwidth of assembled systems.
    pub fn max_neighbor_stride(&self) -> usize {
        if self.dim == 1 {
            1
        } else {
            self.nx
        }
    }

    pub fn total_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).sum()
    }

    pub fn cell_counts(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn spacings(&self) -> (f64, f64) {
        (self.hx, self.hy)
    }

    pub fn lengths(&self) -> (f64, f64) {
        (self.lx, self.ly)
    }

    /// Samples `f` at cell centers (midpoint rule).
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.cells.iter().map(|c| f(c.center[0], c.center[1])).collect()
    }
}
