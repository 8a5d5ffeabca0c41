//! Banded LU factorization with partial pivoting.
//!
//! The coupled transport Jacobian and the Poisson operator are banded on
//! tensor meshes (half-bandwidth a small multiple of the row stride), so a
//! direct band solver covers every linear solve in this crate
//! deterministically. Storage is column-panel layout with `bl` extra upper
//! rows for pivoting fill, entry `(r, c)` at `data[c*ldab + bl + bu + r - c]`.

use crate::error::{Error, Result};

/// Band matrix with `bl` subdiagonals and `bu` superdiagonals.
#[derive(Debug, Clone)]
pub struct Banded {
    n: usize,
    bl: usize,
    bu: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl Banded {
    pub fn new(n: usize, bl: usize, bu: usize) -> Self {
        let ldab = 2 * bl + bu + 1;
        Banded {
            n,
            bl,
            bu,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.bl, self.bu)
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.n && c < self.n);
        debug_assert!(r + self.bu + self.bl >= c && r <= c + self.bl, "entry ({r},{c}) outside band");
        c * self.ldab + self.bl + self.bu + r - c
    }

    /// Entry within the assembly band `(-bu..=bl)`; zero outside.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        if r + self.bu >= c && r <= c + self.bl {
            self.data[self.idx(r, c)]
        } else {
            0.0
        }
    }

    /// Adds `v` to entry `(r, c)`; the entry must lie within the assembly
    /// band `r - c` in `[-bu, bl]`.
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        assert!(
            r + self.bu >= c && r <= c + self.bl,
            "entry ({r},{c}) outside band (bl={}, bu={})",
            self.bl,
            self.bu
        );
        let i = self.idx(r, c);
        self.data[i] += v;
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        assert!(r + self.bu >= c && r <= c + self.bl, "entry ({r},{c}) outside band");
        let i = self.idx(r, c);
        self.data[i] = v;
    }

    /// Clears a whole row inside the assembly band.
    pub fn zero_row(&mut self, r: usize) {
        let lo = r.saturating_sub(self.bl);
        let hi = (r + self.bu).min(self.n - 1);
        for c in lo..=hi {
            let i = self.idx(r, c);
            self.data[i] = 0.0;
        }
    }

    /// Max-norm of the matrix (largest absolute row sum), the natural scale
    /// for relative-residual checks.
    pub fn inf_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for r in 0..self.n {
            let lo = r.saturating_sub(self.bl);
            let hi = (r + self.bu).min(self.n - 1);
            let row: f64 = (lo..=hi).map(|c| self.data[self.idx(r, c)].abs()).sum();
            best = best.max(row);
        }
        best
    }

    /// `y = A x` over the assembly band.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for c in 0..self.n {
            let rlo = c.saturating_sub(self.bu);
            let rhi = (c + self.bl).min(self.n - 1);
            let xc = x[c];
            for r in rlo..=rhi {
                y[r] += self.data[self.idx(r, c)] * xc;
            }
        }
        y
    }

    /// LU factorization with partial pivoting (row interchanges stay within
    /// the band; the upper bandwidth widens to `bl + bu`).
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let (bl, bu, ldab) = (self.bl, self.bu, self.ldab);
        let mut ipiv = vec![0usize; n];
        let at = |c: usize, r: usize| c * ldab + bl + bu + r - c;
        for k in 0..n {
            let rmax = (k + bl).min(n - 1);
            let mut piv_row = k;
            let mut piv_abs = self.data[at(k, k)].abs();
            for r in k + 1..=rmax {
                let a = self.data[at(k, r)].abs();
                if a > piv_abs {
                    piv_abs = a;
                    piv_row = r;
                }
            }
            if piv_abs == 0.0 {
                return Err(Error::Numerical(format!(
                    "banded factorization hit a zero pivot at column {k}"
                )));
            }
            ipiv[k] = piv_row;
            let cmax = (k + bl + bu).min(n - 1);
            if piv_row != k {
                for c in k..=cmax {
                    self.data.swap(at(c, k), at(c, piv_row));
                }
            }
            let pivot = self.data[at(k, k)];
            for r in k + 1..=rmax {
                let m = self.data[at(k, r)] / pivot;
                self.data[at(k, r)] = m;
                if m != 0.0 {
                    for c in k + 1..=cmax {
                        let akc = self.data[at(c, k)];
                        if akc != 0.0 {
                            self.data[at(c, r)] -= m * akc;
                        }
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            bl,
            bu,
            ldab,
            data: self.data,
            ipiv,
        })
    }
}

/// Factored form produced by [`Banded::factor`].
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    bl: usize,
    bu: usize,
    ldab: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let (bl, bu, ldab) = (self.bl, self.bu, self.ldab);
        let at = |c: usize, r: usize| c * ldab + bl + bu + r - c;
        for k in 0..n {
            b.swap(k, self.ipiv[k]);
            let rmax = (k + bl).min(n - 1);
            let bk = b[k];
            if bk != 0.0 {
                for r in k + 1..=rmax {
                    b[r] -= self.data[at(k, r)] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let cmax = (k + bl + bu).min(n - 1);
            let mut s = b[k];
            for c in k + 1..=cmax {
                s -= self.data[at(c, k)] * b[c];
            }
            b[k] = s / self.data[at(k, k)];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
