//! Cutoff family: the density clamp `T_k` and its entropy primitives.
//!
//! For a truncation level `k >= 2`, `truncate` clamps to `[1/k, k]`. The
//! primitives are defined by integrals of powers of the clamp and evaluated
//! here in closed form (three branches joined at `v = 1/k` and `v = k`):
//!
//! - `s_gamma(g, v) = g * Int_0^v truncate(y)^(g-1) dy`, a surrogate for
//!   `v^g`,
//! - `s_zero(v) = Int_0^v dy / truncate(y)`, a surrogate for `log v`,
//! - `r_gamma(g, v) = g * Int_0^v s_gamma(g-1, y) dy`, a surrogate for `v^g`
//!   with quadratic growth outside the clamp window.
//!
//! All three are globally defined (negative arguments fall into the lower
//! branch), which is what lets the truncated transport scheme evaluate
//! entropy variables at iterates that are not yet known to be nonnegative.

use crate::error::{Error, Result};
use crate::par;

/// Clamp window `[1/k, k]` with `k >= 2`, plus the induced primitives.
#[derive(Debug, Clone, Copy)]
pub struct CutoffFamily {
    k: f64,
    inv_k: f64,
}

impl CutoffFamily {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 2.0) {
            return Err(Error::Parameter(format!(
                "truncation level must be finite and at least 2, got {k}"
            )));
        }
        Ok(CutoffFamily { k, inv_k: 1.0 / k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `min(k, max(1/k, v))`.
    pub fn truncate(&self, v: f64) -> f64 {
        v.clamp(self.inv_k, self.k)
    }

    /// Derivative of [`CutoffFamily::truncate`]; takes the middle-branch
    /// value 1 at the clamp points.
    pub fn truncate_deriv(&self, v: f64) -> f64 {
        if (self.inv_k..=self.k).contains(&v) {
            1.0
        } else {
            0.0
        }
    }

    /// `s_gamma(g, v) = g * Int_0^v truncate(y)^(g-1) dy` for `g > 0`.
    pub fn s_gamma(&self, gamma: f64, v: f64) -> Result<f64> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Parameter(format!(
                "s_gamma exponent must be positive, got {gamma}"
            )));
        }
        Ok(self.s_unchecked(gamma, v))
    }

    pub(crate) fn s_unchecked(&self, g: f64, v: f64) -> f64 {
        let k = self.k;
        if v <= self.inv_k {
            g * k.powf(1.0 - g) * v
        } else if v <= k {
            v.powf(g) + (g - 1.0) * k.powf(-g)
        } else {
            g * k.powf(g - 1.0) * v - (g - 1.0) * (k.powf(g) - k.powf(-g))
        }
    }

    /// `d/dv s_gamma(g, v) = g * truncate(v)^(g-1)`.
    pub fn s_gamma_deriv(&self, gamma: f64, v: f64) -> Result<f64> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Parameter(format!(
                "s_gamma exponent must be positive, got {gamma}"
            )));
        }
        Ok(self.s_deriv_unchecked(gamma, v))
    }

    pub(crate) fn s_deriv_unchecked(&self, g: f64, v: f64) -> f64 {
        g * self.truncate(v).powf(g - 1.0)
    }

    /// `s_zero(v) = Int_0^v dy / truncate(y)`, growing like `log v` inside
    /// the clamp window.
    pub fn s_zero(&self, v: f64) -> f64 {
        let k = self.k;
        if v <= self.inv_k {
            k * v
        } else if v <= k {
            1.0 + (k * v).ln()
        } else {
            1.0 + 2.0 * k.ln() + (v - k) / k
        }
    }

    /// `d/dv s_zero(v) = 1 / truncate(v)`.
    pub fn s_zero_deriv(&self, v: f64) -> f64 {
        1.0 / self.truncate(v)
    }

    /// `r_gamma(g, v) = g * Int_0^v s_gamma(g-1, y) dy` for `g > 1`.
    pub fn r_gamma(&self, gamma: f64, v: f64) -> Result<f64> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::Parameter(format!(
                "r_gamma exponent must exceed 1, got {gamma}"
            )));
        }
        Ok(self.r_unchecked(gamma, v))
    }

    pub(crate) fn r_unchecked(&self, a: f64, v: f64) -> f64 {
        let k = self.k;
        if v <= self.inv_k {
            0.5 * a * (a - 1.0) * k.powf(2.0 - a) * v * v
        } else if v <= k {
            v.powf(a) + a * (a - 2.0) * k.powf(1.0 - a) * v
                - 0.5 * (a - 1.0) * (a - 2.0) * k.powf(-a)
        } else {
            0.5 * a * (a - 1.0) * k.powf(a - 2.0) * v * v
                - a * (a - 2.0) * (k.powf(a - 1.0) - k.powf(1.0 - a)) * v
                + 0.5 * (a - 1.0) * (a - 2.0) * (k.powf(a) - k.powf(-a))
        }
    }

    /// `d/dv r_gamma(g, v) = g * s_gamma(g-1, v)`.
    pub fn r_gamma_deriv(&self, gamma: f64, v: f64) -> Result<f64> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::Parameter(format!(
                "r_gamma exponent must exceed 1, got {gamma}"
            )));
        }
        Ok(gamma * self.s_unchecked(gamma - 1.0, v))
    }
}

/// Smallest constants over one sample set making the comparison inequalities
/// between `truncate`, `s_gamma`, and `r_gamma` hold. An entry is present
/// only when the supplied exponents lie in that inequality's validity range.
#[derive(Debug, Clone, Copy, Default)]
pub struct Margins {
    /// Smallest `C` with `truncate(v)^g <= s_gamma(g, v) + C` (all sampled
    /// `v`).
    pub trunc_power: Option<f64>,
    /// Smallest `C` with `s_gamma(g, v)^(b/g) <= C * (r_gamma(b, v) + 1)`
    /// (requires `b > 1`, `g >= b/2`; sampled `v >= 0`).
    pub power_ratio: Option<f64>,
    /// Smallest `C` with `v <= C * (s_gamma(b, v)^(1/b) + 1)` (requires
    /// `0 < b <= 1`; sampled `v >= 0`).
    pub linear_s: Option<f64>,
    /// Smallest `C(delta)` with `v <= delta * r_gamma(b, v) + C(delta)`
    /// (requires `b > 1`; sampled `v >= 0`).
    pub linear_r: Option<f64>,
}

/// One inequality's scan result: the constant on the given samples, the
/// constant on a 4x-refined uniform grid over the same range, and whether the
/// two agree to 1%.
#[derive(Debug, Clone, Copy)]
pub struct MarginEntry {
    pub constant: f64,
    pub refined_constant: f64,
    pub relative_change: f64,
    pub stable: bool,
}

/// Report for all four comparison inequalities.
#[derive(Debug, Clone, Copy, Default)]
pub struct InequalityReport {
    pub trunc_power: Option<MarginEntry>,
    pub power_ratio: Option<MarginEntry>,
    pub linear_s: Option<MarginEntry>,
    pub linear_r: Option<MarginEntry>,
}

fn validate_scan_params(gamma: f64, beta: f64, delta: f64, samples: &[f64]) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Parameter(format!(
            "margin scan needs gamma > 0, got {gamma}"
        )));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Parameter(format!(
            "margin scan needs beta > 0, got {beta}"
        )));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Parameter(format!(
            "margin scan needs delta > 0, got {delta}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::Data("margin scan needs a nonempty sample set".into()));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("margin scan samples must be finite".into()));
    }
    Ok(())
}

fn margins_impl(
    family: &CutoffFamily,
    gamma: f64,
    beta: f64,
    delta: f64,
    samples: &[f64],
    parallel: bool,
) -> Margins {
    let do_power_ratio = beta > 1.0 && gamma >= 0.5 * beta;
    let do_linear_s = beta <= 1.0;
    let do_linear_r = beta > 1.0;

    // Per-sample worst-case terms; folded sequentially in index order.
    let rows = par::map_range(samples.len(), parallel, |i| {
        let v = samples[i];
        let tp = family.truncate(v).powf(gamma) - family.s_unchecked(gamma, v);
        let mut pr = f64::NEG_INFINITY;
        let mut ls = f64::NEG_INFINITY;
        let mut lr = f64::NEG_INFINITY;
        if v >= 0.0 {
            if do_power_ratio {
                let s = family.s_unchecked(gamma, v);
                let r = family.r_unchecked(beta, v);
                pr = s.powf(beta / gamma) / (r + 1.0);
            }
            if do_linear_s {
                ls = v / (family.s_unchecked(beta, v).powf(1.0 / beta) + 1.0);
            }
            if do_linear_r {
                lr = v - delta * family.r_unchecked(beta, v);
            }
        }
        (tp, pr, ls, lr)
    });

    let mut out = Margins::default();
    let fold = |sel: fn(&(f64, f64, f64, f64)) -> f64| {
        rows.iter().map(sel).fold(f64::NEG_INFINITY, f64::max)
    };
    out.trunc_power = Some(fold(|r| r.0).max(0.0));
    if do_power_ratio {
        let m = fold(|r| r.1);
        out.power_ratio = m.is_finite().then(|| m.max(0.0));
    }
    if do_linear_s {
        let m = fold(|r| r.2);
        out.linear_s = m.is_finite().then(|| m.max(0.0));
    }
    if do_linear_r {
        let m = fold(|r| r.3);
        out.linear_r = m.is_finite().then(|| m.max(0.0));
    }
    out
}

/// Smallest constants over `samples` for the four comparison inequalities.
///
/// The sign-constrained inequalities (`power_ratio`, `linear_s`, `linear_r`)
/// scan only the nonnegative samples; `trunc_power` scans everything.
pub fn inequality_margins(
    family: &CutoffFamily,
    gamma: f64,
    beta: f64,
    delta: f64,
    samples: &[f64],
) -> Result<Margins> {
    validate_scan_params(gamma, beta, delta, samples)?;
    Ok(margins_impl(family, gamma, beta, delta, samples, true))
}

/// Sequential twin of [`inequality_margins`] (same results bit for bit).
#[doc(hidden)]
pub fn inequality_margins_seq(
    family: &CutoffFamily,
    gamma: f64,
    beta: f64,
    delta: f64,
    samples: &[f64],
) -> Result<Margins> {
    validate_scan_params(gamma, beta, delta, samples)?;
    Ok(margins_impl(family, gamma, beta, delta, samples, false))
}

/// Scans `samples` and a 4x-refined uniform grid over the same range, and
/// reports, per applicable inequality, the smallest constant plus a stability
/// flag (refinement moves it by less than 1%).
pub fn verify_lemma_inequalities(
    family: &CutoffFamily,
    gamma: f64,
    beta: f64,
    delta: f64,
    samples: &[f64],
) -> Result<InequalityReport> {
    validate_scan_params(gamma, beta, delta, samples)?;
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let m = 4 * samples.len();
    let refined: Vec<f64> = (0..m)
        .map(|i| lo + (hi - lo) * i as f64 / (m - 1).max(1) as f64)
        .collect();

    let base = margins_impl(family, gamma, beta, delta, samples, true);
    let fine = margins_impl(family, gamma, beta, delta, &refined, true);

    let entry = |c: Option<f64>, r: Option<f64>| -> Option<MarginEntry> {
        let (c, r) = (c?, r?);
        let denom = c.abs().max(r.abs());
        let change = if denom == 0.0 { 0.0 } else { (c - r).abs() / denom };
        Some(MarginEntry {
            constant: c,
            refined_constant: r,
            relative_change: change,
            stable: c.is_finite() && r.is_finite() && change < 0.01,
        })
    };
    Ok(InequalityReport {
        trunc_power: entry(base.trunc_power, fine.trunc_power),
        power_ratio: entry(base.power_ratio, fine.power_ratio),
        linear_s: entry(base.linear_s, fine.linear_s),
        linear_r: entry(base.linear_r, fine.linear_r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(k: f64) -> CutoffFamily {
        CutoffFamily::new(k).unwrap()
    }

    #[test]
    fn construction_requires_k_at_least_two() {
        assert!(CutoffFamily::new(2.0).is_ok());
        assert!(CutoffFamily::new(1.5).is_err());
        assert!(CutoffFamily::new(f64::NAN).is_err());
    }

    #[test]
    fn truncate_clamps() {
        let f = fam(2.0);
        assert_eq!(f.truncate(0.1), 0.5);
        assert_eq!(f.truncate(1.0), 1.0);
        assert_eq!(f.truncate(3.0), 2.0);
        assert_eq!(f.truncate(-4.0), 0.5);
        assert_eq!(f.truncate_deriv(0.5), 1.0);
        assert_eq!(f.truncate_deriv(2.0), 1.0);
        assert_eq!(f.truncate_deriv(0.49), 0.0);
        assert_eq!(f.truncate_deriv(2.01), 0.0);
    }

    #[test]
    fn s_gamma_matches_hand_values() {
        let f = fam(2.0);
        // middle branch: v^2 + (2-1)*2^-2 = 1 + 0.25
        assert!((f.s_gamma(2.0, 1.0).unwrap() - 1.25).abs() < 1e-15);
        // lower branch: 2 * 2^-1 * 0.25
        assert!((f.s_gamma(2.0, 0.25).unwrap() - 0.25).abs() < 1e-15);
        // lower branch extends linearly to negative arguments
        assert!((f.s_gamma(2.0, -1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(f.s_gamma(0.0, 1.0).is_err());
        assert!(f.s_gamma(-1.0, 1.0).is_err());
    }

    #[test]
    fn s_zero_matches_hand_values() {
        let f = fam(2.0);
        assert!((f.s_zero(1.0) - (1.0 + 2.0_f64.ln())).abs() < 1e-15);
        assert!((f.s_zero(0.5) - 1.0).abs() < 1e-15);
        assert!((f.s_zero(0.25) - 0.5).abs() < 1e-15);
        assert!((f.s_zero(4.0) - (1.0 + 2.0 * 2.0_f64.ln() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn r_gamma_matches_hand_values() {
        let f = fam(2.0);
        // gamma = 2 kills the (gamma-2) terms: r = v^2 in the middle branch
        assert!((f.r_gamma(2.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        // lower branch: 0.5*2*1*2^0*v^2 = v^2
        assert!((f.r_gamma(2.0, 0.25).unwrap() - 0.0625).abs() < 1e-15);
        assert!(f.r_gamma(1.0, 1.0).is_err());
    }

    #[test]
    fn branches_join_continuously() {
        for k in [2.0, 4.0, 16.0, 64.0] {
            let f = fam(k);
            for g in [1.25, 5.0 / 3.0, 2.0, 2.5] {
                for v in [1.0 / k, k] {
                    let eps = v * 1e-9;
                    let below = f.s_unchecked(g, v - eps);
                    let above = f.s_unchecked(g, v + eps);
                    let scale = below.abs().max(above.abs()).max(1.0);
                    assert!(
                        (below - above).abs() < 1e-7 * scale,
                        "s_gamma jump at v={v}, k={k}, g={g}"
                    );
                    let below = f.r_unchecked(g, v - eps);
                    let above = f.r_unchecked(g, v + eps);
                    let scale = below.abs().max(above.abs()).max(1.0);
                    assert!(
                        (below - above).abs() < 1e-7 * scale,
                        "r_gamma jump at v={v}, k={k}, g={g}"
                    );
                }
            }
        }
    }

    #[test]
    fn large_k_recovers_plain_powers() {
        let f = fam(1e6);
        let g = 5.0 / 3.0;
        for v in [0.3, 1.0, 2.5] {
            // middle branch: offset (g-1)k^-g is ~1e-10 at k=1e6
            let err = (f.s_gamma(g, v).unwrap() - v.powf(g)).abs();
            assert!(err < 1e-9, "offset {err}");
        }
        // s_zero(v) - (1 + ln k) converges to ln v
        for v in [0.3, 1.0, 2.5] {
            let err = (f.s_zero(v) - (1.0 + 1e6_f64.ln()) - v.ln()).abs();
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn margins_finite_on_symmetric_range() {
        let f = fam(2.0);
        let samples: Vec<f64> = (0..2001).map(|i| -10.0 + 0.01 * i as f64).collect();
        let m = inequality_margins(&f, 2.0, 2.0, 0.5, &samples).unwrap();
        assert!(m.trunc_power.unwrap().is_finite());
        assert!(m.power_ratio.unwrap().is_finite());
        assert!(m.linear_s.is_none(), "beta > 1 disables the linear_s scan");
        assert!(m.linear_r.unwrap().is_finite());

        let m1 = inequality_margins(&f, 2.0, 1.0, 0.5, &samples).unwrap();
        // degenerate check: v <= C (s_gamma(1, v) + ...) holds with C about 1
        let c = m1.linear_s.unwrap();
        assert!(c.is_finite() && c <= 1.0 + 1e-12, "got {c}");
        assert!(m1.power_ratio.is_none());
    }

    #[test]
    fn margins_match_sequential_path() {
        let f = fam(4.0);
        let samples: Vec<f64> = (0..501).map(|i| -8.0 + 0.032 * i as f64).collect();
        let a = inequality_margins(&f, 1.25, 1.25, 0.25, &samples).unwrap();
        let b = inequality_margins_seq(&f, 1.25, 1.25, 0.25, &samples).unwrap();
        assert_eq!(a.trunc_power.unwrap().to_bits(), b.trunc_power.unwrap().to_bits());
        assert_eq!(a.power_ratio.unwrap().to_bits(), b.power_ratio.unwrap().to_bits());
        assert_eq!(a.linear_r.unwrap().to_bits(), b.linear_r.unwrap().to_bits());
    }

    #[test]
    fn report_flags_stability() {
        let f = fam(2.0);
        let samples: Vec<f64> = (0..1000).map(|i| -8.0 + 16.0 * i as f64 / 999.0).collect();
        let rep = verify_lemma_inequalities(&f, 5.0 / 3.0, 5.0 / 3.0, 0.5, &samples).unwrap();
        let e = rep.trunc_power.unwrap();
        assert!(e.stable, "change {}", e.relative_change);
        let e = rep.power_ratio.unwrap();
        assert!(e.stable, "change {}", e.relative_change);
        let e = rep.linear_r.unwrap();
        assert!(e.stable, "change {}", e.relative_change);
    }

    #[test]
    fn scan_parameter_validation() {
        let f = fam(2.0);
        assert!(inequality_margins(&f, 0.0, 1.0, 0.5, &[1.0]).is_err());
        assert!(inequality_margins(&f, 1.0, -1.0, 0.5, &[1.0]).is_err());
        assert!(inequality_margins(&f, 1.0, 1.0, 0.0, &[1.0]).is_err());
        assert!(inequality_margins(&f, 1.0, 1.0, 0.5, &[]).is_err());
        assert!(inequality_margins(&f, 1.0, 1.0, 0.5, &[f64::NAN]).is_err());
    }
}
