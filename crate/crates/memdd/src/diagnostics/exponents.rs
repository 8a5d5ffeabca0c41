//! Exponent formulas behind the integrability and iteration estimates.
//!
//! All take the diffusion exponent `alpha in (1, 3)`; formulas that only make
//! sense below 3/2 say so. Exact-rational twins of the boundary-sensitive
//! formulas allow equality checks where floating point cannot represent the
//! inputs.

use crate::error::{Error, Result};

/// Exact-rational exponent arithmetic.
pub type Rational = num_rational::Ratio<i64>;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 1.0 && alpha < 3.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (1, 3), got {alpha}"
        )));
    }
    Ok(())
}

fn check_alpha_rational(alpha: Rational) -> Result<()> {
    let one = Rational::from_integer(1);
    let three = Rational::from_integer(3);
    if alpha <= one || alpha >= three {
        return Err(Error::Domain(format!(
            "alpha must lie in (1, 3), got {alpha}"
        )));
    }
    Ok(())
}

/// Space-time integrability exponent `(2a-1)(3-a) / (5a-3)` of the densities.
pub fn theta(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((2.0 * alpha - 1.0) * (3.0 - alpha) / (5.0 * alpha - 3.0))
}

/// Exact-rational twin of [`theta`].
pub fn theta_rational(alpha: Rational) -> Result<Rational> {
    check_alpha_rational(alpha)?;
    let r = |n: i64| Rational::from_integer(n);
    Ok((r(2) * alpha - r(1)) * (r(3) - alpha) / (r(5) * alpha - r(3)))
}

/// Companion integrability exponent `(2a-1)(3-2a) / (5a-3)`, defined only
/// below `3/2`.
pub fn theta_tilde(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha >= 1.5 {
        return Err(Error::Domain(format!(
            "companion exponent needs alpha < 3/2, got {alpha}"
        )));
    }
    Ok((2.0 * alpha - 1.0) * (3.0 - 2.0 * alpha) / (5.0 * alpha - 3.0))
}

/// Gradient integrability exponent `(9-5a) / (5a-3)`; below one exactly when
/// `a > 6/5`.
pub fn gradient_exponent(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((9.0 - 5.0 * alpha) / (5.0 * alpha - 3.0))
}

/// Exact-rational twin of [`gradient_exponent`] for boundary cases like
/// `a = 6/5`, where the value is exactly one.
pub fn gradient_exponent_rational(alpha: Rational) -> Result<Rational> {
    check_alpha_rational(alpha)?;
    let r = |n: i64| Rational::from_integer(n);
    Ok((r(9) - r(5) * alpha) / (r(5) * alpha - r(3)))
}

/// Duality exponent `2a / (a+1)` of the test-function pairing.
pub fn dual_exponent(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(2.0 * alpha / (alpha + 1.0))
}

/// Larger root `(11 + sqrt(37)) / 14` of `7a^2 - 11a + 3`, the threshold
/// where the iteration fixed point crosses one half.
pub fn alpha_star() -> f64 {
    (11.0 + 37.0f64.sqrt()) / 14.0
}

fn check_iteration_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 1.0 && alpha < 1.5) {
        return Err(Error::Domain(format!(
            "iteration exponents need alpha in (1, 3/2), got {alpha}"
        )));
    }
    Ok(())
}

/// Fixed point `(21a^2 - 35a + 12) / (6 - 4a)` of the bootstrapped
/// integrability recursion (`alpha < 3/2`).
pub fn moser_fixed_point(alpha: f64) -> Result<f64> {
    check_iteration_alpha(alpha)?;
    Ok((21.0 * alpha * alpha - 35.0 * alpha + 12.0) / (6.0 - 4.0 * alpha))
}

/// Bootstrapped integrability exponents: `g_0 = a - 1`,
/// `g_{m+1} = (21a^2 - 35a + 12) / (9 - 6a) + g_m / 3`. Returns
/// `g_0 ..= g_steps`.
pub fn moser_sequence(alpha: f64, steps: usize) -> Result<Vec<f64>> {
    check_iteration_alpha(alpha)?;
    let c = (21.0 * alpha * alpha - 35.0 * alpha + 12.0) / (9.0 - 6.0 * alpha);
    let mut out = Vec::with_capacity(steps + 1);
    let mut g = alpha - 1.0;
    out.push(g);
    for _ in 0..steps {
        g = c + g / 3.0;
        out.push(g);
    }
    Ok(out)
}

/// Closed form of the bootstrapped recursion:
/// `g_m = G(a) (1 - 3^-m) + (a-1) 3^-m` with `G` the fixed point.
pub fn moser_gamma_closed_form(alpha: f64, m: usize) -> Result<f64> {
    let g = moser_fixed_point(alpha)?;
    let decay = 3.0f64.powi(-(m.min(i32::MAX as usize) as i32));
    Ok(g * (1.0 - decay) + (alpha - 1.0) * decay)
}

fn check_doubling(alpha: f64, gamma0: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::Domain(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(gamma0.is_finite() && gamma0 > 0.0) {
        return Err(Error::Domain(format!(
            "starting exponent must be positive, got {gamma0}"
        )));
    }
    Ok(())
}

/// Doubling iteration for the vacancy bound: `g_k = 2 g_{k-1} + 1 - a`.
/// Returns `g_0 ..= g_steps`.
pub fn alikakos_sequence(alpha: f64, gamma0: f64, steps: usize) -> Result<Vec<f64>> {
    check_doubling(alpha, gamma0)?;
    let mut out = Vec::with_capacity(steps + 1);
    let mut g = gamma0;
    out.push(g);
    for _ in 0..steps {
        g = 2.0 * g + 1.0 - alpha;
        out.push(g);
    }
    Ok(out)
}

/// Closed form of the doubling iteration:
/// `g_k = 2^k (g_0 + 1 - a) + a - 1`.
pub fn alikakos_gamma_closed_form(alpha: f64, gamma0: f64, k: usize) -> Result<f64> {
    check_doubling(alpha, gamma0)?;
    Ok(2.0f64.powi(k.min(i32::MAX as usize) as i32) * (gamma0 + 1.0 - alpha) + alpha - 1.0)
}

/// The exponent family evaluated at one `alpha`, for reporting.
#[derive(Debug, Clone, Copy)]
pub struct ExponentReport {
    pub alpha: f64,
    pub theta: f64,
    /// Present only below `3/2`.
    pub theta_tilde: Option<f64>,
    pub gradient_exponent: f64,
    pub dual_exponent: f64,
    /// Present only below `3/2`.
    pub moser_fixed_point: Option<f64>,
}

pub fn exponent_report(alpha: f64) -> Result<ExponentReport> {
    check_alpha(alpha)?;
    Ok(ExponentReport {
        alpha,
        theta: theta(alpha)?,
        theta_tilde: if alpha < 1.5 { Some(theta_tilde(alpha)?) } else { None },
        gradient_exponent: gradient_exponent(alpha)?,
        dual_exponent: dual_exponent(alpha)?,
        moser_fixed_point: if alpha < 1.5 {
            Some(moser_fixed_point(alpha)?)
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrability_exponents() {
        assert!((theta(5.0 / 3.0).unwrap() - 7.0 / 12.0).abs() < 1e-15);
        assert_eq!(
            theta_rational(Rational::new(5, 3)).unwrap(),
            Rational::new(7, 12)
        );
        assert!((theta_tilde(1.2).unwrap() - 0.28).abs() < 1e-15);
        assert!(theta_tilde(1.6).is_err());
        assert!(theta(3.0).is_err());
        assert!(theta(1.0).is_err());
        assert!(theta_rational(Rational::from_integer(3)).is_err());
    }

    #[test]
    fn gradient_exponent_boundary_case_is_exact() {
        assert!((gradient_exponent(5.0 / 3.0).unwrap() - 0.125).abs() < 1e-15);
        let at_boundary = gradient_exponent_rational(Rational::new(6, 5)).unwrap();
        assert_eq!(at_boundary, Rational::from_integer(1));
        assert!(gradient_exponent(1.1).unwrap() > 1.0);
        assert!(gradient_exponent(1.3).unwrap() < 1.0);
        assert!(gradient_exponent(1.25).unwrap() > gradient_exponent(1.35).unwrap());
    }

    #[test]
    fn dual_exponent_value() {
        assert!((dual_exponent(5.0 / 3.0).unwrap() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn threshold_root_and_half_fixed_point() {
        let a = alpha_star();
        assert!((7.0 * a * a - 11.0 * a + 3.0).abs() < 1e-14);
        assert!((moser_fixed_point(a).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bootstrapped_recursion_matches_closed_form() {
        let alpha = 1.3;
        let seq = moser_sequence(alpha, 60).unwrap();
        assert!((seq[1] - 1.7583333333333333).abs() < 1e-12);
        let fp = moser_fixed_point(alpha).unwrap();
        assert!((fp - 2.4875).abs() < 1e-13);
        for (m, g) in seq.iter().enumerate() {
            let closed = moser_gamma_closed_form(alpha, m).unwrap();
            assert!(
                (g - closed).abs() <= 1e-13 * closed.abs().max(1.0),
                "m = {m}: {g} vs {closed}"
            );
        }
        assert!((seq[60] - fp).abs() < 1e-13);
        assert!(moser_sequence(1.6, 3).is_err());
    }

    #[test]
    fn doubling_recursion_matches_closed_form() {
        let (alpha, gamma0) = (1.5, 2.0);
        let seq = alikakos_sequence(alpha, gamma0, 40).unwrap();
        assert_eq!(seq[3], 12.5);
        for (k, g) in seq.iter().enumerate() {
            let closed = alikakos_gamma_closed_form(alpha, gamma0, k).unwrap();
            assert!(
                (g - closed).abs() <= 1e-13 * closed.abs().max(1.0),
                "k = {k}: {g} vs {closed}"
            );
        }
        // growth ratio approaches 2 / (2 (gamma0 + 1 - alpha)) from below
        let bound = 1.0 / (gamma0 + 1.0 - alpha);
        for (k, g) in seq.iter().enumerate().skip(1) {
            let ratio = 2.0f64.powi(k as i32) / g;
            assert!(ratio <= bound + 1e-15, "k = {k}: {ratio} vs {bound}");
        }
        let late = 2.0f64.powi(30) / seq[30];
        assert!((late - bound).abs() < 1e-6);
    }

    #[test]
    fn report_gates_fields_by_validity() {
        let low = exponent_report(1.3).unwrap();
        assert!(low.theta_tilde.is_some() && low.moser_fixed_point.is_some());
        let high = exponent_report(5.0 / 3.0).unwrap();
        assert!(high.theta_tilde.is_none() && high.moser_fixed_point.is_none());
        assert!(exponent_report(0.9).is_err());
    }
}
