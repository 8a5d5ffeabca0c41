//! Cross-checks the truncation-family closed forms against an independent
//! adaptive-quadrature oracle and difference quotients.

mod common;

use common::{central_diff, integrate_piecewise, linspace, straddle};
use memdd::cutoff::CutoffFamily;

fn rel_gap(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

/// Antiderivative structure: each closed form must equal the integral of its
/// stated integrand from zero, for arguments of both signs.
#[test]
fn closed_forms_match_quadrature_at_off_sweep_parameters() {
    let k = 3.0;
    let fam = CutoffFamily::new(k).unwrap();
    let breaks = [1.0 / k, k];
    for &gamma in &[1.1, 1.75, 2.5] {
        for &v in &linspace(-2.0 * k, 2.0 * k, 301) {
            let s_quad =
                gamma * integrate_piecewise(&|t| fam.truncate(t).powf(gamma - 1.0), 0.0, v, &breaks, 1e-14);
            let s = fam.s_gamma(gamma, v).unwrap();
            assert!(
                rel_gap(s, s_quad) < 1e-11,
                "s_gamma({gamma}, {v}) = {s} vs quadrature {s_quad}"
            );

            let r_quad = gamma
                * integrate_piecewise(
                    &|t| fam.s_gamma(gamma - 1.0, t).unwrap(),
                    0.0,
                    v,
                    &breaks,
                    1e-14,
                );
            let r = fam.r_gamma(gamma, v).unwrap();
            assert!(
                rel_gap(r, r_quad) < 1e-11,
                "r_gamma({gamma}, {v}) = {r} vs quadrature {r_quad}"
            );
        }
    }
    for &v in &linspace(-2.0 * k, 2.0 * k, 301) {
        let z_quad = integrate_piecewise(&|t| 1.0 / fam.truncate(t), 0.0, v, &breaks, 1e-14);
        let z = fam.s_zero(v);
        assert!(
            rel_gap(z, z_quad) < 1e-11,
            "s_zero({v}) = {z} vs quadrature {z_quad}"
        );
    }
}

/// Reported derivatives agree with symmetric difference quotients away from
/// the truncation seams.
#[test]
fn derivatives_match_difference_quotients() {
    let k = 3.0;
    let fam = CutoffFamily::new(k).unwrap();
    let h = 1e-6;
    for &gamma in &[1.1, 1.75, 2.5] {
        for &v in &linspace(-2.0 * k, 2.0 * k, 301) {
            if (v - 1.0 / k).abs() < 1e-3 || (v - k).abs() < 1e-3 {
                continue;
            }
            let ds = fam.s_gamma_deriv(gamma, v).unwrap();
            let ds_fd = central_diff(&|t| fam.s_gamma(gamma, t).unwrap(), v, h);
            assert!(rel_gap(ds, ds_fd) < 1e-7, "s' at gamma={gamma}, v={v}");

            let dr = fam.r_gamma_deriv(gamma, v).unwrap();
            let dr_fd = central_diff(&|t| fam.r_gamma(gamma, t).unwrap(), v, h);
            assert!(rel_gap(dr, dr_fd) < 1e-7, "r' at gamma={gamma}, v={v}");
        }
    }
    for &v in &linspace(-2.0 * k, 2.0 * k, 301) {
        if (v - 1.0 / k).abs() < 1e-3 || (v - k).abs() < 1e-3 {
            continue;
        }
        let dz = fam.s_zero_deriv(v);
        let dz_fd = central_diff(&|t| fam.s_zero(t), v, h);
        assert!(rel_gap(dz, dz_fd) < 1e-7, "s_zero' at v={v}");
    }
}

/// The piecewise formulas join without jumps at both seams, and the
/// truncation itself is continuous there.
#[test]
fn branch_seams_are_continuous() {
    for &k in &[2.0, 3.0, 17.0] {
        let fam = CutoffFamily::new(k).unwrap();
        for &seam in &[1.0 / k, k] {
            let (lo, hi) = straddle(seam);
            for &gamma in &[1.1, 1.75, 2.5] {
                let a = fam.s_gamma(gamma, lo).unwrap();
                let b = fam.s_gamma(gamma, hi).unwrap();
                assert!(rel_gap(a, b) < 1e-13, "s seam k={k} gamma={gamma}");
                let ra = fam.r_gamma(gamma, lo).unwrap();
                let rb = fam.r_gamma(gamma, hi).unwrap();
                assert!(rel_gap(ra, rb) < 1e-13, "r seam k={k} gamma={gamma}");
            }
            assert!(rel_gap(fam.s_zero(lo), fam.s_zero(hi)) < 1e-13);
            assert!(rel_gap(fam.truncate(lo), fam.truncate(hi)) < 1e-13);
        }
    }
}
