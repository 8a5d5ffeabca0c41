//! Shared numeric oracles for the integration tests: adaptive quadrature,
//! difference quotients, and grid utilities. Oracles are deliberately
//! independent of the library's closed forms.

#![allow(dead_code)] // each test target uses its own subset

fn simpson_rec<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of a smooth integrand.
pub fn adaptive_simpson<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Integral of `f` from `a` to `b` (either orientation), splitting at the
/// given breakpoints so each Simpson call sees a smooth piece.
pub fn integrate_piecewise<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> f64 {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts = vec![lo];
    for &x in breaks {
        if x > lo && x < hi {
            pts.push(x);
        }
    }
    pts.push(hi);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += adaptive_simpson(f, w[0], w[1], tol);
    }
    sign * total
}

/// Symmetric difference quotient.
pub fn central_diff<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Block means of a fine cell field onto a coarse mesh whose cells each
/// cover `ratio` fine cells (exact volume-weighted projection on uniform
/// one-dimensional meshes).
pub fn project_blocks(fine: &[f64], ratio: usize) -> Vec<f64> {
    assert!(ratio >= 1 && fine.len() % ratio == 0);
    fine.chunks(ratio)
        .map(|c| c.iter().sum::<f64>() / ratio as f64)
        .collect()
}

/// Neighboring floats around `x`, for probing branch seams.
pub fn straddle(x: f64) -> (f64, f64) {
    assert!(x.is_finite() && x != 0.0);
    let up = f64::from_bits(if x > 0.0 { x.to_bits() + 1 } else { x.to_bits() - 1 });
    let down = f64::from_bits(if x > 0.0 { x.to_bits() - 1 } else { x.to_bits() + 1 });
    (down, up)
}
