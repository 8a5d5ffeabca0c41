//! Run diagnostics: energy functionals, norms, and exponent formulas.

mod energy;
mod exponents;

pub use energy::{
    dissipation, free_energy, lq_norm, relative_density, relative_free_energy,
    verify_quadratic_bound, EnergyBreakdown, QuadraticBoundReport,
};
pub use exponents::{
    alikakos_gamma_closed_form, alikakos_sequence, alpha_star, dual_exponent, exponent_report,
    gradient_exponent, gradient_exponent_rational, moser_fixed_point, moser_gamma_closed_form,
    moser_sequence, theta, theta_rational, theta_tilde, ExponentReport, Rational,
};
