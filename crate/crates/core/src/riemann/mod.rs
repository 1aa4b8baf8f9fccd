//! Arbitrary-precision toolkit for the Riemann xi function on the line
//! `s = 1/2 + i lambda`: theta series, the kernel `H`, the moments `c_2n`,
//! series and direct evaluation, real zeros, the `c <-> q` recurrences and
//! Hankel-type positivity checks.

mod hankel;
mod precision;
mod theta;
mod xi;
mod zeros;

use thiserror::Error;

pub use hankel::{
    c_from_q, c_hankel_check, extended_positivity_experiment, functional_f, grommer_hankel, min_eigenvalue,
    q_from_c, r_polynomial, synthetic_off_axis_traces, EvenPolynomial, HankelCheck,
};
pub use precision::{PrecisionContext, DEFAULT_DIGITS, MIN_DIGITS};
pub use theta::{h_function, theta_psi, xi_coeff, xi_coeffs, XiCoeffs};
pub use xi::{gamma_complex, xi_direct, xi_series, xi_series_derivative, zeta_complex};
pub use zeros::{
    q_from_zeros, read_zero_table, write_coeff_csv, write_zeros, xi_product, xi_zeros, zero_count_smooth, ZeroTail,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiemannError {
    #[error("{digits} digits requested, at least {min} required")]
    PrecisionTooLow { digits: u32, min: u32 },
    #[error("argument x = {0} is below 1")]
    Domain(f64),
    #[error("quadrature for c_{order} did not converge")]
    Quadrature { order: usize },
    #[error("series needs more than the {available} available coefficients at lambda = {lambda}")]
    InsufficientOrder { lambda: f64, available: usize },
    #[error("|lambda| = {lambda} exceeds the configured maximum {max}")]
    LambdaTooLarge { lambda: f64, max: f64 },
    #[error("cancellation in q_{order}: relative error estimate {estimate:e}")]
    Cancellation { order: usize, estimate: f64 },
    #[error("c_0 must be positive")]
    NonPositiveC0,
    #[error("tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailTooLarge { bound: f64, tol: f64 },
    #[error("order {requested} exceeds the available order {available}")]
    OrderOverflow { requested: usize, available: usize },
    #[error("extended positivity needs m >= 1")]
    InvalidShift,
    #[error("no zeros supplied")]
    NoZeros,
    #[error("malformed zero table line {line}: {text}")]
    ZeroTable { line: usize, text: String },
}
