//! Boundary-integral plasmon spectra of smooth particles, Fredholm
//! determinants of the deflated two-dimensional operator, and a
//! high-precision toolkit for the coefficients, zeros and positivity
//! structure of the Riemann xi function.

pub mod geometry;
pub mod operator;
pub mod spectral;
pub mod resonance;
pub mod fredholm;
pub mod riemann;
