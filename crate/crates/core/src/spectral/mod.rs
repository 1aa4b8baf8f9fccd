//! Dense eigendecomposition of the boundary operators, twin pairing,
//! biorthogonal normalization and the energy structures of the modes.

mod eigen;
mod energy;
mod twins;

pub use eigen::{
    biorthogonalize, eigenpairs, Mode, PlasmonSpectrum, SpuriousEigenvalue, DEFAULT_REALNESS_TOL,
    DEGENERACY_TOL, MU_FLOOR,
};
pub use energy::{
    energy_inner_product, mode_dipole, strong_orthogonality_residual, LogPotential,
    OrthogonalityResidual, ZERO_MEAN_TOL,
};
pub use twins::{pair_twins, TwinPair, TwinPairs};

pub(crate) use eigen::weighted_dot;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("degenerate block at lambda = {lambda} has a singular Gram matrix")]
    SingularGram { lambda: f64 },
    #[error("operation is defined for 2D spectra only")]
    Not2D,
    #[error("density has nonzero mean (relative {0:e})")]
    NonZeroMean(f64),
    #[error("density length does not match the node count")]
    LengthMismatch,
    #[error("mode index {0} out of range")]
    ModeOutOfRange(usize),
}
