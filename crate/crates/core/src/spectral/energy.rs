use std::f64::consts::PI;

use faer::Mat;

use super::eigen::{weighted_dot, PlasmonSpectrum};
use super::SpectralError;
use crate::geometry::NodeSet2D;
use crate::operator::Discretization;

/// Relative tolerance for the zero-mean precondition.
pub const ZERO_MEAN_TOL: f64 = 1e-8;

/// Logarithmic single-layer potential `(V s)(t_j) = int s(P) ln(1/r) dl_P`
/// on the nodes of a parametrized contour.
///
/// `ln|x(t) - x(s)|` is split into `ln(4 sin^2((t-s)/2)) / 2`, integrated by
/// the trapezoid-log weights for equispaced nodes, and a smooth remainder
/// whose diagonal limit is `ln|x'(t)|`.
#[derive(Debug, Clone)]
pub struct LogPotential {
    matrix: Mat<f64>,
    weights: Vec<f64>,
}

/// `R(t) = -(pi/n) sum_{m=1}^{n-1} cos(m t)/m - (pi/2n^2) cos(n t)`, which
/// integrates `ln(4 sin^2(t/2)) / 2` against trigonometric polynomials of
/// degree up to `n` exactly on `2n` equispaced nodes.
fn log_weight(n: usize, t: f64) -> f64 {
    let nf = n as f64;
    let s: f64 = (1..n).map(|m| (m as f64 * t).cos() / m as f64).sum();
    -PI / nf * s - 0.5 * PI / (nf * nf) * (nf * t).cos()
}

impl LogPotential {
    pub fn new(nodes: &NodeSet2D) -> Self {
        let big_n = nodes.len();
        let n = big_n / 2;
        let h = nodes.step();
        let r: Vec<f64> = (0..big_n).map(|k| log_weight(n, k as f64 * h)).collect();
        let matrix = Mat::from_fn(big_n, big_n, |j, m| {
            let speed = nodes.speeds[m];
            let k = (j + big_n - m) % big_n;
            let smooth = if j == m {
                speed.ln()
            } else {
                let p = nodes.positions[j];
                let q = nodes.positions[m];
                let dist = (p[0] - q[0]).hypot(p[1] - q[1]);
                let half = 0.5 * (nodes.params[j] - nodes.params[m]);
                dist.ln() - 0.5 * (4.0 * half.sin().powi(2)).ln()
            };
            -(r[k] + h * smooth) * speed
        });
        LogPotential {
            matrix,
            weights: nodes.weights.clone(),
        }
    }

    pub fn apply(&self, s: &[f64]) -> Vec<f64> {
        let a = &self.matrix;
        (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * s[j]).sum())
            .collect()
    }

    /// `sum_j w_j nu_j (V sigma)_j`.
    pub fn energy(&self, nu: &[f64], sigma: &[f64]) -> f64 {
        weighted_dot(nu, &self.apply(sigma), &self.weights)
    }
}

fn check_zero_mean(s: &[f64], w: &[f64]) -> Result<(), SpectralError> {
    let mean: f64 = s.iter().zip(w).map(|(s, w)| s * w).sum();
    let abs: f64 = s.iter().zip(w).map(|(s, w)| s.abs() * w).sum();
    if mean.abs() > ZERO_MEAN_TOL * abs {
        return Err(SpectralError::NonZeroMean(mean.abs() / abs));
    }
    Ok(())
}

/// Energy inner product `<nu, sigma> = int nu(M) int sigma(P) ln(1/r) dl_P dl_M`
/// for zero-mean densities.
pub fn energy_inner_product(nu: &[f64], sigma: &[f64], nodes: &NodeSet2D) -> Result<f64, SpectralError> {
    if nu.len() != nodes.len() || sigma.len() != nodes.len() {
        return Err(SpectralError::LengthMismatch);
    }
    check_zero_mean(nu, &nodes.weights)?;
    check_zero_mean(sigma, &nodes.weights)?;
    Ok(LogPotential::new(nodes).energy(nu, sigma))
}

/// Interior and exterior Dirichlet-form pairings of two modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityResidual {
    pub interior: f64,
    pub exterior: f64,
}

/// `int_{V-} grad phi_i . grad phi_k` and `int_{V+} grad phi_i . grad phi_k`
/// for the single-layer potentials of modes `i` and `k`, reduced to boundary
/// integrals with the jump relations
/// `d_n phi(+/-) = -/+ pi sigma - pi A sigma`.
/// For `i != k` both are divided by the geometric mean of the self-energies;
/// for `i == k` the raw (positive) self-energies are returned.
pub fn strong_orthogonality_residual(
    spectrum: &PlasmonSpectrum,
    i: usize,
    k: usize,
) -> Result<OrthogonalityResidual, SpectralError> {
    let op = spectrum.operator();
    let nodes = match op.discretization() {
        Discretization::Contour(n) => n,
        Discretization::Surface(_) => return Err(SpectralError::Not2D),
    };
    let count = spectrum.modes.len();
    if i >= count || k >= count {
        return Err(SpectralError::ModeOutOfRange(i.max(k)));
    }
    let w = &nodes.weights;
    let sig_i = &spectrum.modes[i].sigma;
    let sig_k = &spectrum.modes[k].sigma;
    check_zero_mean(sig_i, w)?;
    check_zero_mean(sig_k, w)?;
    let v = LogPotential::new(nodes);

    let pair = |a: &[f64], b: &[f64]| {
        let phi = v.apply(a);
        let ab = op.apply(b);
        let inner: Vec<f64> = b.iter().zip(&ab).map(|(s, x)| PI * s - PI * x).collect();
        let outer: Vec<f64> = b.iter().zip(&ab).map(|(s, x)| -PI * s - PI * x).collect();
        (weighted_dot(&phi, &inner, w), -weighted_dot(&phi, &outer, w))
    };
    let (int_ik, ext_ik) = pair(sig_i, sig_k);
    if i == k {
        return Ok(OrthogonalityResidual {
            interior: int_ik,
            exterior: ext_ik,
        });
    }
    let (int_ii, ext_ii) = pair(sig_i, sig_i);
    let (int_kk, ext_kk) = pair(sig_k, sig_k);
    Ok(OrthogonalityResidual {
        interior: int_ik / (int_ii * int_kk).abs().sqrt(),
        exterior: ext_ik / (ext_ii * ext_kk).abs().sqrt(),
    })
}

/// Dipole moment `sum sigma(m) x(m) w(m)` of a zero-mean density.
pub fn mode_dipole(sigma: &[f64], discretization: &Discretization) -> Result<Vec<f64>, SpectralError> {
    match discretization {
        Discretization::Contour(n) => {
            if sigma.len() != n.len() {
                return Err(SpectralError::LengthMismatch);
            }
            check_zero_mean(sigma, &n.weights)?;
            let mut p = vec![0.0; 2];
            for ((s, x), w) in sigma.iter().zip(&n.positions).zip(&n.weights) {
                p[0] += s * x[0] * w;
                p[1] += s * x[1] * w;
            }
            Ok(p)
        }
        Discretization::Surface(m) => {
            if sigma.len() != m.len() {
                return Err(SpectralError::LengthMismatch);
            }
            check_zero_mean(sigma, &m.areas)?;
            let mut p = vec![0.0; 3];
            for ((s, x), a) in sigma.iter().zip(&m.centroids).zip(&m.areas) {
                for d in 0..3 {
                    p[d] += s * x[d] * a;
                }
            }
            Ok(p)
        }
    }
}
