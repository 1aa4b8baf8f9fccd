use std::sync::Arc;

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{Mat, Par};
use num_complex::Complex64;
use serde::Serialize;

use super::SpectralError;
use crate::operator::{DiscreteOperator, KernelKind};

/// Below this `|mu|` an eigenvalue is reported as "no finite resonance".
pub const MU_FLOOR: f64 = 1e-6;
pub const DEFAULT_REALNESS_TOL: f64 = 1e-8;
/// Relative gap under which eigenvalues are grouped into one block.
pub const DEGENERACY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct Mode {
    /// Plasmonic eigenvalue `1 / mu`.
    pub lambda: f64,
    /// Eigenvalue of the discrete matrix.
    pub mu: f64,
    /// Single-layer (charge) density at the nodes.
    pub sigma: Vec<f64>,
    /// Double-layer (dipole) density at the nodes.
    pub tau: Vec<f64>,
    /// `||A x - mu x|| / ||x||` of the right eigenvector.
    pub residual: f64,
    /// `|sum w sigma| / sum w |sigma|`.
    pub zero_mean_residual: f64,
}

/// An eigenvalue whose imaginary part exceeded the realness tolerance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpuriousEigenvalue {
    pub mu_re: f64,
    pub mu_im: f64,
}

#[derive(Debug, Clone)]
pub struct PlasmonSpectrum {
    /// Finite plasmonic modes sorted by `|lambda|` ascending.
    pub modes: Vec<Mode>,
    /// The `lambda = 1` equilibrium-charge mode of undeflated operators.
    pub robin: Option<Mode>,
    /// Count of eigenvalues with `|mu| < MU_FLOOR`.
    pub infinite_count: usize,
    pub spurious: Vec<SpuriousEigenvalue>,
    pub realness_tol: f64,
    pub biorthogonalized: bool,
    operator: Arc<DiscreteOperator>,
}

impl PlasmonSpectrum {
    pub fn operator(&self) -> &DiscreteOperator {
        &self.operator
    }

    pub fn kind(&self) -> KernelKind {
        self.operator.kind()
    }

    pub fn weights(&self) -> &[f64] {
        self.operator.weights()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.lambda).collect()
    }

    /// Indices of modes grouped into blocks whose signed `lambda` values
    /// differ by less than `DEGENERACY_TOL` relative.
    pub fn degenerate_blocks(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.modes.len()).collect();
        order.sort_by(|&a, &b| self.modes[a].lambda.total_cmp(&self.modes[b].lambda));
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for i in order {
            let l = self.modes[i].lambda;
            match blocks.last_mut() {
                Some(b) if {
                    let prev = self.modes[*b.last().unwrap()].lambda;
                    (l - prev).abs() <= DEGENERACY_TOL * l.abs().max(prev.abs())
                } =>
                {
                    b.push(i)
                }
                _ => blocks.push(vec![i]),
            }
        }
        blocks.sort_by_key(|b| b[0]);
        blocks
    }

    /// Gram matrix `G[k][i] = sum_m sigma_k tau_i w` over the first `count`
    /// modes.
    pub fn gram(&self, count: usize) -> Vec<Vec<f64>> {
        let w = self.weights();
        let modes = &self.modes[..count.min(self.modes.len())];
        modes
            .iter()
            .map(|a| modes.iter().map(|b| weighted_dot(&a.sigma, &b.tau, w)).collect())
            .collect()
    }

    pub(crate) fn with_modes(&self, modes: Vec<Mode>, robin: Option<Mode>) -> Self {
        PlasmonSpectrum {
            modes,
            robin,
            infinite_count: self.infinite_count,
            spurious: self.spurious.clone(),
            realness_tol: self.realness_tol,
            biorthogonalized: true,
            operator: Arc::clone(&self.operator),
        }
    }
}

pub(crate) fn weighted_dot(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum()
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        // Fix the sign so the largest component is positive.
        let big = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let s = big.signum() / n;
        v.iter_mut().for_each(|x| *x *= s);
    }
}

/// Real eigenvalues, right and left eigenvectors of a real square matrix.
pub(crate) struct RawEvd {
    pub values: Vec<Complex64>,
    pub right: Mat<f64>,
    pub left: Mat<f64>,
}

pub(crate) fn dense_evd(a: &Mat<f64>) -> Result<RawEvd, SpectralError> {
    let n = a.nrows();
    let mut s_re = Diag::<f64>::zeros(n);
    let mut s_im = Diag::<f64>::zeros(n);
    let mut left = Mat::<f64>::zeros(n, n);
    let mut right = Mat::<f64>::zeros(n, n);
    let par = Par::Seq;
    let mut mem = MemBuffer::new(evd::evd_scratch::<f64>(
        n,
        ComputeEigenvectors::Yes,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::evd_real(
        a.as_ref(),
        s_re.as_mut(),
        s_im.as_mut(),
        Some(left.as_mut()),
        Some(right.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|_| SpectralError::NoConvergence)?;
    let values = (0..n)
        .map(|i| Complex64::new(s_re[i], s_im[i]))
        .collect();
    Ok(RawEvd {
        values,
        right,
        left,
    })
}

/// Full dense eigendecomposition of the operator.
///
/// Right eigenvectors give the density the matrix acts on; left
/// eigenvectors divided by the weights give the dual density. For the 2D
/// operators and the 3D single-layer variant the right vectors are `sigma`;
/// for the 3D adjoint variant they are `tau`.
pub fn eigenpairs(op: &DiscreteOperator, realness_tol: f64) -> Result<PlasmonSpectrum, SpectralError> {
    let raw = dense_evd(op.matrix())?;
    let n = op.dim();
    let w = op.weights();
    let a = op.matrix();

    let mut spurious = Vec::new();
    let mut infinite_count = 0;
    let mut modes = Vec::new();
    for (j, mu) in raw.values.iter().enumerate() {
        if mu.norm() < MU_FLOOR {
            infinite_count += 1;
            continue;
        }
        if mu.im.abs() > realness_tol * mu.norm() {
            spurious.push(SpuriousEigenvalue {
                mu_re: mu.re,
                mu_im: mu.im,
            });
            continue;
        }
        // A complex pair stores (re, im) parts in adjacent columns; an
        // eigenvalue that passed the realness test but carries a tiny
        // imaginary part keeps only its real part.
        let mut right: Vec<f64> = (0..n).map(|i| raw.right[(i, j)]).collect();
        let mut left: Vec<f64> = (0..n).map(|i| raw.left[(i, j)]).collect();
        normalize(&mut right);
        normalize(&mut left);
        let mu = mu.re;
        let residual = (0..n)
            .map(|i| {
                let ax: f64 = (0..n).map(|k| a[(i, k)] * right[k]).sum();
                (ax - mu * right[i]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        let dual: Vec<f64> = left.iter().zip(w).map(|(u, w)| u / w).collect();
        let (sigma, tau) = if op.kind() == KernelKind::K3dAdjoint {
            (dual, right)
        } else {
            (right, dual)
        };
        let abs_sum: f64 = sigma.iter().zip(w).map(|(s, w)| s.abs() * w).sum();
        let zero_mean_residual = weighted_dot(&sigma, &vec![1.0; n], w).abs() / abs_sum;
        modes.push(Mode {
            lambda: 1.0 / mu,
            mu,
            sigma,
            tau,
            residual,
            zero_mean_residual,
        });
    }

    let mut robin = None;
    if matches!(op.kind(), KernelKind::K2d | KernelKind::K3dSingle | KernelKind::K3dAdjoint) {
        let idx = modes
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1.mu - 1.0).abs().total_cmp(&(y.1.mu - 1.0).abs()))
            .map(|(i, _)| i);
        if let Some(i) = idx {
            robin = Some(modes.remove(i));
        }
    }
    modes.sort_by(|x, y| {
        x.lambda
            .abs()
            .total_cmp(&y.lambda.abs())
            .then(x.lambda.total_cmp(&y.lambda))
    });
    Ok(PlasmonSpectrum {
        modes,
        robin,
        infinite_count,
        spurious,
        realness_tol,
        biorthogonalized: false,
        operator: Arc::new(op.clone()),
    })
}

/// Inverts a small dense matrix by Gauss-Jordan with partial pivoting.
fn invert(mut g: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = g.len();
    let scale = g
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| g[i][c].abs().total_cmp(&g[j][c].abs()))?;
        if g[p][c].abs() <= 1e-12 * scale {
            return None;
        }
        g.swap(c, p);
        inv.swap(c, p);
        let d = g[c][c];
        for j in 0..n {
            g[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = g[r][c];
                if f != 0.0 {
                    for j in 0..n {
                        g[r][j] -= f * g[c][j];
                        inv[r][j] -= f * inv[c][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Rescales the dual densities so that `sum sigma_k tau_i w = delta_ki`.
///
/// Within a degenerate block the duals are replaced by `T G^{-1}`, where
/// `G = S^T W T` is the block Gram matrix.
pub fn biorthogonalize(spectrum: &PlasmonSpectrum) -> Result<PlasmonSpectrum, SpectralError> {
    let w = spectrum.weights();
    let mut modes = spectrum.modes.clone();
    for idx in spectrum.degenerate_blocks() {
        let g: Vec<Vec<f64>> = idx
            .iter()
            .map(|&k| {
                idx.iter()
                    .map(|&i| weighted_dot(&spectrum.modes[k].sigma, &spectrum.modes[i].tau, w))
                    .collect()
            })
            .collect();
        let ginv = invert(g).ok_or(SpectralError::SingularGram {
            lambda: spectrum.modes[idx[0]].lambda,
        })?;
        for (col, &i) in idx.iter().enumerate() {
            let tau: Vec<f64> = (0..w.len())
                .map(|m| {
                    idx.iter()
                        .enumerate()
                        .map(|(r, &j)| spectrum.modes[j].tau[m] * ginv[r][col])
                        .sum()
                })
                .collect();
            modes[i].tau = tau;
        }
    }
    let robin = spectrum.robin.clone().map(|mut r| {
        let g = weighted_dot(&r.sigma, &r.tau, w);
        r.tau.iter_mut().for_each(|t| *t /= g);
        r
    });
    Ok(spectrum.with_modes(modes, robin))
}
