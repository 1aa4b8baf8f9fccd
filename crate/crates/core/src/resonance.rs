//! Resonance permittivities, dispersion models and the quasi-static
//! excitation formulas for individual plasmon modes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{weighted_dot, PlasmonSpectrum};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant, eV s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("lambda = 1 is the equilibrium-charge mode and has no resonance")]
    RobinMode,
    #[error("permittivity {eps} is not attained on the branch ({lo}, {hi})")]
    Unattainable { eps: f64, lo: f64, hi: f64 },
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("frequency {0} lies outside the tabulated range")]
    OutsideTable(f64),
    #[error("imaginary permittivity vanishes at the resonance; the lossless response is singular")]
    Lossless,
    #[error("invalid dispersion model: {0}")]
    InvalidModel(String),
    #[error("density history does not match the mode node count")]
    Mismatch,
}

/// One row of a tabulated permittivity: frequency, real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub omega: f64,
    pub eps_re: f64,
    pub eps_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DispersionModel {
    /// `eps(w) = eps0 (1 - wp^2 / (w (w + i gamma)))`; `gamma = 0` is lossless.
    Drude {
        eps0: f64,
        omega_p: f64,
        gamma: f64,
    },
    /// Linear interpolation in a table sorted by frequency, with `eps_re`
    /// strictly increasing.
    Tabulated { eps0: f64, rows: Vec<TableRow> },
}

impl DispersionModel {
    pub fn drude(omega_p: f64, gamma: f64) -> Result<Self, ResonanceError> {
        let m = DispersionModel::Drude {
            eps0: 1.0,
            omega_p,
            gamma,
        };
        m.validate()?;
        Ok(m)
    }

    /// Free-electron silver, `hbar wp = 9.01 eV`, `hbar gamma = 0.018 eV`,
    /// in rad/s.
    pub fn silver() -> Self {
        DispersionModel::Drude {
            eps0: 1.0,
            omega_p: 9.01 / HBAR_EV_S,
            gamma: 0.018 / HBAR_EV_S,
        }
    }

    pub fn tabulated(eps0: f64, rows: Vec<TableRow>) -> Result<Self, ResonanceError> {
        let m = DispersionModel::Tabulated { eps0, rows };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ResonanceError> {
        match self {
            DispersionModel::Drude {
                eps0,
                omega_p,
                gamma,
            } => {
                if !(*eps0 > 0.0 && *omega_p > 0.0 && *gamma >= 0.0)
                    || !(eps0.is_finite() && omega_p.is_finite() && gamma.is_finite())
                {
                    return Err(ResonanceError::InvalidModel(
                        "need eps0 > 0, omega_p > 0, gamma >= 0".into(),
                    ));
                }
            }
            DispersionModel::Tabulated { eps0, rows } => {
                if !(*eps0 > 0.0) || rows.len() < 2 {
                    return Err(ResonanceError::InvalidModel(
                        "table needs eps0 > 0 and at least two rows".into(),
                    ));
                }
                for w in rows.windows(2) {
                    if !(w[1].omega > w[0].omega && w[1].eps_re > w[0].eps_re) {
                        return Err(ResonanceError::InvalidModel(
                            "table must be sorted with strictly increasing eps_re".into(),
                        ));
                    }
                }
                if rows[0].omega <= 0.0 {
                    return Err(ResonanceError::InvalidModel("frequencies must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eps0(&self) -> f64 {
        match self {
            DispersionModel::Drude { eps0, .. } | DispersionModel::Tabulated { eps0, .. } => *eps0,
        }
    }

    /// Frequency interval on which `eps_re` is monotone and the solver searches.
    pub fn branch(&self) -> (f64, f64) {
        match self {
            DispersionModel::Drude { omega_p, .. } => (0.0, *omega_p),
            DispersionModel::Tabulated { rows, .. } => (rows[0].omega, rows[rows.len() - 1].omega),
        }
    }

    /// Complex permittivity at `omega`.
    pub fn eps(&self, omega: f64) -> Result<Complex64, ResonanceError> {
        if !(omega > 0.0) {
            return Err(ResonanceError::NonPositiveFrequency(omega));
        }
        match self {
            DispersionModel::Drude {
                eps0,
                omega_p,
                gamma,
            } => {
                let d = omega * omega + gamma * gamma;
                Ok(Complex64::new(
                    eps0 * (1.0 - omega_p * omega_p / d),
                    eps0 * omega_p * omega_p * gamma / (omega * d),
                ))
            }
            DispersionModel::Tabulated { rows, .. } => {
                let (lo, hi) = self.branch();
                if omega < lo || omega > hi {
                    return Err(ResonanceError::OutsideTable(omega));
                }
                let j = rows.partition_point(|r| r.omega <= omega).clamp(1, rows.len() - 1);
                let (a, b) = (rows[j - 1], rows[j]);
                let s = (omega - a.omega) / (b.omega - a.omega);
                Ok(Complex64::new(
                    a.eps_re + s * (b.eps_re - a.eps_re),
                    a.eps_im + s * (b.eps_im - a.eps_im),
                ))
            }
        }
    }

    /// `d[omega eps'(omega)]/d omega`.
    fn d_omega_eps(&self, omega: f64) -> Result<f64, ResonanceError> {
        match self {
            DispersionModel::Drude {
                eps0,
                omega_p,
                gamma,
            } => {
                let d = omega * omega + gamma * gamma;
                let wp2 = omega_p * omega_p;
                Ok(eps0 * (1.0 - wp2 / d + 2.0 * omega * omega * wp2 / (d * d)))
            }
            DispersionModel::Tabulated { .. } => {
                let (lo, hi) = self.branch();
                let h = 1e-4 * (hi - lo);
                let (a, b) = ((omega - h).max(lo), (omega + h).min(hi));
                Ok((b * self.eps(b)?.re - a * self.eps(a)?.re) / (b - a))
            }
        }
    }
}

/// Resonance permittivity `eps_k = eps0 (1 + lambda) / (1 - lambda)`.
pub fn eps_from_lambda(lambda: f64, eps0: f64) -> Result<f64, ResonanceError> {
    if lambda == 1.0 {
        return Err(ResonanceError::RobinMode);
    }
    if lambda.is_infinite() {
        return Ok(-eps0);
    }
    Ok(eps0 * (1.0 + lambda) / (1.0 - lambda))
}

pub fn drude_eps(model: &DispersionModel, omega: f64) -> Result<Complex64, ResonanceError> {
    model.eps(omega)
}

/// Solves `eps'(omega) = eps_k` by bisection on the monotone branch.
pub fn resonance_frequency(model: &DispersionModel, eps_k: f64) -> Result<f64, ResonanceError> {
    let (mut lo, mut hi) = model.branch();
    let f = |w: f64| model.eps(w).map(|e| e.re - eps_k);
    let f_hi = f(hi)?;
    // eps' -> eps0 (1 - wp^2/gamma^2) as omega -> 0 for the Drude model.
    let eps_lo = match model {
        DispersionModel::Drude {
            eps0,
            omega_p,
            gamma,
        } => {
            if *gamma == 0.0 {
                f64::NEG_INFINITY
            } else {
                eps0 * (1.0 - omega_p * omega_p / (gamma * gamma))
            }
        }
        DispersionModel::Tabulated { .. } => model.eps(lo)?.re,
    };
    let eps_hi = f_hi + eps_k;
    if !(eps_k > eps_lo && eps_k <= eps_hi) || eps_k >= model.eps0() {
        return Err(ResonanceError::Unattainable {
            eps: eps_k,
            lo: eps_lo,
            hi: eps_hi,
        });
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if lo == 0.0 {
        // Walk down until the sign changes so the left endpoint is usable.
        lo = hi;
        while f(lo)? > 0.0 {
            hi = lo;
            lo *= 0.5;
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(if f(lo)?.abs() <= f(hi)?.abs() { lo } else { hi })
}

/// Time-averaged stored energy density in a slightly lossy dispersive
/// medium, `(1/4) d[omega eps']/d omega |E|^2`.
pub fn energy_density(model: &DispersionModel, omega: f64, field_sq: f64) -> Result<f64, ResonanceError> {
    if !(omega > 0.0) {
        return Err(ResonanceError::NonPositiveFrequency(omega));
    }
    Ok(0.25 * model.d_omega_eps(omega)? * field_sq)
}

/// The nondispersive formula `(1/4) eps' |E|^2`, which turns negative where
/// `eps' < 0`.
pub fn classical_energy_density(model: &DispersionModel, omega: f64, field_sq: f64) -> Result<f64, ResonanceError> {
    Ok(0.25 * model.eps(omega)?.re * field_sq)
}

/// Quality ratio `|eps'/eps''|`.
pub fn quality_ratio(model: &DispersionModel, omega: f64) -> Result<f64, ResonanceError> {
    let e = model.eps(omega)?;
    Ok((e.re / e.im).abs())
}

/// Free-space wavelength in nm of an angular frequency in rad/s.
pub fn wavelength_nm(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / omega * 1e9
}

/// Angular frequency in rad/s of a free-space wavelength in nm.
pub fn omega_from_wavelength_nm(nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (nm * 1e-9)
}

/// Frequency in `(lo, hi)` maximizing `|eps'/eps''|`, by golden-section
/// search after a coarse scan.
pub fn quality_argmax(model: &DispersionModel, lo: f64, hi: f64) -> Result<f64, ResonanceError> {
    let q = |w: f64| quality_ratio(model, w);
    let n = 400;
    let h = (hi - lo) / n as f64;
    let mut best = (lo + h, q(lo + h)?);
    for j in 1..n {
        let w = lo + j as f64 * h;
        let v = q(w)?;
        if v > best.1 {
            best = (w, v);
        }
    }
    let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if q(c)? > q(d)? {
            b = d;
        } else {
            a = c;
        }
        if b - a <= 1e-14 * b {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Drive and resonance data for one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeExcitation {
    pub mode: usize,
    pub dipole: Vec<f64>,
    pub field: Vec<f64>,
    pub omega0: f64,
    pub eps_k: f64,
    pub omega_k: f64,
}

impl ModeExcitation {
    /// `E0 . p_k`.
    pub fn coupling(&self) -> f64 {
        self.field.iter().zip(&self.dipole).map(|(e, p)| e * p).sum()
    }
}

/// Steady-state amplitude under resonant drive,
/// `-(E0.p)[((eps'(wk) - eps0)/eps''(wk)) cos(wk t) + sin(wk t)]`.
pub fn resonant_amplitude(exc: &ModeExcitation, model: &DispersionModel, t: f64) -> Result<f64, ResonanceError> {
    let e = model.eps(exc.omega_k)?;
    if e.im == 0.0 {
        return Err(ResonanceError::Lossless);
    }
    let r = (e.re - model.eps0()) / e.im;
    let (s, c) = (exc.omega_k * t).sin_cos();
    Ok(-exc.coupling() * (r * c + s))
}

/// Envelope `|E0.p| sqrt(((eps' - eps0)/eps'')^2 + 1)` of the resonant amplitude.
pub fn resonant_envelope(exc: &ModeExcitation, model: &DispersionModel) -> Result<f64, ResonanceError> {
    let e = model.eps(exc.omega_k)?;
    if e.im == 0.0 {
        return Err(ResonanceError::Lossless);
    }
    let r = (e.re - model.eps0()) / e.im;
    Ok(exc.coupling().abs() * (r * r + 1.0).sqrt())
}

/// Off-resonance gain
/// `C(w0) = sqrt(((eps' - eps0)^2 + eps''^2) / ((eps_k - eps')^2 + eps''^2))`.
pub fn offresonant_gain(model: &DispersionModel, omega0: f64, eps_k: f64) -> Result<f64, ResonanceError> {
    let e = model.eps(omega0)?;
    let eps0 = model.eps0();
    let den = (eps_k - e.re).powi(2) + e.im * e.im;
    if den == 0.0 {
        return Err(ResonanceError::Lossless);
    }
    Ok((((e.re - eps0).powi(2) + e.im * e.im) / den).sqrt())
}

/// Expansion coefficients `a_k(t) = sum sigma(t) tau_k w` of a surface
/// charge history on the biorthogonalized modes.
pub fn expansion_coefficients(
    history: &[Vec<f64>],
    spectrum: &PlasmonSpectrum,
) -> Result<Vec<Vec<f64>>, ResonanceError> {
    let w = spectrum.weights();
    history
        .iter()
        .map(|sigma| {
            if sigma.len() != w.len() {
                return Err(ResonanceError::Mismatch);
            }
            Ok(spectrum
                .modes
                .iter()
                .map(|m| weighted_dot(sigma, &m.tau, w))
                .collect())
        })
        .collect()
}
