//! Iterated traces and Fredholm determinant of the deflated 2D operator.
//!
//! With `D(lambda) = det(I - lambda A) = sum_m (-1)^m d_m lambda^m / m!`, the
//! minor recurrence `B_0 = A`, `B_m = d_m A - m A B_{m-1}`,
//! `d_{m+1} = tr B_m` is carried out on `B_m` written as a polynomial in `A`,
//! which turns every trace of a product into a power trace `t_j = tr A^j`.
//! The even coefficients are reported as `b_2n = (-1)^n d_2n`, so that
//! `D(lambda) = sum_n (-1)^n b_2n lambda^2n / (2n)!` and `b_2 = q_2`.

use faer::Mat;
use rug::Float;
use serde::Serialize;
use thiserror::Error;

use crate::operator::{DiscreteOperator, KernelKind};
use crate::spectral::PlasmonSpectrum;

/// Working precision, in bits, of the coefficient recurrences.
pub const DEFAULT_BITS: u32 = 256;
/// Odd traces of a twin spectrum must vanish to this absolute tolerance.
pub const ODD_TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FredholmError {
    #[error("traces require the deflated 2D operator, got {0:?}")]
    NotDeflated(KernelKind),
    #[error("odd trace tr A^{order} = {value:e} does not vanish")]
    OddTrace { order: usize, value: f64 },
    #[error("order {requested} exceeds the {available} available traces")]
    OrderTooHigh { requested: usize, available: usize },
    #[error("lambda = {lambda} lies outside the series radius {radius}")]
    OutsideRadius { lambda: f64, radius: f64 },
    #[error("spectrum still contains the equilibrium-charge mode")]
    NotDeflatedSpectrum,
    #[error("n_max must be at least 1")]
    EmptyOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceSource {
    /// Matrix powers of the discrete operator.
    DiscreteOperator,
    /// Power sums of the eigenvalues of the discrete operator.
    Spectrum,
    /// Power sums over xi zeros.
    Zeros,
    /// Inverted from xi coefficients.
    Recurrence,
}

/// Traces `q_2, q_4, ..., q_{2 n_max}`; odd traces are zero by construction.
#[derive(Debug, Clone)]
pub struct TraceSequence {
    /// `even[n - 1] = q_2n`.
    pub even: Vec<Float>,
    /// Odd traces `t_1, t_3, ...` as measured. They vanish for an exact twin
    /// spectrum; kept so the coefficient recurrence sees the actual operator.
    pub odd_raw: Vec<Float>,
    pub source: TraceSource,
}

impl TraceSequence {
    pub fn new(even: Vec<Float>, source: TraceSource) -> Self {
        TraceSequence {
            even,
            odd_raw: Vec::new(),
            source,
        }
    }

    pub fn n_max(&self) -> usize {
        self.even.len()
    }

    pub fn prec(&self) -> u32 {
        self.even.first().map_or(DEFAULT_BITS, |x| x.prec())
    }

    /// `q_2n` for `n >= 1`.
    pub fn q(&self, n: usize) -> &Float {
        &self.even[n - 1]
    }

    pub fn q_f64(&self, n: usize) -> f64 {
        self.even[n - 1].to_f64()
    }

    /// Estimate of `|lambda_1|` from the ratio of the two highest traces.
    pub fn radius_estimate(&self) -> f64 {
        let n = self.n_max();
        if n < 2 {
            return (2.0 / self.q_f64(1)).sqrt();
        }
        (self.q_f64(n - 1) / self.q_f64(n)).sqrt()
    }

    /// Power trace `t_j = tr A^j` for `j >= 1`, odd ones taken raw when known.
    fn power_trace(&self, j: usize, prec: u32) -> Float {
        if j.is_multiple_of(2) {
            Float::with_val(prec, &self.even[j / 2 - 1])
        } else {
            match self.odd_raw.get(j / 2) {
                Some(t) => Float::with_val(prec, t),
                None => Float::new(prec),
            }
        }
    }
}

fn require_deflated(op: &DiscreteOperator) -> Result<(), FredholmError> {
    if op.kind() != KernelKind::K2dDeflated {
        return Err(FredholmError::NotDeflated(op.kind()));
    }
    Ok(())
}

fn trace(a: &Mat<f64>) -> f64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

/// `q_2n = tr A^{2n}` by repeated multiplication, `n = 1..=n_max`.
/// Odd traces are checked against `ODD_TRACE_TOL` and recorded raw.
pub fn iterated_traces(op: &DiscreteOperator, n_max: usize) -> Result<TraceSequence, FredholmError> {
    require_deflated(op)?;
    if n_max == 0 {
        return Err(FredholmError::EmptyOrder);
    }
    let a = op.matrix();
    let mut power = a.clone();
    let mut even = Vec::with_capacity(n_max);
    let mut odd_raw = Vec::with_capacity(n_max);
    for j in 1..=2 * n_max {
        if j > 1 {
            power = &power * a;
        }
        let t = trace(&power);
        if j % 2 == 1 {
            if t.abs() > ODD_TRACE_TOL {
                return Err(FredholmError::OddTrace { order: j, value: t });
            }
            odd_raw.push(Float::with_val(DEFAULT_BITS, t));
        } else {
            even.push(Float::with_val(DEFAULT_BITS, t));
        }
    }
    Ok(TraceSequence {
        even,
        odd_raw,
        source: TraceSource::DiscreteOperator,
    })
}

/// The literal kernel iteration `K_n(Q, M) = int K(Q, P) K_{n-1}(P, M) dl_P`,
/// `q_n = int K_n(Q, Q) dl_Q`, with the trapezoid rule on the nodes.
/// Only meant as a cross-check for small `n`.
pub fn kernel_iteration_trace(op: &DiscreteOperator, n: usize) -> Result<f64, FredholmError> {
    require_deflated(op)?;
    let w = op.weights();
    let a = op.matrix();
    let size = a.nrows();
    let kernel = Mat::from_fn(size, size, |q, m| a[(q, m)] / w[m]);
    let mut kn = kernel.clone();
    for _ in 1..n {
        kn = Mat::from_fn(size, size, |q, m| {
            (0..size).map(|p| kernel[(q, p)] * w[p] * kn[(p, m)]).sum()
        });
    }
    Ok((0..size).map(|q| kn[(q, q)] * w[q]).sum())
}

/// `q_2n = sum_k mu_k^{2n}` from the finite modes of a deflated spectrum,
/// evaluated at `prec` bits from the double-precision eigenvalues.
pub fn traces_from_spectrum(spectrum: &PlasmonSpectrum, n_max: usize, prec: u32) -> Result<TraceSequence, FredholmError> {
    if spectrum.robin.is_some() {
        return Err(FredholmError::NotDeflatedSpectrum);
    }
    let mus: Vec<f64> = spectrum.modes.iter().map(|m| m.mu).collect();
    Ok(traces_from_values(&mus, n_max, prec, TraceSource::Spectrum))
}

/// `sum_k x_k^j` for `j = 1..=2 n_max` at `prec` bits. The odd sums are kept
/// so that a twin spectrum paired only to rounding still defines the
/// polynomial `prod (1 - lambda x_k)` rather than a branched even surrogate.
pub fn traces_from_values(values: &[f64], n_max: usize, prec: u32, source: TraceSource) -> TraceSequence {
    let xs: Vec<Float> = values.iter().map(|&x| Float::with_val(prec, x)).collect();
    let mut pow = xs.clone();
    let mut even = Vec::with_capacity(n_max);
    let mut odd_raw = Vec::with_capacity(n_max);
    for j in 1..=2 * n_max {
        if j > 1 {
            for (p, x) in pow.iter_mut().zip(&xs) {
                *p *= x;
            }
        }
        let t = Float::with_val(prec, Float::sum(pow.iter()));
        if j % 2 == 1 {
            odd_raw.push(t);
        } else {
            even.push(t);
        }
    }
    TraceSequence {
        even,
        odd_raw,
        source,
    }
}

/// Coefficients of `D(lambda)` up to `lambda^{2 n_max}`.
#[derive(Debug, Clone)]
pub struct DeterminantCoeffs {
    /// `d_m`, `m = 0..=2 n_max`, with `D = sum (-1)^m d_m lambda^m / m!`.
    pub d: Vec<Float>,
    /// `b_2n = (-1)^n d_2n`, `n = 0..=n_max`; `b_0 = D(0) = 1`.
    pub b: Vec<Float>,
    /// `D(lambda) = sum a_m lambda^m`, i.e. `a_m = (-1)^m d_m / m!`.
    taylor: Vec<Float>,
}

impl DeterminantCoeffs {
    pub fn n_max(&self) -> usize {
        self.b.len() - 1
    }

    pub fn prec(&self) -> u32 {
        self.d[0].prec()
    }

    /// Largest `|d_m / m!|` over odd `m`.
    pub fn max_odd(&self) -> f64 {
        self.taylor
            .iter()
            .skip(1)
            .step_by(2)
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max)
    }

    fn horner(&self, lambda: &Float, deriv: bool) -> Float {
        let prec = self.prec();
        let mut acc = Float::with_val(prec, 0);
        let top = self.taylor.len() - 1;
        for m in (0..=top).rev() {
            if deriv && m == 0 {
                break;
            }
            let c = if deriv {
                Float::with_val(prec, &self.taylor[m] * m as u32)
            } else {
                self.taylor[m].clone()
            };
            acc *= lambda;
            acc += c;
        }
        acc
    }

    pub fn eval_float(&self, lambda: &Float) -> Float {
        self.horner(lambda, false)
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.eval_float(&Float::with_val(self.prec(), lambda)).to_f64()
    }

    /// `D'(lambda)`.
    pub fn eval_derivative_float(&self, lambda: &Float) -> Float {
        self.horner(lambda, true)
    }
}

/// Runs the minor recurrence in trace form through order `2 n_max`.
pub fn determinant_coeffs(traces: &TraceSequence, n_max: usize) -> Result<DeterminantCoeffs, FredholmError> {
    if n_max > traces.n_max() {
        return Err(FredholmError::OrderTooHigh {
            requested: n_max,
            available: traces.n_max(),
        });
    }
    let prec = traces.prec().max(DEFAULT_BITS);
    let order = 2 * n_max;
    let t: Vec<Float> = (0..=order)
        .map(|j| {
            if j == 0 {
                Float::new(prec)
            } else {
                traces.power_trace(j, prec)
            }
        })
        .collect();

    let mut d = vec![Float::with_val(prec, 1)];
    // beta[j] is the coefficient of A^{j+1} in B_m.
    let mut beta = vec![Float::with_val(prec, 1)];
    for m in 1..=order {
        let mut dm = Float::new(prec);
        for (j, b) in beta.iter().enumerate() {
            dm += b * &t[j + 1];
        }
        d.push(dm.clone());
        if m == order {
            break;
        }
        let mut next = Vec::with_capacity(beta.len() + 1);
        next.push(dm);
        for b in &beta {
            next.push(Float::with_val(prec, b * -(m as i32)));
        }
        beta = next;
    }

    let mut fact = Float::with_val(prec, 1);
    let mut taylor = Vec::with_capacity(order + 1);
    for (m, dm) in d.iter().enumerate() {
        if m > 0 {
            fact *= m as u32;
        }
        let mut a = Float::with_val(prec, dm / &fact);
        if m % 2 == 1 {
            a = -a;
        }
        taylor.push(a);
    }
    let b = (0..=n_max)
        .map(|n| {
            let x = d[2 * n].clone();
            if n % 2 == 1 {
                -x
            } else {
                x
            }
        })
        .collect();
    Ok(DeterminantCoeffs { d, b, taylor })
}

/// `D(lambda) = prod_k (1 - lambda mu_k)` over the finite modes of a deflated
/// spectrum; the twins make this `prod (1 - lambda/lambda_k)(1 + lambda/lambda_k)`.
pub fn determinant_product(spectrum: &PlasmonSpectrum, lambda: f64) -> Result<f64, FredholmError> {
    if spectrum.robin.is_some() {
        return Err(FredholmError::NotDeflatedSpectrum);
    }
    Ok(spectrum
        .modes
        .iter()
        .map(|m| 1.0 - lambda * m.mu)
        .product())
}

/// `det(I - lambda A)` by LU factorization.
pub fn determinant_direct(op: &DiscreteOperator, lambda: f64) -> f64 {
    let a = op.matrix();
    let n = a.nrows();
    let m = Mat::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - lambda * a[(i, j)]
    });
    m.determinant()
}

/// `| -D'(lambda)/(lambda D(lambda)) - sum_n q_2n lambda^{2n-2} |`, both sides
/// computed independently; at `lambda = 0` the left side is `-D''(0)`.
pub fn logderiv_residual(coeffs: &DeterminantCoeffs, traces: &TraceSequence, lambda: f64) -> Result<f64, FredholmError> {
    let radius = traces.radius_estimate();
    if lambda.abs() >= 0.5 * radius {
        return Err(FredholmError::OutsideRadius { lambda, radius });
    }
    let prec = coeffs.prec();
    let x = Float::with_val(prec, lambda);
    let lhs = if lambda == 0.0 {
        // -D''(0) = -2 a_2.
        Float::with_val(prec, &coeffs.taylor[2] * -2i32)
    } else {
        let dval = coeffs.eval_float(&x);
        let dp = coeffs.eval_derivative_float(&x);
        Float::with_val(prec, -(dp / (dval * &x)))
    };
    let x2 = Float::with_val(prec, x.square_ref());
    let mut pow = Float::with_val(prec, 1);
    let mut rhs = Float::new(prec);
    for n in 1..=traces.n_max() {
        rhs += Float::with_val(prec, traces.q(n) * &pow);
        pow *= &x2;
    }
    Ok(Float::with_val(prec, lhs - rhs).abs().to_f64())
}

/// Writes `n,q_2n,b_2n` rows with full-precision decimal values; row `0`
/// carries `b_0` and an empty trace.
pub fn write_csv<W: std::io::Write>(
    out: &mut W,
    traces: &TraceSequence,
    coeffs: &DeterminantCoeffs,
) -> std::io::Result<()> {
    let digits = digits_for(coeffs.prec());
    writeln!(out, "# schema_version=1")?;
    writeln!(out, "n,q_2n,b_2n")?;
    for (n, b) in coeffs.b.iter().enumerate() {
        let q = if n == 0 {
            String::new()
        } else {
            traces.q(n).to_string_radix(10, Some(digits))
        };
        writeln!(out, "{n},{q},{}", b.to_string_radix(10, Some(digits)))?;
    }
    Ok(())
}

/// Decimal digits carried by `bits` of mantissa.
pub(crate) fn digits_for(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Contour2D;
    use crate::operator::{assemble_k2d, assemble_k2d_deflated};

    fn ellipse_deflated(n: usize) -> DiscreteOperator {
        let nodes = Contour2D::ellipse(2.0, 1.0).unwrap().sample(n).unwrap();
        assemble_k2d_deflated(&nodes).unwrap()
    }

    #[test]
    fn ellipse_q2_is_quarter() {
        // Spectrum +-3^{-n}: q_2 = 2 sum 9^{-n} = 1/4.
        let t = iterated_traces(&ellipse_deflated(256), 5).unwrap();
        assert!((t.q_f64(1) - 0.25).abs() < 1e-6);
        let q4 = 2.0 / 80.0;
        assert!((t.q_f64(2) - q4).abs() < 1e-12);
        assert!(t.q_f64(2) < t.q_f64(1).powi(2));
        assert!(t.odd_raw.iter().all(|x| x.to_f64().abs() < ODD_TRACE_TOL));
    }

    #[test]
    fn circle_traces_vanish() {
        let nodes = Contour2D::circle(1.0).unwrap().sample(64).unwrap();
        let t = iterated_traces(&assemble_k2d_deflated(&nodes).unwrap(), 4).unwrap();
        for n in 1..=4 {
            assert!(t.q_f64(n).abs() < 1e-14);
        }
    }

    #[test]
    fn undeflated_operator_rejected() {
        let nodes = Contour2D::ellipse(2.0, 1.0).unwrap().sample(32).unwrap();
        let op = assemble_k2d(&nodes).unwrap();
        assert!(matches!(iterated_traces(&op, 2), Err(FredholmError::NotDeflated(_))));
    }

    #[test]
    fn kernel_iteration_agrees_with_powers() {
        let op = ellipse_deflated(64);
        let t = iterated_traces(&op, 1).unwrap();
        let q2 = kernel_iteration_trace(&op, 2).unwrap();
        assert!((q2 - t.q_f64(1)).abs() < 1e-13);
        assert!(kernel_iteration_trace(&op, 3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn recurrence_reproduces_small_determinant() {
        // Eigenvalues +-1/2 and +-1/5: D = (1 - x^2/4)(1 - x^2/25).
        let t = traces_from_values(&[0.5, -0.5, 0.2, -0.2], 4, 256, TraceSource::Spectrum);
        let c = determinant_coeffs(&t, 4).unwrap();
        for x in [0.3, 1.0, 1.9, 4.0] {
            let exact = (1.0 - x * x / 4.0) * (1.0 - x * x / 25.0);
            assert!((c.eval(x) - exact).abs() < 1e-14, "{x}");
        }
        assert_eq!(c.b[0].to_f64(), 1.0);
        assert!((c.b[1].to_f64() - t.q_f64(1)).abs() < 1e-15);
        assert!(c.max_odd() == 0.0);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = traces_from_values(&[0.5, -0.5], 2, 128, TraceSource::Spectrum);
        let c = determinant_coeffs(&t, 2).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &t, &c).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "n,q_2n,b_2n");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("1,5.000"));
    }

    #[test]
    fn order_overflow_is_an_error() {
        let t = traces_from_values(&[0.5], 3, 128, TraceSource::Spectrum);
        assert!(matches!(
            determinant_coeffs(&t, 4),
            Err(FredholmError::OrderTooHigh { .. })
        ));
    }
}
