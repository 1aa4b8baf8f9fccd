use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rug::Float;

use super::theta::XiCoeffs;
use super::xi::xi_series;
use super::{PrecisionContext, RiemannError};
use crate::fredholm::TraceSequence;

/// Scan step for sign changes; zero gaps stay well above this below 100.
const SCAN_STEP: f64 = 0.05;

/// Positive zeros of `xi` in `[lo, hi]` from sign changes of the series,
/// each refined by bisection to a bracket narrower than `10^-(digits/2)`.
pub fn xi_zeros(lo: f64, hi: f64, coeffs: &XiCoeffs, ctx: &PrecisionContext) -> Result<Vec<Float>, RiemannError> {
    let prec = ctx.bits();
    let lo = lo.max(0.0);
    let mut out = Vec::new();
    if hi <= lo {
        return Ok(out);
    }
    let tol = ctx.ten_pow_neg(ctx.digits() / 2);
    let steps = ((hi - lo) / SCAN_STEP).ceil() as usize;
    let point = |k: usize| Float::with_val(prec, lo + (hi - lo) * k as f64 / steps as f64);
    let mut a = point(0);
    let mut fa = xi_series(&a, coeffs, ctx)?;
    for k in 1..=steps {
        let b = point(k);
        let fb = xi_series(&b, coeffs, ctx)?;
        if fb.is_zero() {
            out.push(b.clone());
        } else if !fa.is_zero() && fa.is_sign_negative() != fb.is_sign_negative() {
            let (mut x0, mut x1, mut f0) = (a.clone(), b.clone(), fa.clone());
            while Float::with_val(prec, &x1 - &x0) > tol {
                let mid = Float::with_val(prec, &x0 + &x1) / 2u32;
                let fm = xi_series(&mid, coeffs, ctx)?;
                if fm.is_zero() {
                    x0 = mid.clone();
                    x1 = mid;
                    break;
                }
                if fm.is_sign_negative() == f0.is_sign_negative() {
                    x0 = mid;
                    f0 = fm;
                } else {
                    x1 = mid;
                }
            }
            out.push(Float::with_val(prec, &x0 + &x1) / 2u32);
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

/// Smooth part of the zero-counting function,
/// `N0(T) = (T / 2 pi) ln(T / 2 pi e) + 7/8 + 1/(48 pi T)`.
pub fn zero_count_smooth(t: f64) -> f64 {
    t / (2.0 * PI) * (t / (2.0 * PI * std::f64::consts::E)).ln() + 0.875 + 1.0 / (48.0 * PI * t)
}

/// `q_2n = sum_k 2 / lambda_k^{2n}` split into a partial sum over known
/// zeros and an estimated tail.
#[derive(Debug, Clone)]
pub struct ZeroTail {
    pub value: Float,
    pub partial: Float,
    pub tail: f64,
    /// Bound on the error of `tail`, from `|S_1(t)| <= 0.059 ln t + 2.067`.
    pub bound: f64,
}

/// Tail `sum_{lambda > T} 2 lambda^{-2n}` for the zeros beyond the last
/// known one, with `N(T) = count` exact at `T` itself.
fn tail_estimate(t: f64, count: usize, n: usize) -> (f64, f64) {
    let a = (2 * n - 1) as f64;
    let b = (2 * n + 1) as f64;
    let l = (t / (2.0 * PI)).ln();
    // int_T^inf 2 x^{-2n} dN0(x).
    let smooth = t.powf(-a) / PI * (l / a + 1.0 / (a * a)) - 2.0 / (48.0 * PI) * t.powf(-b) / b;
    // Integration by parts against N - N0, whose jump at T is known.
    let f = 2.0 * t.powf(-(2.0 * n as f64));
    let boundary = -f * (count as f64 - zero_count_smooth(t));
    let fp = 4.0 * n as f64 * t.powf(-(2.0 * n as f64 + 1.0));
    let s1 = 0.059 * t.ln() + 2.067;
    let fpp = 4.0 * n as f64 * (2.0 * n as f64 + 1.0);
    let bound = s1 * fp + fpp * t.powf(-b) * (0.059 * (t.ln() / b + 1.0 / (b * b)) + 2.067 / b);
    (smooth + boundary, bound)
}

/// `q_2n` from the listed zeros (the first ones, in order) plus a tail
/// estimate. Fails if the tail bound exceeds `tol`.
pub fn q_from_zeros(zeros: &[Float], n: usize, tol: f64, ctx: &PrecisionContext) -> Result<ZeroTail, RiemannError> {
    let last = zeros.last().ok_or(RiemannError::NoZeros)?;
    if n == 0 {
        return Err(RiemannError::OrderOverflow {
            requested: 0,
            available: 0,
        });
    }
    let prec = ctx.bits();
    let mut partial = Float::new(prec);
    for z in zeros {
        let p = Float::with_val(prec, z.square_ref());
        let p = Float::with_val(prec, rug::ops::Pow::pow(p, n as u32));
        partial += Float::with_val(prec, 2u32 / p);
    }
    let (tail, bound) = tail_estimate(last.to_f64(), zeros.len(), n);
    if bound > tol {
        return Err(RiemannError::TailTooLarge { bound, tol });
    }
    let value = Float::with_val(prec, &partial + tail);
    Ok(ZeroTail {
        value,
        partial,
        tail,
        bound,
    })
}

/// `xi(lambda) / xi(0) = prod_k (1 - lambda^2 / lambda_k^2)` over the given
/// zeros, with the remaining factors estimated as
/// `exp(-lambda^2 T_2 / 2 - lambda^4 T_4 / 4)` from the tails `T_2n` of `q_2n`.
pub fn xi_product(lambda: f64, zeros: &[Float], ctx: &PrecisionContext) -> Result<Float, RiemannError> {
    let last = zeros.last().ok_or(RiemannError::NoZeros)?;
    let prec = ctx.bits();
    let x2 = Float::with_val(prec, lambda * lambda);
    let mut prod = Float::with_val(prec, 1);
    for z in zeros {
        let r = Float::with_val(prec, &x2 / Float::with_val(prec, z.square_ref()));
        prod *= 1u32 - r;
    }
    let (t2, _) = tail_estimate(last.to_f64(), zeros.len(), 1);
    let (t4, _) = tail_estimate(last.to_f64(), zeros.len(), 2);
    let l2 = lambda * lambda;
    let corr = (-l2 * t2 / 2.0 - l2 * l2 * t4 / 4.0).exp();
    Ok(prod * corr)
}

/// Reads one zero per line; blank lines and `#` comments are skipped.
pub fn read_zero_table<R: BufRead>(reader: R, ctx: &PrecisionContext) -> Result<Vec<Float>, RiemannError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| RiemannError::ZeroTable {
            line: i + 1,
            text: e.to_string(),
        })?;
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let parsed = Float::parse(s).map_err(|_| RiemannError::ZeroTable {
            line: i + 1,
            text: s.to_string(),
        })?;
        out.push(Float::with_val(ctx.bits(), parsed));
    }
    Ok(out)
}

pub fn write_zeros<W: Write>(out: &mut W, zeros: &[Float], ctx: &PrecisionContext) -> std::io::Result<()> {
    writeln!(out, "# schema_version=1")?;
    writeln!(out, "k,lambda")?;
    for (k, z) in zeros.iter().enumerate() {
        writeln!(out, "{},{}", k + 1, z.to_string_radix(10, Some(ctx.digits() as usize)))?;
    }
    Ok(())
}

/// `n,c_2n,q_2n` rows at full precision; `q` is empty where not available.
pub fn write_coeff_csv<W: Write>(
    out: &mut W,
    coeffs: &XiCoeffs,
    traces: Option<&TraceSequence>,
    ctx: &PrecisionContext,
) -> std::io::Result<()> {
    let digits = Some(ctx.digits() as usize);
    writeln!(out, "# schema_version=1")?;
    writeln!(out, "n,c_2n,q_2n")?;
    for n in 0..=coeffs.n_max() {
        let q = match traces {
            Some(t) if n >= 1 && n <= t.n_max() => t.q(n).to_string_radix(10, digits),
            _ => String::new(),
        };
        writeln!(out, "{n},{},{q}", coeffs.c(n).to_string_radix(10, digits))?;
    }
    Ok(())
}
