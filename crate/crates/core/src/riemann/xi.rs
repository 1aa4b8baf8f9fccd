use std::sync::Mutex;

use rug::float::Constant;
use rug::{Complex, Float, Rational};

use super::theta::XiCoeffs;
use super::{PrecisionContext, RiemannError};

static BERNOULLI: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// `B_0, ..., B_m` by the Akiyama-Tanigawa transform, cached across calls.
fn bernoulli(m: usize) -> Vec<Rational> {
    let mut cache = BERNOULLI.lock().unwrap_or_else(|e| e.into_inner());
    if cache.len() <= m {
        let mut a: Vec<Rational> = Vec::with_capacity(m + 1);
        let mut out = Vec::with_capacity(m + 1);
        for k in 0..=m {
            a.push(Rational::from((1, k as u32 + 1)));
            for j in (1..=k).rev() {
                let d = Rational::from(&a[j - 1] - &a[j]);
                a[j - 1] = d * j as u32;
            }
            out.push(a[0].clone());
        }
        *cache = out;
    }
    cache[..=m].to_vec()
}

fn cfloat(prec: u32, re: &Float, im: &Float) -> Complex {
    Complex::with_val(prec, (re, im))
}

fn norm(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// `ln Gamma(w)` for `|w|` large by Stirling's series, up to a multiple of
/// `2 pi i`.
fn ln_gamma_stirling(w: &Complex, prec: u32, bern: &[Rational]) -> Complex {
    let half_ln_2pi = Float::with_val(prec, Float::with_val(prec, Constant::Pi) * 2u32).ln() / 2u32;
    let lnw = Complex::with_val(prec, w.ln_ref());
    let mut s = Complex::with_val(prec, w - 0.5f64) * &lnw - w + half_ln_2pi;
    let inv = Complex::with_val(prec, w.recip_ref());
    let inv2 = Complex::with_val(prec, inv.square_ref());
    let mut pow = inv;
    let tiny = Float::with_val(prec, norm(&s)) >> prec;
    for k in 1..bern.len() / 2 {
        let b = Float::with_val(prec, &bern[2 * k]);
        let denom = (2 * k * (2 * k - 1)) as u32;
        let term = Complex::with_val(prec, &pow * (b / denom));
        let small = norm(&term) < tiny;
        s += term;
        if small {
            break;
        }
        pow *= &inv2;
    }
    s
}

/// `Gamma(z)` for complex `z` off the poles: reflection for `Re z < 1/2`,
/// then an upward shift and Stirling's series.
pub fn gamma_complex(z: &Complex, ctx: &PrecisionContext) -> Complex {
    let prec = ctx.bits();
    if *z.real() < 0.5 {
        let pi = Float::with_val(prec, Constant::Pi);
        let one_minus = Complex::with_val(prec, 1 - z);
        let g = gamma_complex(&one_minus, ctx);
        let s = Complex::with_val(prec, z * &pi).sin();
        return Complex::with_val(prec, pi / (s * g));
    }
    let radius = 0.12 * prec as f64 + 10.0;
    let re = z.real().to_f64();
    let im = z.imag().to_f64();
    let mut shift = 0u32;
    while (re + shift as f64).hypot(im) < radius {
        shift += 1;
    }
    let mut prod = Complex::with_val(prec, (1, 0));
    for j in 0..shift {
        prod *= Complex::with_val(prec, z + j);
    }
    let w = Complex::with_val(prec, z + shift);
    let terms = (std::f64::consts::PI * radius).ceil() as usize + 4;
    let bern = bernoulli(2 * terms);
    let lg = ln_gamma_stirling(&w, prec, &bern);
    Complex::with_val(prec, lg.exp() / prod)
}

/// `zeta(s)` for `Re s > 0`, `s != 1`, from the alternating eta series with
/// Borwein's Chebyshev-weighted acceleration.
pub fn zeta_complex(s: &Complex, ctx: &PrecisionContext) -> Complex {
    let prec = ctx.bits();
    let t = s.imag().to_f64().abs();
    let ln_target = prec as f64 * std::f64::consts::LN_2
        + t * std::f64::consts::FRAC_PI_2
        + (3.0 * (1.0 + 2.0 * t)).ln()
        + 10.0;
    let n = (ln_target / (3.0 + 8f64.sqrt()).ln()).ceil() as u32;

    // d_k = n sum_{i <= k} (n + i - 1)! 4^i / ((n - i)! (2i)!).
    let mut d = Vec::with_capacity(n as usize + 1);
    let mut term = Rational::from((1, n));
    let mut acc = Rational::new();
    for i in 0..=n {
        if i > 0 {
            let num = 4 * (n + i - 1) as u64 * (n - i + 1) as u64;
            let den = (2 * i - 1) as u64 * (2 * i) as u64;
            term *= Rational::from((num, den));
        }
        acc += &term;
        d.push(Float::with_val(prec, Rational::from(&acc * n)));
    }
    let dn = d[n as usize].clone();
    let mut sum = Complex::new(prec);
    for k in 0..n {
        let lnk = Float::with_val(prec, k + 1).ln();
        let mag = Float::with_val(prec, -(Float::with_val(prec, s.real() * &lnk))).exp();
        let ang = Float::with_val(prec, -(Float::with_val(prec, s.imag() * &lnk)));
        let (sin, cos) = ang.sin_cos(Float::new(prec));
        let coeff = Float::with_val(prec, &d[k as usize] - &dn) * mag;
        let mut v = cfloat(prec, &Float::with_val(prec, &coeff * &cos), &Float::with_val(prec, &coeff * &sin));
        if k % 2 == 1 {
            v = -v;
        }
        sum += v;
    }
    // 1 - 2^{1 - s}.
    let ln2 = Float::with_val(prec, Constant::Log2);
    let one_minus_s = Complex::with_val(prec, 1 - s);
    let p = Complex::with_val(prec, one_minus_s * ln2).exp();
    let factor = Complex::with_val(prec, 1 - p) * &dn;
    Complex::with_val(prec, -(sum / factor))
}

/// `xi(lambda) = s (s - 1) pi^{-s/2} Gamma(s/2) zeta(s) / 2` at
/// `s = 1/2 + i lambda`. The imaginary part of the result is the realness
/// residual.
pub fn xi_direct(lambda: &Float, ctx: &PrecisionContext) -> Result<Complex, RiemannError> {
    let l = lambda.to_f64();
    if l.abs() > ctx.max_lambda {
        return Err(RiemannError::LambdaTooLarge {
            lambda: l,
            max: ctx.max_lambda,
        });
    }
    let prec = ctx.bits();
    let s = cfloat(prec, &Float::with_val(prec, 0.5), lambda);
    let half_s = Complex::with_val(prec, &s / 2u32);
    let ln_pi = Float::with_val(prec, Constant::Pi).ln();
    let pi_pow = Complex::with_val(prec, -(Complex::with_val(prec, &half_s * ln_pi))).exp();
    let g = gamma_complex(&half_s, ctx);
    let z = zeta_complex(&s, ctx);
    let pre = Complex::with_val(prec, &s * Complex::with_val(prec, &s - 1u32)) / 2u32;
    Ok(Complex::with_val(prec, pre * pi_pow * g * z))
}

/// Sums `sum_n (-1)^n c_2n f_n(lambda)`, where `f_n` is `lambda^2n/(2n)!`
/// or its derivative, and checks the geometric tail of the last two terms.
fn series(lambda: &Float, coeffs: &XiCoeffs, ctx: &PrecisionContext, deriv: bool) -> Result<Float, RiemannError> {
    let prec = ctx.bits().max(coeffs.prec());
    let x2 = Float::with_val(prec, lambda.square_ref());
    // basis = lambda^{2n} / (2n)!  (or lambda^{2n-1} / (2n-1)! for the derivative)
    let mut basis = Float::with_val(prec, 1);
    let mut sum = Float::new(prec);
    let mut last = Float::new(prec);
    let mut prev = Float::new(prec);
    for n in 0..=coeffs.n_max() {
        if n > 0 {
            let k = 2 * n as u32;
            basis *= &x2;
            basis /= k * (k - 1);
        }
        let b = if deriv {
            if n == 0 {
                continue;
            }
            Float::with_val(prec, &basis * (2 * n as u32)) / lambda
        } else {
            basis.clone()
        };
        let mut term = Float::with_val(prec, coeffs.c(n) * &b);
        if n % 2 == 1 {
            term = -term;
        }
        prev = last;
        last = Float::with_val(prec, term.abs_ref());
        sum += term;
    }
    let tol = ctx.ten_pow_neg(ctx.digits() / 2);
    let fail = RiemannError::InsufficientOrder {
        lambda: lambda.to_f64(),
        available: coeffs.n_max(),
    };
    if last.is_zero() {
        return Ok(sum);
    }
    if last >= prev {
        return Err(fail);
    }
    let r = Float::with_val(prec, &last / &prev);
    let tail = Float::with_val(prec, &last * &r) / (1u32 - r);
    if tail >= tol {
        return Err(fail);
    }
    Ok(sum)
}

/// `xi(lambda) = sum_n (-1)^n c_2n lambda^2n / (2n)!`.
pub fn xi_series(lambda: &Float, coeffs: &XiCoeffs, ctx: &PrecisionContext) -> Result<Float, RiemannError> {
    if lambda.is_zero() {
        return Ok(coeffs.c(0).clone());
    }
    series(lambda, coeffs, ctx, false)
}

/// `xi'(lambda)` from the same series.
pub fn xi_series_derivative(lambda: &Float, coeffs: &XiCoeffs, ctx: &PrecisionContext) -> Result<Float, RiemannError> {
    if lambda.is_zero() {
        return Ok(Float::new(ctx.bits()));
    }
    series(lambda, coeffs, ctx, true)
}
