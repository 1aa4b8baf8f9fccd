use rug::{Complex, Float};

use super::theta::XiCoeffs;
use super::{PrecisionContext, RiemannError};
use crate::fredholm::{TraceSequence, TraceSource};

/// `p(z) = sum_i p_2i z^2i`, stored as `coeffs[i] = p_2i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenPolynomial {
    pub coeffs: Vec<Float>,
}

impl EvenPolynomial {
    pub fn new(coeffs: Vec<Float>) -> Self {
        EvenPolynomial { coeffs }
    }

    /// Half the degree.
    pub fn half_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn scaled(&self, a: &Float) -> Self {
        EvenPolynomial {
            coeffs: self.coeffs.iter().map(|c| Float::with_val(c.prec(), c * a)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let prec = self.coeffs.iter().chain(&other.coeffs).map(|c| c.prec()).max().unwrap_or(64);
        let get = |v: &[Float], i: usize| v.get(i).cloned().unwrap_or_else(|| Float::new(prec));
        EvenPolynomial {
            coeffs: (0..n)
                .map(|i| Float::with_val(prec, get(&self.coeffs, i) + get(&other.coeffs, i)))
                .collect(),
        }
    }
}

/// `(2n + 1)! / (2n - 2k)!` at precision `prec`.
fn falling(n: usize, k: usize, prec: u32) -> Float {
    let mut f = Float::with_val(prec, 1);
    for j in (2 * n - 2 * k + 1)..=(2 * n + 1) {
        f *= j as u32;
    }
    f
}

/// `R_2n(z)` with coefficients `r_2k = (-1)^k (2n+1)!/(2n-2k)! c_{2n-2k}`.
pub fn r_polynomial(n: usize, coeffs: &XiCoeffs) -> Result<EvenPolynomial, RiemannError> {
    if n > coeffs.n_max() {
        return Err(RiemannError::OrderOverflow {
            requested: 2 * n,
            available: 2 * coeffs.n_max(),
        });
    }
    let prec = coeffs.prec();
    let c = (0..=n)
        .map(|k| {
            let v = falling(n, k, prec) * coeffs.c(n - k);
            if k % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    Ok(EvenPolynomial::new(c))
}

/// `f(p) = sum_i q_{2i+2} p_2i`.
pub fn functional_f(traces: &TraceSequence, p: &EvenPolynomial) -> Result<Float, RiemannError> {
    if p.coeffs.len() > traces.n_max() {
        return Err(RiemannError::OrderOverflow {
            requested: 2 * p.coeffs.len(),
            available: 2 * traces.n_max(),
        });
    }
    let prec = traces.prec().max(p.coeffs.first().map_or(64, |c| c.prec()));
    let mut s = Float::new(prec);
    for (i, c) in p.coeffs.iter().enumerate() {
        s += Float::with_val(prec, traces.q(i + 1) * c);
    }
    Ok(s)
}

/// Solves `c_{2n+2} = sum_k (-1)^k (2n+1)!/(2n-2k)! c_{2n-2k} q_{2k+2}` for
/// `q_2, ..., q_{2 n_max}`. The relative error of each `q` is estimated as
/// `10^-digits` times the cancellation ratio of its defining sum.
pub fn q_from_c(coeffs: &XiCoeffs, n_max: usize, ctx: &PrecisionContext) -> Result<TraceSequence, RiemannError> {
    if *coeffs.c(0) <= 0 {
        return Err(RiemannError::NonPositiveC0);
    }
    if n_max > coeffs.n_max() {
        return Err(RiemannError::OrderOverflow {
            requested: 2 * n_max,
            available: 2 * coeffs.n_max(),
        });
    }
    let prec = ctx.bits().max(coeffs.prec());
    let limit = 10f64.powf(-(ctx.digits() as f64) / 4.0);
    let unit = 10f64.powf(-(ctx.digits() as f64));
    let mut q: Vec<Float> = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let mut rest = Float::with_val(prec, coeffs.c(n + 1));
        let mut scale = Float::with_val(prec, rest.abs_ref());
        for (k, qk) in q.iter().enumerate() {
            let mut t = falling(n, k, prec) * coeffs.c(n - k) * qk;
            if k % 2 == 1 {
                t = -t;
            }
            scale += Float::with_val(prec, t.abs_ref());
            rest -= t;
        }
        let mut lead = falling(n, n, prec) * coeffs.c(0);
        if n % 2 == 1 {
            lead = -lead;
        }
        let qn = Float::with_val(prec, &rest / &lead);
        let est = (scale / Float::with_val(prec, rest.abs_ref())).to_f64() * unit;
        if !(est <= limit) {
            return Err(RiemannError::Cancellation {
                order: 2 * n + 2,
                estimate: est,
            });
        }
        q.push(qn);
    }
    Ok(TraceSequence::new(q, TraceSource::Recurrence))
}

/// Forward direction of the recurrence: `c_2, ..., c_{2 n}` from `c_0` and
/// the traces, for `n = traces.n_max()`.
pub fn c_from_q(c0: &Float, traces: &TraceSequence) -> XiCoeffs {
    let prec = c0.prec().max(traces.prec());
    let mut c = vec![Float::with_val(prec, c0)];
    for n in 0..traces.n_max() {
        let mut s = Float::new(prec);
        for k in 0..=n {
            let mut t = falling(n, k, prec) * &c[n - k] * traces.q(k + 1);
            if k % 2 == 1 {
                t = -t;
            }
            s += t;
        }
        c.push(s);
    }
    XiCoeffs { c }
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
pub fn min_eigenvalue(mut a: Vec<Vec<Float>>) -> Float {
    let n = a.len();
    let prec = a[0][0].prec();
    let off = |a: &Vec<Vec<Float>>| {
        let mut s = Float::new(prec);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += Float::with_val(prec, a[i][j].square_ref());
                }
            }
        }
        s
    };
    let mut total = Float::new(prec);
    for row in &a {
        for x in row {
            total += Float::with_val(prec, x.square_ref());
        }
    }
    let tiny = Float::with_val(prec, &total >> (2 * prec));
    for _ in 0..100 {
        if off(&a) <= tiny {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].is_zero() {
                    continue;
                }
                // Rotation angle zeroing a[p][q].
                let theta = Float::with_val(prec, &a[q][q] - &a[p][p]) / Float::with_val(prec, &a[p][q] * 2u32);
                let root = (Float::with_val(prec, theta.square_ref()) + 1u32).sqrt();
                let t = if theta.is_sign_negative() {
                    Float::with_val(prec, -1i32) / (root - &theta).abs()
                } else {
                    Float::with_val(prec, 1u32) / (root + &theta)
                };
                let c = Float::with_val(prec, Float::with_val(prec, t.square_ref()) + 1u32).sqrt().recip();
                let s = Float::with_val(prec, &t * &c);
                for k in 0..n {
                    let akp = a[k][p].clone();
                    let akq = a[k][q].clone();
                    a[k][p] = Float::with_val(prec, &c * &akp) - Float::with_val(prec, &s * &akq);
                    a[k][q] = Float::with_val(prec, &s * &akp) + Float::with_val(prec, &c * &akq);
                }
                for k in 0..n {
                    let apk = a[p][k].clone();
                    let aqk = a[q][k].clone();
                    a[p][k] = Float::with_val(prec, &c * &apk) - Float::with_val(prec, &s * &aqk);
                    a[q][k] = Float::with_val(prec, &s * &apk) + Float::with_val(prec, &c * &aqk);
                }
            }
        }
    }
    (0..n)
        .map(|i| a[i][i].clone())
        .min_by(|x, y| x.partial_cmp(y).unwrap())
        .unwrap()
}

#[derive(Debug, Clone)]
pub struct HankelCheck {
    pub min_eigenvalue: Float,
    pub positive: bool,
}

fn hankel(entries: impl Fn(usize) -> Float, size: usize) -> HankelCheck {
    let m: Vec<Vec<Float>> = (0..size)
        .map(|i| (0..size).map(|j| entries(i + j)).collect())
        .collect();
    let min = min_eigenvalue(m);
    HankelCheck {
        positive: min > 0,
        min_eigenvalue: min,
    }
}

/// Hankel form `H[i][j] = q_{2i+2j+2}`, `0 <= i, j <= N`.
pub fn grommer_hankel(traces: &TraceSequence, big_n: usize) -> Result<HankelCheck, RiemannError> {
    let need = 2 * big_n + 1;
    if need > traces.n_max() {
        return Err(RiemannError::OrderOverflow {
            requested: 2 * need,
            available: 2 * traces.n_max(),
        });
    }
    Ok(hankel(|k| traces.q(k + 1).clone(), big_n + 1))
}

/// Hankel form with entries `c_{2i+2j+2m}`, `0 <= i, j <= N`.
pub fn c_hankel_check(coeffs: &XiCoeffs, big_n: usize, m: usize) -> Result<HankelCheck, RiemannError> {
    let need = 2 * big_n + m;
    if need > coeffs.n_max() {
        return Err(RiemannError::OrderOverflow {
            requested: 2 * need,
            available: 2 * coeffs.n_max(),
        });
    }
    Ok(hankel(|k| coeffs.c(k + m).clone(), big_n + 1))
}

/// `f(sum_ij R_{2i+2j+2m-2}(z) a_i a_j)` for `0 <= i, j < a.len()`, returned
/// together with `sum_ij c_{2i+2j+2m} a_i a_j`, its value by linearity.
pub fn extended_positivity_experiment(
    coeffs: &XiCoeffs,
    traces: &TraceSequence,
    m: usize,
    a: &[Float],
) -> Result<(Float, Float), RiemannError> {
    if m == 0 {
        return Err(RiemannError::InvalidShift);
    }
    let top = 2 * a.len().saturating_sub(1) + m;
    if top > coeffs.n_max() {
        return Err(RiemannError::OrderOverflow {
            requested: 2 * top,
            available: 2 * coeffs.n_max(),
        });
    }
    let prec = coeffs.prec().max(traces.prec());
    let mut poly = EvenPolynomial::new(vec![Float::new(prec)]);
    let mut direct = Float::new(prec);
    for (i, ai) in a.iter().enumerate() {
        for (j, aj) in a.iter().enumerate() {
            let w = Float::with_val(prec, ai * aj);
            let k = i + j + m;
            poly = poly.add(&r_polynomial(k - 1, coeffs)?.scaled(&w));
            direct += Float::with_val(prec, coeffs.c(k) * &w);
        }
    }
    Ok((functional_f(traces, &poly)?, direct))
}

/// `q_2n = 2 Re(z^{-2n})` for one conjugate pair of zeros `+-z, +-conj(z)`.
pub fn synthetic_off_axis_traces(re: f64, im: f64, n_max: usize, ctx: &PrecisionContext) -> TraceSequence {
    let prec = ctx.bits();
    let z = Complex::with_val(prec, (re, im));
    let inv2 = Complex::with_val(prec, z.square_ref()).recip();
    let mut p = Complex::with_val(prec, (1, 0));
    let even = (0..n_max)
        .map(|_| {
            p *= &inv2;
            Float::with_val(prec, p.real() * 2u32)
        })
        .collect();
    TraceSequence::new(even, TraceSource::Zeros)
}
