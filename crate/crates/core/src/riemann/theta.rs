use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::{PrecisionContext, RiemannError};

fn pi(ctx: &PrecisionContext) -> Float {
    Float::with_val(ctx.bits(), Constant::Pi)
}

fn check_domain(x: &Float) -> Result<(), RiemannError> {
    if *x < 1 {
        return Err(RiemannError::Domain(x.to_f64()));
    }
    Ok(())
}

/// `psi(x) = sum_{n >= 1} exp(-n^2 pi x)`, summed until a term drops below
/// `10^-(digits + 5)`.
pub fn theta_psi(x: &Float, ctx: &PrecisionContext) -> Result<Float, RiemannError> {
    check_domain(x)?;
    let prec = ctx.bits();
    let eps = ctx.series_eps();
    let q = Float::with_val(prec, -(pi(ctx) * x)).exp();
    let mut sum = Float::new(prec);
    // q^{n^2} via q^{(n+1)^2} = q^{n^2} q^{2n+1}.
    let mut term = q.clone();
    let mut step = Float::with_val(prec, q.square_ref()) * &q;
    let q2 = Float::with_val(prec, q.square_ref());
    while term > eps {
        sum += &term;
        term *= &step;
        step *= &q2;
    }
    Ok(sum)
}

/// `H(x) = 4 d/dx[x^{3/2} psi'(x)] x^{-1/4}
///       = sum_n (4 pi^2 n^4 x^{5/4} - 6 pi n^2 x^{1/4}) exp(-n^2 pi x)`.
pub fn h_function(x: &Float, ctx: &PrecisionContext) -> Result<Float, RiemannError> {
    check_domain(x)?;
    Ok(h_unchecked(x, ctx))
}

fn h_unchecked(x: &Float, ctx: &PrecisionContext) -> Float {
    let prec = ctx.bits();
    let pi = pi(ctx);
    let quarter = Float::with_val(prec, x.root_ref(4));
    let a = Float::with_val(prec, pi.square_ref()) * 4u32 * x * &quarter;
    let b = Float::with_val(prec, &pi * 6u32) * &quarter;
    let q = Float::with_val(prec, -(pi * x)).exp();
    let q2 = Float::with_val(prec, q.square_ref());
    let mut qn = q.clone();
    let mut step = Float::with_val(prec, &q2 * &q);
    let mut sum = Float::new(prec);
    let tiny = Float::with_val(prec, Float::with_val(prec, 2).pow(-(prec as i32)));
    for n in 1u32.. {
        let n2 = n * n;
        let coeff = Float::with_val(prec, &a * (n2 * n2)) - Float::with_val(prec, &b * n2);
        let term = coeff * &qn;
        let small = Float::with_val(prec, term.abs_ref()) <= Float::with_val(prec, sum.abs_ref()) * &tiny;
        sum += term;
        if small && n > 1 {
            break;
        }
        qn *= &step;
        step *= &q2;
    }
    sum
}

/// Moments `c_2n = int_1^inf H(x) (ln sqrt x)^{2n} dx`, stored as `c[n]`.
#[derive(Debug, Clone)]
pub struct XiCoeffs {
    pub c: Vec<Float>,
}

impl XiCoeffs {
    pub fn n_max(&self) -> usize {
        self.c.len() - 1
    }

    /// `c_2n`.
    pub fn c(&self, n: usize) -> &Float {
        &self.c[n]
    }

    pub fn prec(&self) -> u32 {
        self.c[0].prec()
    }
}

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre(m: usize, prec: u32) -> Vec<(Float, Float)> {
    let mut out = Vec::with_capacity(m);
    let tol = Float::with_val(prec, Float::with_val(prec, 2).pow(-(prec as i32) + 8));
    for i in 0..m {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut x = Float::with_val(prec, guess);
        let mut dp = Float::new(prec);
        for _ in 0..100 {
            // Three-term recurrence for P_m and its derivative.
            let mut p0 = Float::with_val(prec, 1);
            let mut p1 = x.clone();
            for k in 2..=m {
                let k = k as u32;
                let p2 = (Float::with_val(prec, &x * &p1) * (2 * k - 1) - Float::with_val(prec, &p0 * (k - 1))) / k;
                p0 = p1;
                p1 = p2;
            }
            let one_minus = Float::with_val(prec, 1) - Float::with_val(prec, x.square_ref());
            dp = (Float::with_val(prec, &p0 - Float::with_val(prec, &x * &p1)) * m as u32) / one_minus;
            let dx = Float::with_val(prec, &p1 / &dp);
            x -= &dx;
            if dx.abs() < tol {
                break;
            }
        }
        let one_minus = Float::with_val(prec, 1) - Float::with_val(prec, x.square_ref());
        let w = Float::with_val(prec, 2) / (one_minus * Float::with_val(prec, dp.square_ref()));
        out.push((x, w));
    }
    out
}

/// `ln` of the leading term of the integrand `2 H(e^{2t}) e^{2t} t^{2n}`.
fn log_integrand(t: f64, n: usize) -> f64 {
    let pi = std::f64::consts::PI;
    (8.0 * pi * pi).ln() + 4.5 * t - pi * (2.0 * t).exp() + 2.0 * n as f64 * t.ln()
}

/// Upper limit beyond which every integrand up to order `n_max` is below
/// both `10^-(digits + 5)` and its own peak times `10^-(digits + 10)`.
fn cutoff(n_max: usize, digits: u32) -> f64 {
    let ln10 = std::f64::consts::LN_10;
    let mut top: f64 = 0.5;
    for n in 0..=n_max {
        let mut peak = f64::NEG_INFINITY;
        let mut t = 0.005;
        while t < 8.0 {
            let v = log_integrand(t, n);
            peak = peak.max(v);
            let floor = (-(digits as f64 + 5.0) * ln10).min(peak - (digits as f64 + 10.0) * ln10);
            if v < peak && v < floor {
                top = top.max(t);
                break;
            }
            t += 0.005;
        }
    }
    top
}

fn integrate(n_max: usize, upper: f64, panels: usize, rule: &[(Float, Float)], ctx: &PrecisionContext) -> Vec<Float> {
    let prec = ctx.bits();
    let width = Float::with_val(prec, upper) / panels as u32;
    let half = Float::with_val(prec, &width / 2u32);
    let nodes: Vec<(Float, Float)> = (0..panels)
        .flat_map(|p| {
            let mid = Float::with_val(prec, &width * p as u32) + &half;
            rule.iter()
                .map(|(x, w)| (Float::with_val(prec, &mid + Float::with_val(prec, x * &half)), Float::with_val(prec, w * &half)))
                .collect::<Vec<_>>()
        })
        .collect();
    // 2 H(e^{2t}) e^{2t} times the weight, at every node.
    let base: Vec<Float> = nodes
        .par_iter()
        .map(|(t, w)| {
            let x = Float::with_val(prec, t * 2u32).exp();
            let h = h_unchecked(&x, ctx);
            h * x * w * 2u32
        })
        .collect();
    let mut sums = vec![Float::new(prec); n_max + 1];
    for ((t, _), g) in nodes.iter().zip(&base) {
        let t2 = Float::with_val(prec, t.square_ref());
        let mut v = g.clone();
        for s in sums.iter_mut() {
            *s += &v;
            v *= &t2;
        }
    }
    sums
}

/// `c_0, c_2, ..., c_{2 n_max}` by composite Gauss-Legendre quadrature in
/// `t = ln sqrt x`. The panel count is doubled until two successive
/// rules agree to `10^-(digits + 2)` relative.
pub fn xi_coeffs(n_max: usize, ctx: &PrecisionContext) -> Result<XiCoeffs, RiemannError> {
    let prec = ctx.bits();
    let upper = cutoff(n_max, ctx.digits());
    let rule = gauss_legendre(24, prec);
    let tol = ctx.ten_pow_neg(ctx.digits() + 2);
    let mut panels = (upper / 0.1).ceil() as usize;
    let mut prev = integrate(n_max, upper, panels, &rule, ctx);
    for _ in 0..6 {
        panels *= 2;
        let next = integrate(n_max, upper, panels, &rule, ctx);
        let worst = prev
            .iter()
            .zip(&next)
            .enumerate()
            .map(|(n, (a, b))| (n, Float::with_val(prec, a - b).abs() / b))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
        match worst {
            Some((_, e)) if e > tol => prev = next,
            _ => return Ok(XiCoeffs { c: next }),
        }
    }
    Err(RiemannError::Quadrature { order: 2 * n_max })
}

/// A single `c_2n`.
pub fn xi_coeff(n: usize, ctx: &PrecisionContext) -> Result<Float, RiemannError> {
    let mut all = xi_coeffs(n, ctx)?;
    Ok(all.c.swap_remove(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn psi_matches_theta_functional_equation() {
        // 2 psi(1) + 1 = pi^{1/4} / Gamma(3/4).
        let c = ctx();
        let p = theta_psi(&c.float(1.0), &c).unwrap();
        let prec = c.bits();
        let pi = Float::with_val(prec, Constant::Pi);
        let g = Float::with_val(prec, 0.75).gamma();
        let expect = (Float::with_val(prec, pi.root_ref(4)) / g - 1u32) / 2u32;
        let err = Float::with_val(prec, &p - &expect).abs().to_f64();
        assert!(err < 1e-50, "{err:e}");
        assert!((p.to_f64() - 0.0432174).abs() < 1e-7);
        let p2 = theta_psi(&c.float(2.0), &c).unwrap();
        assert!(p2 < p);
        assert!(theta_psi(&c.float(200.0), &c).unwrap().to_f64() < 1e-200);
    }

    #[test]
    fn h_values_and_decay() {
        let c = ctx();
        let h1 = h_function(&c.float(1.0), &c).unwrap().to_f64();
        assert!((h1 - 0.8934).abs() < 1e-4, "{h1}");
        let h10 = h_function(&c.float(10.0), &c).unwrap().to_f64();
        assert!(h10 / h1 < (-9.0 * std::f64::consts::PI).exp() * 1e3);
        for k in 0..50 {
            let x = 1.0 + k as f64;
            assert!(h_function(&c.float(x), &c).unwrap() > 0);
        }
        assert_eq!(h_function(&c.float(0.5), &c), Err(RiemannError::Domain(0.5)));
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let rule = gauss_legendre(10, 200);
        // int_{-1}^{1} x^18 = 2/19.
        let s: Float = rule
            .iter()
            .map(|(x, w)| Float::with_val(200, x.pow(18u32)) * w)
            .fold(Float::new(200), |a, b| a + b);
        let err = (s - Float::with_val(200, 2) / 19u32).abs();
        assert!(err.to_f64() < 1e-55);
    }

    #[test]
    fn coefficients_are_positive_and_c0_is_xi0() {
        let c = ctx();
        let co = xi_coeffs(20, &c).unwrap();
        assert!((co.c(0).to_f64() - 0.4971208).abs() < 1e-7);
        assert!(co.c.iter().all(|x| *x > 0));
    }
}
