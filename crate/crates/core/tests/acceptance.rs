//! Acceptance criteria 1-16. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use np_spectra::fredholm::{
    determinant_coeffs, determinant_direct, determinant_product, iterated_traces, logderiv_residual,
};
use np_spectra::geometry::{make_sphere_mesh, Contour2D};
use np_spectra::operator::{assemble_k2d, assemble_k2d_deflated, assemble_k3d, DiscreteOperator, Layer3D};
use np_spectra::resonance::{
    classical_energy_density, energy_density, eps_from_lambda, resonance_frequency, DispersionModel,
};
use np_spectra::riemann::{
    c_hankel_check, extended_positivity_experiment, functional_f, grommer_hankel, q_from_c, r_polynomial,
    synthetic_off_axis_traces, xi_coeffs, xi_direct, xi_series, xi_zeros, PrecisionContext,
};
use np_spectra::spectral::{
    biorthogonalize, eigenpairs, pair_twins, strong_orthogonality_residual, LogPotential, PlasmonSpectrum,
    DEFAULT_REALNESS_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

type Outcome = Result<String, String>;

fn shapes() -> Vec<(&'static str, Contour2D)> {
    vec![
        ("ellipse", Contour2D::ellipse(2.0, 1.0).unwrap()),
        ("kite", Contour2D::kite().unwrap()),
        ("rounded-square", Contour2D::rounded_square(1.0, 0.4).unwrap()),
    ]
}

fn op2d(c: &Contour2D, n: usize) -> DiscreteOperator {
    assemble_k2d(&c.sample(n).unwrap()).unwrap()
}

fn spectrum(op: &DiscreteOperator) -> PlasmonSpectrum {
    eigenpairs(op, DEFAULT_REALNESS_TOL).unwrap()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn robin_law() -> Outcome {
    let mut worst2 = 0.0f64;
    let mut slowest = 0.0f64;
    for (_, c) in shapes() {
        let t = Instant::now();
        let sp = spectrum(&op2d(&c, 256));
        let r = sp.robin.as_ref().ok_or("no Robin mode")?;
        worst2 = worst2.max((r.lambda - 1.0).abs());
        slowest = slowest.max(t.elapsed().as_secs_f64());
    }
    let t = Instant::now();
    let mesh = make_sphere_mesh(1.0, 3).unwrap();
    let sp = spectrum(&assemble_k3d(&mesh, Layer3D::Adjoint).unwrap());
    let r = sp.robin.as_ref().ok_or("no Robin mode on the sphere")?;
    let err3 = (r.lambda - 1.0).abs();
    slowest = slowest.max(t.elapsed().as_secs_f64());
    ensure(
        worst2 < 1e-8 && err3 < 1e-12 && slowest < 10.0,
        format!("2D |lambda-1| {worst2:.1e} (<1e-8), sphere {err3:.1e} (<1e-12), slowest {slowest:.2}s (<10s)"),
    )
}

fn spectral_bound() -> Outcome {
    let mut min = f64::INFINITY;
    for (_, c) in shapes() {
        for l in spectrum(&op2d(&c, 256)).lambdas() {
            min = min.min(l.abs());
        }
    }
    let mesh = make_sphere_mesh(1.0, 2).unwrap();
    for l in spectrum(&assemble_k3d(&mesh, Layer3D::Single).unwrap()).lambdas() {
        min = min.min(l.abs());
    }
    ensure(min > 1.0 + 1e-6, format!("min |lambda| = {min:.6}"))
}

fn twin_spectrum() -> Outcome {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for (name, c) in shapes() {
        let sp = spectrum(&op2d(&c, 256));
        let twins = pair_twins(&sp).unwrap();
        for p in twins.pairs.iter().filter(|p| p.positive < 50.0) {
            worst = worst.max(p.mismatch);
            pairs += 1;
        }
        if let Some(u) = twins.unmatched.iter().find(|l| l.abs() < 50.0) {
            return Err(format!("{name}: unmatched eigenvalue {u}"));
        }
    }
    ensure(worst < 1e-6, format!("{pairs} pairs below 50, max mismatch {worst:.1e}"))
}

fn deflation() -> Outcome {
    let mut worst = 0.0f64;
    for (name, c) in shapes() {
        let nodes = c.sample(256).unwrap();
        let full = spectrum(&assemble_k2d(&nodes).unwrap());
        let defl = spectrum(&assemble_k2d_deflated(&nodes).unwrap());
        if defl.robin.is_some() {
            return Err(format!("{name}: deflated operator kept lambda = 1"));
        }
        // Compare the matrix eigenvalues mu = 1/lambda away from the floor.
        let mus = |sp: &PlasmonSpectrum| {
            let mut v: Vec<f64> = sp.modes.iter().map(|m| m.mu).filter(|m| m.abs() > 1e-4).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let (a, b) = (mus(&full), mus(&defl));
        if a.len() != b.len() {
            return Err(format!("{name}: {} vs {} modes", a.len(), b.len()));
        }
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
    }
    ensure(worst < 1e-8, format!("max |mu - mu_deflated| {worst:.1e}"))
}

/// Applies the double-layer adjoint to `cos(k t) / |x'(t)|` on the ellipse by
/// a separate trapezoid rule and returns the Rayleigh quotient and residual.
fn ellipse_mode_check(a: f64, b: f64, k: u32, n: usize) -> (f64, f64) {
    let h = 2.0 * PI / n as f64;
    let ts: Vec<f64> = (0..n).map(|j| j as f64 * h).collect();
    let x = |t: f64| [a * t.cos(), b * t.sin()];
    let d = |t: f64| [-a * t.sin(), b * t.cos()];
    let dens = |t: f64| (k as f64 * t).cos();
    let mut out = Vec::with_capacity(n);
    for &s in &ts {
        let p = x(s);
        let dp = d(s);
        let speed = dp[0].hypot(dp[1]);
        let nrm = [dp[1] / speed, -dp[0] / speed];
        let mut acc = 0.0;
        for &t in &ts {
            let kern = if t == s {
                let kappa = a * b / speed.powi(3);
                kappa / 2.0
            } else {
                let q = x(t);
                let r = [p[0] - q[0], p[1] - q[1]];
                (r[0] * nrm[0] + r[1] * nrm[1]) / (r[0] * r[0] + r[1] * r[1])
            };
            // sigma dl = cos(k t) dt.
            acc += kern * dens(t) * h / PI;
        }
        out.push(acc * speed);
    }
    let num: f64 = ts.iter().zip(&out).map(|(t, y)| dens(*t) * y).sum();
    let den: f64 = ts.iter().map(|t| dens(*t).powi(2)).sum();
    let mu = num / den;
    let res = ts
        .iter()
        .zip(&out)
        .map(|(t, y)| (y - mu * dens(*t)).abs())
        .fold(0.0, f64::max);
    (mu, res)
}

fn ellipse_oracle() -> Outcome {
    // Independent check that cos(k t) / |x'| is an eigenfunction with
    // mu = ((a - b) / (a + b))^k.
    for k in 1..=3 {
        let (mu, res) = ellipse_mode_check(2.0, 1.0, k, 400);
        let expect = 3f64.powi(-(k as i32));
        if (mu - expect).abs() > 1e-12 || res > 1e-12 {
            return Err(format!("oracle check failed at k={k}: mu {mu} residual {res:.1e}"));
        }
    }
    let sp = spectrum(&op2d(&Contour2D::ellipse(2.0, 1.0).unwrap(), 512));
    let l = sp.lambdas();
    let mut detail = Vec::new();
    for (target, tol) in [(3.0, 1e-6), (9.0, 1e-4), (27.0, 1e-3)] {
        for s in [1.0, -1.0] {
            let t = s * target;
            let err = l.iter().map(|x| (x - t).abs()).fold(f64::INFINITY, f64::min);
            if err >= tol {
                return Err(format!("lambda {t}: error {err:.1e} >= {tol:.0e}"));
            }
            detail.push(format!("{t}:{err:.0e}"));
        }
    }
    Ok(format!("oracle verified; errors {}", detail.join(" ")))
}

fn sphere_oracle() -> Outcome {
    let t = Instant::now();
    let mesh = make_sphere_mesh(1.0, 3).unwrap();
    let sp = spectrum(&assemble_k3d(&mesh, Layer3D::Single).unwrap());
    let secs = t.elapsed().as_secs_f64();
    let l = sp.lambdas();
    let mut detail = Vec::new();
    for (k, tol) in [(1usize, 0.02), (2, 0.05)] {
        let target = (2 * k + 1) as f64;
        let mut near: Vec<f64> = l.iter().copied().filter(|x| *x > 0.0).collect();
        near.sort_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
        let mult = 2 * k + 1;
        if near.len() < mult {
            return Err(format!("only {} positive eigenvalues", near.len()));
        }
        let worst = near[..mult].iter().map(|x| (x / target - 1.0).abs()).fold(0.0, f64::max);
        if worst >= tol {
            return Err(format!("k={k}: {mult} eigenvalues within {:.2}% (need {}%)", 100.0 * worst, 100.0 * tol));
        }
        detail.push(format!("k={k} x{mult} within {:.2}%", 100.0 * worst));
    }
    ensure(secs < 60.0, format!("{}, {secs:.1}s", detail.join(", ")))
}

fn biorthogonality() -> Outcome {
    let mut worst = 0.0f64;
    let mut blocks = 0;
    for (_, c) in shapes() {
        let sp = biorthogonalize(&spectrum(&op2d(&c, 256))).unwrap();
        blocks += sp.degenerate_blocks().iter().filter(|b| b.len() > 1).count();
        let g = sp.gram(10);
        for (i, row) in g.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    worst = worst.max(x.abs());
                }
            }
        }
    }
    ensure(worst < 1e-8, format!("max off-diagonal {worst:.1e}, {blocks} degenerate blocks"))
}

fn strong_orthogonality() -> Outcome {
    let sp = spectrum(&op2d(&Contour2D::ellipse(2.0, 1.0).unwrap(), 256));
    let mut worst = 0.0f64;
    for i in 0..6 {
        for k in 0..6 {
            if i != k {
                let r = strong_orthogonality_residual(&sp, i, k).map_err(|e| e.to_string())?;
                worst = worst.max(r.interior.abs()).max(r.exterior.abs());
            }
        }
    }
    ensure(worst < 1e-6, format!("max normalized pairing {worst:.1e}"))
}

fn energy_self_adjoint() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for (_, c) in shapes() {
        let nodes = c.sample(256).unwrap();
        let op = assemble_k2d(&nodes).unwrap();
        let v = LogPotential::new(&nodes);
        let w = &nodes.weights;
        let total: f64 = w.iter().sum();
        let mut random_density = || {
            let coef: Vec<(f64, f64)> = (0..8).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let mut s: Vec<f64> = nodes
                .params
                .iter()
                .map(|t| {
                    coef.iter()
                        .enumerate()
                        .map(|(k, (a, b))| a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin())
                        .sum()
                })
                .collect();
            let mean: f64 = s.iter().zip(w).map(|(s, w)| s * w).sum::<f64>() / total;
            s.iter_mut().for_each(|x| *x -= mean);
            s
        };
        for _ in 0..20 {
            let nu = random_density();
            let sigma = random_density();
            let knu = op.apply(&nu);
            let ksigma = op.apply(&sigma);
            let lhs = v.energy(&knu, &sigma);
            let rhs = v.energy(&nu, &ksigma);
            let norm = |x: &[f64]| v.energy(x, x).abs().sqrt();
            let scale = norm(&knu) * norm(&sigma) + norm(&nu) * norm(&ksigma);
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    ensure(worst < 1e-8, format!("20 pairs per shape, max relative asymmetry {worst:.1e}"))
}

fn scale_invariance() -> Outcome {
    let mut worst = 0.0f64;
    for (name, c) in shapes() {
        let sorted = |c: &Contour2D| {
            let mut l = spectrum(&op2d(c, 256)).lambdas();
            l.sort_by(f64::total_cmp);
            l
        };
        let a = sorted(&c);
        let b = sorted(&c.scaled(2.7).unwrap());
        if a.len() != b.len() {
            return Err(format!("{name}: {} vs {} modes", a.len(), b.len()));
        }
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs() / x.abs());
        }
    }
    ensure(worst < 1e-10, format!("max relative change {worst:.1e}"))
}

fn determinant_agreement() -> Outcome {
    let mut worst = 0.0f64;
    let mut logd = 0.0f64;
    for (_, c) in shapes() {
        let op = assemble_k2d_deflated(&c.sample(256).unwrap()).unwrap();
        let traces = iterated_traces(&op, 30).map_err(|e| e.to_string())?;
        let coeffs = determinant_coeffs(&traces, 30).map_err(|e| e.to_string())?;
        let sp = spectrum(&op);
        let l1 = sp.modes[0].lambda.abs();
        for j in 0..=90 {
            let x = 0.9 * l1 * j as f64 / 90.0;
            for s in [x, -x] {
                let a = coeffs.eval(s);
                let b = determinant_product(&sp, s).map_err(|e| e.to_string())?;
                let d = determinant_direct(&op, s);
                worst = worst.max((a - b).abs()).max((a - d).abs()).max((b - d).abs());
            }
        }
        logd = logd.max(logderiv_residual(&coeffs, &traces, 0.3 * l1).map_err(|e| e.to_string())?);
    }
    ensure(
        worst < 1e-8 && logd < 1e-8,
        format!("pairwise {worst:.1e} on |lambda| <= 0.9|lambda_1|, log-derivative {logd:.1e}"),
    )
}

fn xi_cross_validation() -> Outcome {
    let ctx = PrecisionContext::new(50).unwrap();
    let coeffs = xi_coeffs(120, &ctx).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for j in 0..=120 {
        let l = ctx.float(0.25 * j as f64);
        let s = xi_series(&l, &coeffs, &ctx).map_err(|e| e.to_string())?;
        let d = xi_direct(&l, &ctx).map_err(|e| e.to_string())?;
        let err = Float::with_val(ctx.bits(), &s - d.real()).abs().to_f64();
        worst = worst.max(err.max(d.imag().to_f64().abs()));
    }
    let d0 = xi_direct(&ctx.float(0.0), &ctx).map_err(|e| e.to_string())?;
    let c0 = Float::with_val(ctx.bits(), coeffs.c(0) - d0.real()).abs().to_f64();
    // Published value of xi(0) at 50 digits.
    let known = Float::with_val(ctx.bits(), Float::parse("0.49712077818831410991277373968539771980729360955771").unwrap());
    let kn = Float::with_val(ctx.bits(), coeffs.c(0) - &known).abs().to_f64();
    ensure(
        worst < 1e-25 && c0 < 1e-25 && kn < 1e-40,
        format!("series vs direct {worst:.1e} on [0, 30]; |c0 - xi_direct(0)| {c0:.1e}; |c0 - 0.4971207781...| {kn:.1e}"),
    )
}

fn zeros() -> Outcome {
    let t = Instant::now();
    let ctx = PrecisionContext::new(50).unwrap();
    let coeffs = xi_coeffs(80, &ctx).map_err(|e| e.to_string())?;
    let z = xi_zeros(0.0, 26.0, &coeffs, &ctx).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let known = [14.134725141734693, 21.022039638771555, 25.01085758014569];
    if z.len() != 3 {
        return Err(format!("found {} zeros below 26", z.len()));
    }
    let worst = z.iter().zip(known).map(|(a, b)| (a.to_f64() - b).abs()).fold(0.0, f64::max);
    ensure(worst < 1e-6 && secs < 300.0, format!("max error {worst:.1e}, {secs:.2}s"))
}

fn positivity() -> Outcome {
    let ctx = PrecisionContext::new(80).unwrap();
    let coeffs = xi_coeffs(40, &ctx).map_err(|e| e.to_string())?;
    let traces = q_from_c(&coeffs, 30, &ctx).map_err(|e| e.to_string())?;
    if !(0..=20).all(|n| *coeffs.c(n) > 0) {
        return Err("some c_2n <= 0".into());
    }
    if !(1..=20).all(|n| *traces.q(n) > 0) {
        return Err("some q_2n <= 0".into());
    }
    let mut grommer_min = f64::INFINITY;
    for n in 0..=4 {
        let h = grommer_hankel(&traces, n).map_err(|e| e.to_string())?;
        if !h.positive {
            return Err(format!("Grommer Hankel N={n} not positive"));
        }
        grommer_min = grommer_min.min(h.min_eigenvalue.to_f64());
    }
    for n in 0..=6 {
        for m in 0..=3 {
            let h = c_hankel_check(&coeffs, n, m).map_err(|e| e.to_string())?;
            if !h.positive {
                return Err(format!("c-Hankel N={n} m={m} not positive"));
            }
        }
    }
    let mut f_err = 0.0f64;
    for n in 0..20 {
        let r = r_polynomial(n, &coeffs).map_err(|e| e.to_string())?;
        let f = functional_f(&traces, &r).map_err(|e| e.to_string())?;
        let rel = Float::with_val(ctx.bits(), &f - coeffs.c(n + 1)) / coeffs.c(n + 1);
        f_err = f_err.max(rel.abs().to_f64());
    }
    if f_err > 1e-70 {
        return Err(format!("f(R_2n) vs c_2n+2 relative {f_err:.1e}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    for i in 0..100 {
        let m = 1 + i % 3;
        let len = 1 + (i / 3) % 4;
        let a: Vec<Float> = (0..len).map(|_| ctx.float(rng.random_range(-1.0..1.0))).collect();
        let (f, direct) = extended_positivity_experiment(&coeffs, &traces, m, &a).map_err(|e| e.to_string())?;
        if f <= 0 || direct <= 0 {
            return Err(format!("instance {i} (m={m}) not positive"));
        }
    }
    Ok(format!(
        "c, q > 0 to n=20; Grommer N<=4 min eig {grommer_min:.1e}; c-Hankel N<=6, m<=3; f(R) rel {f_err:.0e}; 100 instances positive"
    ))
}

fn counterexample() -> Outcome {
    let ctx = PrecisionContext::new(60).unwrap();
    let traces = synthetic_off_axis_traces(2.0, 1.0, 13, &ctx);
    for n in 0..=6 {
        let h = grommer_hankel(&traces, n).map_err(|e| e.to_string())?;
        if !h.positive {
            return Ok(format!("off-axis pair 2+i fails at N={n} (min eig {:.2e})", h.min_eigenvalue.to_f64()));
        }
    }
    Err("checker accepted traces from an off-axis zero".into())
}

fn drude() -> Outcome {
    // The closed form is the lossless one.
    let lossless = DispersionModel::drude(1.0, 0.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for l in [3.0, -3.0, 9.0, -9.0, 1.5, -27.0, 100.0] {
        let eps = eps_from_lambda(l, 1.0).map_err(|e| e.to_string())?;
        let w = resonance_frequency(&lossless, eps).map_err(|e| e.to_string())?;
        let closed = 1.0 / (1.0 - eps).sqrt();
        worst = worst.max((w - closed).abs());
    }
    // The dispersive energy formula assumes negligible loss.
    let mut min_u = f64::INFINITY;
    let mut classical_negative = true;
    for j in 1..=300 {
        let w = 3.0 * j as f64 / 300.0;
        min_u = min_u.min(energy_density(&lossless, w, 1.0).map_err(|e| e.to_string())?);
        if w < 1.0 - 1e-9 {
            let c = classical_energy_density(&lossless, w, 1.0).map_err(|e| e.to_string())?;
            classical_negative &= c < 0.0;
        }
    }
    ensure(
        worst < 1e-12 && min_u >= 0.0 && classical_negative,
        format!("bisection vs closed form {worst:.1e}; min energy density {min_u:.3}; classical negative below omega_p: {classical_negative}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 16] = [
        ("Robin law", robin_law),
        ("spectral bound", spectral_bound),
        ("twin spectrum", twin_spectrum),
        ("deflation", deflation),
        ("ellipse oracle", ellipse_oracle),
        ("sphere oracle", sphere_oracle),
        ("biorthogonality", biorthogonality),
        ("strong orthogonality", strong_orthogonality),
        ("energy self-adjointness", energy_self_adjoint),
        ("scale invariance", scale_invariance),
        ("determinant agreement", determinant_agreement),
        ("xi cross-validation", xi_cross_validation),
        ("zeros", zeros),
        ("positivity program", positivity),
        ("counterexample power", counterexample),
        ("Drude consistency", drude),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
