use np_spectra::fredholm::{
    determinant_coeffs, determinant_direct, determinant_product, iterated_traces, logderiv_residual, write_csv,
};
use np_spectra::operator::{assemble_k2d, assemble_k2d_deflated, assemble_k3d, DiscreteOperator, KernelKind, Layer3D};
use np_spectra::resonance::{
    eps_from_lambda, offresonant_gain, resonance_frequency, resonant_envelope, DispersionModel, ModeExcitation,
};
use np_spectra::spectral::{biorthogonalize, eigenpairs, mode_dipole, pair_twins, PlasmonSpectrum, DEFAULT_REALNESS_TOL};
use serde::Serialize;

use crate::args::{Dispersion, ExciteArgs, Format, FredholmArgs, LayerArg, ResonanceArgs, SpectrumArgs};
use crate::output::{csv_stamp, input_error, timestamp, write_json, write_text, write_with, Classify, Failure, Report};
use crate::shape::{load, LoadedShape, Shape};

fn kind_name(kind: KernelKind) -> &'static str {
    match kind {
        KernelKind::K2d => "k2d",
        KernelKind::K2dDeflated => "k2d-deflated",
        KernelKind::K3dSingle => "k3d-single",
        KernelKind::K3dAdjoint => "k3d-adjoint",
    }
}

fn assemble(shape: &LoadedShape, n: usize, deflated: bool, layer: LayerArg) -> Result<DiscreteOperator, Failure> {
    match &shape.shape {
        Shape::Contour(c) => {
            let nodes = c.sample(n).input()?;
            if deflated {
                assemble_k2d_deflated(&nodes).numerical()
            } else {
                assemble_k2d(&nodes).numerical()
            }
        }
        Shape::Surface(m) => {
            if deflated {
                return Err(input_error("deflation applies to 2D contours only"));
            }
            let layer = match layer {
                LayerArg::Single => Layer3D::Single,
                LayerArg::Adjoint => Layer3D::Adjoint,
            };
            assemble_k3d(m, layer).numerical()
        }
    }
}

fn model(d: &Dispersion) -> Result<DispersionModel, Failure> {
    if d.silver {
        return Ok(DispersionModel::silver());
    }
    let m = DispersionModel::Drude {
        eps0: d.eps0,
        omega_p: d.omega_p,
        gamma: d.gamma,
    };
    m.validate().input()?;
    Ok(m)
}

#[derive(Serialize)]
struct ModeRow {
    index: usize,
    lambda: f64,
    mu: f64,
    residual: f64,
    zero_mean_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    twin_mismatch: Option<f64>,
}

#[derive(Serialize)]
struct RobinRow {
    lambda: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SpuriousRow {
    mu_re: f64,
    mu_im: f64,
}

#[derive(Serialize)]
struct SpectrumBody {
    shape: serde_json::Value,
    kernel: &'static str,
    size: usize,
    robin: Option<RobinRow>,
    infinite_count: usize,
    spurious: Vec<SpuriousRow>,
    max_twin_mismatch: Option<f64>,
    modes: Vec<ModeRow>,
}

pub fn spectrum(args: &SpectrumArgs, no_timestamp: bool) -> Result<(), Failure> {
    let shape = load(&args.disc.shape, args.disc.refinement)?;
    let op = assemble(&shape, args.disc.n, args.deflated, args.layer)?;
    if let Some(path) = &args.dump_matrix {
        write_with(path, |buf| op.write_dump(buf))?;
    }
    let sp = eigenpairs(&op, args.realness_tol).numerical()?;
    let twins = if op.kind().is_2d() {
        Some(pair_twins(&sp).numerical()?)
    } else {
        None
    };
    let mut warnings = Vec::new();
    if sp.modes.is_empty() {
        warnings.push("no finite plasmonic eigenvalues: the operator is degenerate for this shape".to_string());
    }
    if !sp.spurious.is_empty() {
        warnings.push(format!("{} eigenvalues failed the realness test", sp.spurious.len()));
    }
    let modes: Vec<ModeRow> = sp
        .modes
        .iter()
        .enumerate()
        .map(|(i, m)| ModeRow {
            index: i,
            lambda: m.lambda,
            mu: m.mu,
            residual: m.residual,
            zero_mean_residual: m.zero_mean_residual,
            twin_mismatch: twins.as_ref().and_then(|t| t.mismatch_of(m.lambda)),
        })
        .collect();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let ts = timestamp(no_timestamp);
    let out = args.output.out.as_deref();
    match args.format {
        Format::Json => write_json(
            out,
            &Report {
                schema_version: crate::output::SCHEMA_VERSION,
                generated_unix: ts,
                command: "spectrum",
                warnings,
                body: SpectrumBody {
                    shape: shape.spec,
                    kernel: kind_name(op.kind()),
                    size: op.dim(),
                    robin: sp.robin.as_ref().map(|r| RobinRow {
                        lambda: r.lambda,
                        residual: r.residual,
                    }),
                    infinite_count: sp.infinite_count,
                    spurious: sp
                        .spurious
                        .iter()
                        .map(|s| SpuriousRow {
                            mu_re: s.mu_re,
                            mu_im: s.mu_im,
                        })
                        .collect(),
                    max_twin_mismatch: twins.as_ref().map(|t| t.max_mismatch()),
                    modes,
                },
            },
        ),
        Format::Csv => {
            let mut text = csv_stamp(ts);
            text.push_str(&format!("# schema_version={}\n", crate::output::SCHEMA_VERSION));
            text.push_str("index,lambda,mu,residual\n");
            if let Some(r) = &sp.robin {
                text.push_str(&format!("robin,{},{},{}\n", r.lambda, r.mu, r.residual));
            }
            for m in &modes {
                text.push_str(&format!("{},{},{},{}\n", m.index, m.lambda, m.mu, m.residual));
            }
            write_text(out, &text)
        }
    }
}

#[derive(Serialize)]
struct ResonanceMode {
    lambda: f64,
    eps_k: f64,
    omega_k: Option<f64>,
    omega_k_over_omega_p: Option<f64>,
    unattainable: Option<String>,
    /// `omega_k` of the closed form for a Drude model, when it exists.
    closed_form: Option<f64>,
    peak_omega: Option<f64>,
    /// `[omega, C(omega)]` samples; `C` is null where it is singular.
    gain_curve: Vec<(f64, Option<f64>)>,
}

#[derive(Serialize)]
struct ResonanceBody {
    model: DispersionModel,
    modes: Vec<ResonanceMode>,
}

fn lambdas_for(args: &ResonanceArgs) -> Result<Vec<f64>, Failure> {
    if let Some(path) = &args.shape {
        let shape = load(path, args.refinement)?;
        let op = assemble(&shape, args.n, false, LayerArg::Single)?;
        let sp = eigenpairs(&op, DEFAULT_REALNESS_TOL).numerical()?;
        return Ok(sp.modes.iter().take(args.modes).map(|m| m.lambda).collect());
    }
    if args.lambda.is_empty() {
        return Err(input_error("give --shape or --lambda"));
    }
    Ok(args.lambda.clone())
}

pub fn resonance(args: &ResonanceArgs, no_timestamp: bool) -> Result<(), Failure> {
    let model = model(&args.dispersion)?;
    if args.grid < 2 {
        return Err(input_error("--grid must be at least 2"));
    }
    let lambdas = lambdas_for(args)?;
    let (_, top) = model.branch();
    let mut warnings = Vec::new();
    let mut modes = Vec::new();
    for &lambda in &lambdas {
        let eps_k = match eps_from_lambda(lambda, model.eps0()) {
            Ok(e) => e,
            Err(e) => {
                warnings.push(format!("lambda = {lambda}: {e}"));
                continue;
            }
        };
        let closed_form = match model {
            DispersionModel::Drude { eps0, omega_p, .. } => {
                let r = 1.0 - eps_k / eps0;
                (r > 0.0).then(|| omega_p / r.sqrt())
            }
            DispersionModel::Tabulated { .. } => None,
        };
        let (omega_k, unattainable) = match resonance_frequency(&model, eps_k) {
            Ok(w) => (Some(w), None),
            Err(e) => {
                warnings.push(format!("lambda = {lambda}: {e}"));
                (None, Some(e.to_string()))
            }
        };
        let gain_curve: Vec<(f64, Option<f64>)> = (1..=args.grid)
            .map(|j| {
                let w = top * 1.2 * j as f64 / args.grid as f64;
                (w, offresonant_gain(&model, w, eps_k).ok().filter(|g| g.is_finite()))
            })
            .collect();
        let peak_omega = gain_curve
            .iter()
            .filter_map(|(w, g)| g.map(|g| (*w, g)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(w, _)| w);
        modes.push(ResonanceMode {
            lambda,
            eps_k,
            omega_k,
            omega_k_over_omega_p: omega_k.map(|w| w / top),
            unattainable,
            closed_form,
            peak_omega,
            gain_curve,
        });
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    write_json(
        args.output.out.as_deref(),
        &Report {
            schema_version: crate::output::SCHEMA_VERSION,
            generated_unix: timestamp(no_timestamp),
            command: "resonance",
            warnings,
            body: ResonanceBody { model, modes },
        },
    )
}

#[derive(Serialize)]
struct ExciteMode {
    excitation: ModeExcitation,
    coupling: f64,
    envelope: Option<f64>,
    gain_at_omega0: Option<f64>,
}

#[derive(Serialize)]
struct ExciteBody {
    shape: serde_json::Value,
    model: DispersionModel,
    modes: Vec<ExciteMode>,
}

pub fn excite(args: &ExciteArgs, no_timestamp: bool) -> Result<(), Failure> {
    let model = model(&args.dispersion)?;
    let shape = load(&args.disc.shape, args.disc.refinement)?;
    let dim = match shape.shape {
        Shape::Contour(_) => 2,
        Shape::Surface(_) => 3,
    };
    if args.field.len() != dim {
        return Err(input_error(format!("--field needs {dim} components")));
    }
    let op = assemble(&shape, args.disc.n, false, LayerArg::Single)?;
    let sp: PlasmonSpectrum = biorthogonalize(&eigenpairs(&op, DEFAULT_REALNESS_TOL).numerical()?).numerical()?;
    let mut warnings = Vec::new();
    let mut modes = Vec::new();
    for (i, m) in sp.modes.iter().take(args.modes).enumerate() {
        let dipole = mode_dipole(&m.sigma, op.discretization()).numerical()?;
        let eps_k = eps_from_lambda(m.lambda, model.eps0()).numerical()?;
        let omega_k = match resonance_frequency(&model, eps_k) {
            Ok(w) => w,
            Err(e) => {
                warnings.push(format!("mode {i}: {e}"));
                continue;
            }
        };
        let exc = ModeExcitation {
            mode: i,
            dipole,
            field: args.field.clone(),
            omega0: args.omega0.unwrap_or(omega_k),
            eps_k,
            omega_k,
        };
        let envelope = resonant_envelope(&exc, &model).ok();
        let gain_at_omega0 = args.omega0.and_then(|w| offresonant_gain(&model, w, eps_k).ok());
        modes.push(ExciteMode {
            coupling: exc.coupling(),
            excitation: exc,
            envelope,
            gain_at_omega0,
        });
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    write_json(
        args.output.out.as_deref(),
        &Report {
            schema_version: crate::output::SCHEMA_VERSION,
            generated_unix: timestamp(no_timestamp),
            command: "excite",
            warnings,
            body: ExciteBody {
                shape: shape.spec,
                model,
                modes,
            },
        },
    )
}

#[derive(Serialize)]
struct Residuals {
    /// Largest pairwise gaps on `|lambda| <= 0.9 |lambda_1|`.
    series_vs_product: f64,
    series_vs_direct: f64,
    product_vs_direct: f64,
    logderiv_at_0_3: f64,
}

#[derive(Serialize)]
struct FredholmBody {
    shape: serde_json::Value,
    size: usize,
    lambda_1: f64,
    trusted_order: usize,
    q: Vec<f64>,
    b: Vec<String>,
    residuals: Residuals,
}

pub fn fredholm(args: &FredholmArgs, no_timestamp: bool) -> Result<(), Failure> {
    if args.orders == 0 {
        return Err(input_error("--orders must be at least 1"));
    }
    let shape = load(&args.disc.shape, args.disc.refinement)?;
    let op = assemble(&shape, args.disc.n, true, LayerArg::Single)?;
    let traces = iterated_traces(&op, args.orders).numerical()?;
    let coeffs = determinant_coeffs(&traces, args.orders).numerical()?;
    let sp = eigenpairs(&op, DEFAULT_REALNESS_TOL).numerical()?;
    let l1 = sp
        .modes
        .first()
        .map(|m| m.lambda.abs())
        .ok_or_else(|| Failure::Numerical(anyhow::anyhow!("deflated operator has no finite eigenvalue")))?;

    let mut worst = [0.0f64; 3];
    for j in 0..=90 {
        let x = 0.9 * l1 * j as f64 / 90.0;
        let a = coeffs.eval(x);
        let b = determinant_product(&sp, x).numerical()?;
        let d = determinant_direct(&op, x);
        worst[0] = worst[0].max((a - b).abs());
        worst[1] = worst[1].max((a - d).abs());
        worst[2] = worst[2].max((b - d).abs());
    }
    let logd = logderiv_residual(&coeffs, &traces, 0.3 * l1).numerical()?;

    // Beyond this order the traces sink below double-precision roundoff.
    let trusted_order = ((1e-13f64).ln() / (-2.0 * l1.ln())).floor().max(1.0) as usize;
    let mut warnings = Vec::new();
    if args.orders > trusted_order {
        warnings.push(format!(
            "orders {} exceed the trusted order {trusted_order}; high traces are roundoff dominated",
            args.orders
        ));
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let ts = timestamp(no_timestamp);
    if let Some(path) = &args.csv {
        write_with(path, |buf| {
            buf.extend_from_slice(csv_stamp(ts).as_bytes());
            write_csv(buf, &traces, &coeffs)
        })?;
    }
    let digits = Some(20);
    write_json(
        args.output.out.as_deref(),
        &Report {
            schema_version: crate::output::SCHEMA_VERSION,
            generated_unix: ts,
            command: "fredholm",
            warnings,
            body: FredholmBody {
                shape: shape.spec,
                size: op.dim(),
                lambda_1: l1,
                trusted_order,
                q: (1..=traces.n_max()).map(|n| traces.q_f64(n)).collect(),
                b: coeffs.b.iter().map(|b| b.to_string_radix(10, digits)).collect(),
                residuals: Residuals {
                    series_vs_product: worst[0],
                    series_vs_direct: worst[1],
                    product_vs_direct: worst[2],
                    logderiv_at_0_3: logd,
                },
            },
        },
    )
}
