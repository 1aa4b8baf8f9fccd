use np_spectra::riemann::{
    grommer_hankel, q_from_c, synthetic_off_axis_traces, write_coeff_csv, write_zeros, xi_coeffs, xi_zeros,
    HankelCheck, PrecisionContext, RiemannError, XiCoeffs,
};
use serde::Serialize;

use crate::args::{GrommerArgs, XiArgs};
use crate::output::{csv_stamp, input_error, timestamp, write_json, write_with, Classify, Failure, Report};

/// Hankel checks of size `N + 1` need roughly `7N + 10` digits before the
/// smallest eigenvalue rises above roundoff.
pub fn grommer_digits(big_n: usize) -> u32 {
    7 * big_n as u32 + 10
}

fn guard(digits: u32, big_n: usize) -> Result<(), Failure> {
    let need = grommer_digits(big_n);
    if digits < need {
        return Err(input_error(format!(
            "Hankel check up to N = {big_n} needs at least {need} digits, got {digits}: precision below feasibility threshold"
        )));
    }
    Ok(())
}

fn context(digits: u32) -> Result<PrecisionContext, Failure> {
    PrecisionContext::new(digits).input()
}

/// Coefficients through order `n`, with at least `zeros_to` covered by the series.
fn coefficients(n: usize, zeros_to: f64, ctx: &PrecisionContext) -> Result<XiCoeffs, Failure> {
    let need = n.max((1.5 * zeros_to).ceil() as usize + 30);
    xi_coeffs(need, ctx).numerical()
}

#[derive(Serialize)]
struct HankelRow {
    n: usize,
    min_eigenvalue: String,
    positive: bool,
}

fn rows(checks: Vec<(usize, HankelCheck)>, digits: u32) -> Vec<HankelRow> {
    checks
        .into_iter()
        .map(|(n, h)| HankelRow {
            n,
            min_eigenvalue: h.min_eigenvalue.to_string_radix(10, Some(digits as usize)),
            positive: h.positive,
        })
        .collect()
}

#[derive(Serialize)]
struct XiBody {
    digits: u32,
    c: Vec<String>,
    q: Vec<String>,
    c_positive: bool,
    q_positive: bool,
    zeros: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grommer: Option<Vec<HankelRow>>,
}

pub fn xi(args: &XiArgs, no_timestamp: bool) -> Result<(), Failure> {
    if let Some(n) = args.grommer {
        guard(args.digits, n)?;
    }
    let ctx = context(args.digits)?;
    if args.orders == 0 {
        return Err(input_error("--orders must be at least 1"));
    }
    let mut orders = args.orders;
    if let Some(n) = args.grommer {
        orders = orders.max(2 * n + 1);
    }
    let coeffs = coefficients(orders, args.zeros_to, &ctx)?;
    let traces = q_from_c(&coeffs, orders, &ctx).numerical()?;
    let zeros = if args.zeros_to > 0.0 {
        match xi_zeros(0.0, args.zeros_to, &coeffs, &ctx) {
            Ok(z) => z,
            Err(RiemannError::InsufficientOrder { .. }) => {
                let more = coefficients(2 * coeffs.n_max(), args.zeros_to, &ctx)?;
                xi_zeros(0.0, args.zeros_to, &more, &ctx).numerical()?
            }
            Err(e) => return Err(Failure::Numerical(e.into())),
        }
    } else {
        Vec::new()
    };
    let grommer = match args.grommer {
        Some(big_n) => {
            let mut out = Vec::new();
            for n in 0..=big_n {
                out.push((n, grommer_hankel(&traces, n).numerical()?));
            }
            Some(rows(out, args.digits))
        }
        None => None,
    };

    let digits = Some(args.digits as usize);
    let c: Vec<String> = (0..=args.orders)
        .map(|n| coeffs.c(n).to_string_radix(10, digits))
        .collect();
    let q: Vec<String> = (1..=args.orders)
        .map(|n| traces.q(n).to_string_radix(10, digits))
        .collect();
    let c_positive = (0..=args.orders).all(|n| *coeffs.c(n) > 0);
    let q_positive = (1..=args.orders).all(|n| *traces.q(n) > 0);
    let mut warnings = Vec::new();
    if !c_positive || !q_positive {
        warnings.push("a coefficient or trace is not positive".to_string());
    }
    if let Some(g) = &grommer {
        if g.iter().any(|r| !r.positive) {
            warnings.push("a Hankel form is not positive".to_string());
        }
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let ts = timestamp(no_timestamp);
    if let Some(path) = &args.csv {
        let table = XiCoeffs {
            c: coeffs.c[..=args.orders].to_vec(),
        };
        write_with(path, |buf| {
            buf.extend_from_slice(csv_stamp(ts).as_bytes());
            write_coeff_csv(buf, &table, Some(&traces), &ctx)
        })?;
    }
    if let Some(path) = &args.zeros_out {
        write_with(path, |buf| {
            buf.extend_from_slice(csv_stamp(ts).as_bytes());
            write_zeros(buf, &zeros, &ctx)
        })?;
    }
    write_json(
        args.output.out.as_deref(),
        &Report {
            schema_version: crate::output::SCHEMA_VERSION,
            generated_unix: ts,
            command: "xi",
            warnings,
            body: XiBody {
                digits: args.digits,
                c,
                q,
                c_positive,
                q_positive,
                zeros: zeros.iter().map(|z| z.to_string_radix(10, digits)).collect(),
                grommer,
            },
        },
    )
}

#[derive(Serialize)]
struct GrommerBody {
    digits: u32,
    source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    synthetic_zero: Option<(f64, f64)>,
    checks: Vec<HankelRow>,
    all_positive: bool,
}

pub fn grommer_check(args: &GrommerArgs, no_timestamp: bool) -> Result<(), Failure> {
    guard(args.digits, args.max_n)?;
    let ctx = context(args.digits)?;
    let orders = 2 * args.max_n + 1;
    let (traces, source, synthetic_zero) = match &args.synthetic {
        Some(v) => {
            if v.len() != 2 {
                return Err(input_error("--synthetic takes re,im"));
            }
            (synthetic_off_axis_traces(v[0], v[1], orders, &ctx), "synthetic", Some((v[0], v[1])))
        }
        None => {
            let coeffs = coefficients(orders, 0.0, &ctx)?;
            (q_from_c(&coeffs, orders, &ctx).numerical()?, "xi", None)
        }
    };
    let mut checks = Vec::new();
    for n in 0..=args.max_n {
        checks.push((n, grommer_hankel(&traces, n).numerical()?));
    }
    let checks = rows(checks, args.digits);
    let all_positive = checks.iter().all(|r| r.positive);
    write_json(
        args.output.out.as_deref(),
        &Report {
            schema_version: crate::output::SCHEMA_VERSION,
            generated_unix: timestamp(no_timestamp),
            command: "grommer-check",
            warnings: Vec::new(),
            body: GrommerBody {
                digits: args.digits,
                source,
                synthetic_zero,
                checks,
                all_positive,
            },
        },
    )
}
