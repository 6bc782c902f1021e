use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use mlfrac::kernels::{
    verify_time_kernel_envelope, verify_time_symmetry, FractionalOrder, TimeKernelKind, TimeKernelSpec,
};
use mlfrac::special_functions::{mittag_leffler_detailed, MLParams};

use crate::error::{CliError, CliResult};
use crate::io::{csv_text, fmt, write_atomic, write_json};
use crate::{KernelKindArg, KernelVerifyArgs, MlEvalArgs};

const SYMMETRY_SAMPLES: usize = 100;

/// `start:stop:n`, n ≥ 1 points including both ends.
fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::validation("grid", format!("grid '{spec}' must have the form start:stop:n"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i + 1 == n { stop } else { start + step * i as f64 })
        .collect())
}

pub fn ml_eval(args: &MlEvalArgs) -> CliResult<i32> {
    let params = MLParams::new(args.alpha, args.beta)?;
    if let Some(z) = args.z {
        let v = mittag_leffler_detailed(params, z)?;
        println!("{}", fmt(v.value));
        return Ok(0);
    }
    let zs = parse_grid(args.grid.as_deref().unwrap_or_default())?;
    let mut rows = Vec::with_capacity(zs.len());
    for z in zs {
        let v = mittag_leffler_detailed(params, z)?;
        rows.push(vec![
            fmt(z),
            fmt(v.value),
            v.method.as_str().to_string(),
            fmt(v.est_error),
        ]);
    }
    let bytes = csv_text(&["z", "value", "method", "est_error"], &rows)?;
    match &args.csv {
        Some(path) => write_atomic(path, &bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(0)
}

#[derive(Serialize)]
struct KernelReport {
    kind: TimeKernelKind,
    alpha: f64,
    horizon: f64,
    lambda_emp: f64,
    #[serde(rename = "Lambda_emp")]
    lambda_upper_emp: f64,
    holds: bool,
    symmetry_ok: bool,
    symmetry_samples: usize,
    seed: u64,
    grid: Vec<f64>,
    ratios: Vec<f64>,
}

pub fn kernel_verify(args: &KernelVerifyArgs, seed: u64) -> CliResult<i32> {
    let order = FractionalOrder::new(args.alpha)?;
    let kind = match args.kind {
        KernelKindArg::Ml => TimeKernelKind::MittagLeffler,
        KernelKindArg::Caputo => TimeKernelKind::CaputoPower,
    };
    let spec = TimeKernelSpec::new(order, args.horizon, kind)?;
    let env = verify_time_kernel_envelope(&spec, args.samples)?;

    // gaps stay above horizon/20 so rounding in t − (t − s) stays far below the tolerance
    let mut rng = StdRng::seed_from_u64(seed);
    let samples: Vec<(f64, f64)> = (0..SYMMETRY_SAMPLES)
        .map(|_| {
            let t = rng.gen_range(0.0..args.horizon);
            let s = args.horizon * rng.gen_range(0.05..1.0);
            (t, s)
        })
        .collect();
    let symmetry_ok = verify_time_symmetry(&spec, &samples)?;

    let report = KernelReport {
        kind,
        alpha: args.alpha,
        horizon: args.horizon,
        lambda_emp: env.lambda_emp,
        lambda_upper_emp: env.lambda_upper_emp,
        holds: env.holds,
        symmetry_ok,
        symmetry_samples: SYMMETRY_SAMPLES,
        seed,
        grid: env.grid,
        ratios: env.ratios,
    };
    match &args.json {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(0)
}
