use serde::{Deserialize, Serialize};

use mlfrac::acceptance::{run_criterion, Verdict};
use mlfrac::diagnostics::{
    default_ratio, holder_seminorm, oscillation_decay, point_estimate_scenario, OscillationReport, PointEstimateReport,
    PointEstimateSetup, Region,
};
use mlfrac::kernels::{FractionalOrder, SpatialKernelSpec};
use mlfrac::parabolic_solver::{Forcing, SolverConfig, SpaceTimeField};

use crate::error::{CliError, CliResult};
use crate::io::{read_field, read_json, write_json};
use crate::{AcceptanceArgs, DiagnoseArgs, DiagnoseMode};

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct OscParams {
    alpha: f64,
    sigma: f64,
    depth: usize,
    /// defaults to min(1/4, 4^{−α/(2σ)})
    #[serde(default)]
    ratio: Option<f64>,
    #[serde(default)]
    center_x: f64,
    /// defaults to the last time node
    #[serde(default)]
    center_t: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct HolderParams {
    alpha: f64,
    sigma: f64,
    kappa: f64,
    /// defaults to the whole field
    #[serde(default)]
    region: Option<Region>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PointParams {
    alpha: f64,
    sigma: f64,
    mu: f64,
    #[serde(default = "one")]
    lambda: f64,
    #[serde(default = "one", rename = "Lambda")]
    lambda_upper: f64,
    #[serde(default)]
    baseline: Option<f64>,
    #[serde(default)]
    half_width: Option<f64>,
    #[serde(default)]
    n_points: Option<usize>,
    #[serde(default)]
    kappa: Option<usize>,
}

fn one() -> f64 {
    1.0
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum Report {
    Osc {
        params: OscParams,
        ratio: f64,
        #[serde(flatten)]
        result: OscillationReport,
    },
    Holder {
        params: HolderParams,
        region: Region,
        seminorm: f64,
    },
    PointEstimate {
        params: PointParams,
        setup: PointEstimateSetup,
        #[serde(flatten)]
        result: PointEstimateReport,
    },
}

fn field(args: &DiagnoseArgs) -> CliResult<SpaceTimeField> {
    match &args.field {
        Some(p) => read_field(p),
        None => Err(CliError::validation("arguments", "--field is required for this mode")),
    }
}

pub fn diagnose(args: &DiagnoseArgs) -> CliResult<i32> {
    let report = match args.mode {
        DiagnoseMode::Osc => {
            let p: OscParams = read_json(&args.params)?;
            let u = field(args)?;
            let ratio = p.ratio.unwrap_or_else(|| default_ratio(p.alpha, p.sigma));
            let center = (p.center_x, p.center_t.unwrap_or(u.tgrid.b));
            let result = oscillation_decay(&u, ratio, p.depth, center, p.sigma, p.alpha)?;
            Report::Osc {
                params: p,
                ratio,
                result,
            }
        }
        DiagnoseMode::Holder => {
            let p: HolderParams = read_json(&args.params)?;
            let u = field(args)?;
            let region = p.region.unwrap_or_else(|| Region::whole(&u));
            let seminorm = holder_seminorm(&u, p.kappa, p.alpha, p.sigma, &region)?;
            Report::Holder {
                params: p,
                region,
                seminorm,
            }
        }
        DiagnoseMode::PointEstimate => {
            let p: PointParams = read_json(&args.params)?;
            let d = PointEstimateSetup::default();
            let setup = PointEstimateSetup {
                baseline: p.baseline.unwrap_or(d.baseline),
                half_width: p.half_width.unwrap_or(d.half_width),
                n_points: p.n_points.unwrap_or(d.n_points),
                kappa: p.kappa.unwrap_or(d.kappa),
            };
            let cfg = SolverConfig::new(
                FractionalOrder::new(p.alpha)?,
                SpatialKernelSpec::calibrated(p.sigma, p.lambda, p.lambda_upper)?,
                Forcing::Zero,
            );
            let result = point_estimate_scenario(&cfg, p.mu, &setup)?;
            Report::PointEstimate {
                params: p,
                setup,
                result,
            }
        }
    };
    write_json(&args.out, &report)?;
    Ok(0)
}

#[derive(Serialize)]
struct AcceptanceReport<'a> {
    seed: u64,
    passed: usize,
    total: usize,
    criteria: &'a [Verdict],
}

pub fn acceptance(args: &AcceptanceArgs, seed: u64) -> CliResult<i32> {
    let ids: Vec<usize> = if args.only.is_empty() {
        (1..=12).collect()
    } else {
        args.only.clone()
    };
    if let Some(bad) = ids.iter().find(|id| !(1..=12).contains(*id)) {
        return Err(CliError::validation(
            "arguments",
            format!("no criterion {bad}; valid ids are 1..=12"),
        ));
    }
    let mut verdicts = Vec::with_capacity(ids.len());
    for id in ids {
        let v = run_criterion(id, seed);
        println!("{v}");
        verdicts.push(v);
    }
    let passed = verdicts.iter().filter(|v| v.passed).count();
    println!("{passed}/{} passed", verdicts.len());
    if let Some(path) = &args.json {
        let report = AcceptanceReport {
            seed,
            passed,
            total: verdicts.len(),
            criteria: &verdicts,
        };
        write_json(path, &report)?;
    }
    Ok(if passed == verdicts.len() { 0 } else { 2 })
}
