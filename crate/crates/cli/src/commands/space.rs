use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mlfrac::ab_operators::TimeGrid;
use mlfrac::kernels::{FractionalOrder, SpatialKernelSpec};
use mlfrac::nonlocal_space::{
    fractional_laplacian, pucci_minus, pucci_plus, ExtremalConstants, MeasureExponent, SampledField, SpaceGrid,
};
use mlfrac::parabolic_solver::{solve, Forcing, SolverConfig, StepDiagnostics};

use crate::error::{CliError, CliResult};
use crate::io::{
    csv_text, fmt, parse_far_field, read_columns, read_field, read_json, space_grid_from_nodes, write_atomic,
    write_field, write_json,
};
use crate::{MeasureArg, PdeSolveArgs, SpaceApplyArgs, SpaceOp};

pub fn space_apply(args: &SpaceApplyArgs) -> CliResult<i32> {
    let far = parse_far_field(&args.far_field)?;
    let cols = read_columns(&args.field, &["x", "u"])?;
    let grid = space_grid_from_nodes(&cols[0], far, &args.field.display().to_string())?;
    let field = SampledField::new(grid, cols[1].clone())?;
    let measure = match args.measure {
        MeasureArg::Sigma => MeasureExponent::Sigma,
        MeasureArg::TwoSigma => MeasureExponent::TwoSigma,
    };
    let constants = ExtremalConstants::new(args.lambda, args.lambda_upper)?;
    let spec = match args.op {
        SpaceOp::Lap => Some(SpatialKernelSpec::calibrated(
            args.sigma,
            args.lambda,
            args.lambda_upper,
        )?),
        _ => None,
    };
    let tol = args.quad_tol;
    let out: Vec<f64> = (0..grid.n_points)
        .into_par_iter()
        .map(|j| {
            let x = grid.x(j);
            match (args.op, &spec) {
                (SpaceOp::Lap, Some(s)) => fractional_laplacian(&field, s, x, tol),
                (SpaceOp::Mplus, _) => pucci_plus(&field, x, &constants, args.sigma, measure, tol),
                _ => pucci_minus(&field, x, &constants, args.sigma, measure, tol),
            }
        })
        .collect::<mlfrac::Result<_>>()?;
    let rows: Vec<Vec<String>> = (0..grid.n_points).map(|j| vec![fmt(grid.x(j)), fmt(out[j])]).collect();
    write_atomic(&args.out, &csv_text(&["x", "u"], &rows)?)?;
    Ok(0)
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum InitialSpec {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    alpha: f64,
    sigma: f64,
    lambda: f64,
    #[serde(rename = "Lambda")]
    lambda_upper: f64,
    a: f64,
    b: f64,
    kappa: usize,
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(rename = "N")]
    n_points: usize,
    g: String,
    u0: InitialSpec,
    far_field: String,
    #[serde(default)]
    linear_solver_tol: Option<f64>,
    #[serde(default)]
    max_iterations: Option<usize>,
    #[serde(default)]
    max_history: Option<usize>,
}

fn numbers(spec: &str, args: &str, n: usize) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = args
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::validation("config", format!("bad numbers in '{spec}'")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::validation(
            "config",
            format!("'{spec}' needs {n} finite numbers"),
        ));
    }
    Ok(v)
}

// paths inside the config are relative to the config file
fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p.trim());
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// amp·exp(−x²/(2w²))
fn gaussian(spec: &str, args: &str) -> CliResult<(f64, f64)> {
    let v = numbers(spec, args, 2)?;
    if !(v[1] > 0.0) {
        return Err(CliError::validation(
            "config",
            format!("gaussian width must be positive in '{spec}'"),
        ));
    }
    Ok((v[0], v[1]))
}

fn initial_values(spec: &InitialSpec, grid: &SpaceGrid, base: &Path) -> CliResult<Vec<f64>> {
    let xs = grid.nodes();
    let text = match spec {
        InitialSpec::Number(v) if v.is_finite() => return Ok(vec![*v; xs.len()]),
        InitialSpec::Number(v) => return Err(CliError::validation("config", format!("u0 must be finite, got {v}"))),
        InitialSpec::Text(s) => s.trim(),
    };
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    match kind {
        "const" => Ok(vec![numbers(text, rest, 1)?[0]; xs.len()]),
        "gaussian" => {
            let (amp, w) = gaussian(text, rest)?;
            Ok(xs.iter().map(|x| amp * (-x * x / (2.0 * w * w)).exp()).collect())
        }
        "indicator" => {
            let v = numbers(text, rest, 2)?;
            Ok(xs
                .iter()
                .map(|x| if *x >= v[0] && *x <= v[1] { 1.0 } else { 0.0 })
                .collect())
        }
        "csv" => {
            let path = resolve(base, rest);
            let cols = read_columns(&path, &["x", "u"])?;
            let g = space_grid_from_nodes(&cols[0], grid.far_field, &path.display().to_string())?;
            if g.n_points != grid.n_points || (g.half_width - grid.half_width).abs() > 1e-9 * grid.half_width {
                return Err(CliError::validation(
                    "grid",
                    format!("{} does not match the configured grid", path.display()),
                ));
            }
            Ok(cols[1].clone())
        }
        _ => Err(CliError::validation(
            "config",
            format!("unknown u0 spec '{text}' (expected a number, const:, gaussian:, indicator: or csv:)"),
        )),
    }
}

fn forcing(spec: &str, tgrid: &TimeGrid, xgrid: &SpaceGrid, base: &Path) -> CliResult<Forcing> {
    let text = spec.trim();
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    match kind {
        "zero" if rest.is_empty() => Ok(Forcing::Zero),
        "const" => {
            let v = numbers(text, rest, 1)?[0];
            Ok(Forcing::function(move |_, _| v))
        }
        "gaussian" => {
            let (amp, w) = gaussian(text, rest)?;
            Ok(Forcing::function(move |_, x| amp * (-x * x / (2.0 * w * w)).exp()))
        }
        "csv" => {
            let path = resolve(base, rest);
            let f = read_field(&path)?;
            if f.tgrid != *tgrid || f.xgrid.n_points != xgrid.n_points || f.xgrid.half_width != xgrid.half_width {
                return Err(CliError::validation(
                    "grid",
                    format!("{} does not match the configured grids", path.display()),
                ));
            }
            Ok(Forcing::Sampled(f.values))
        }
        _ => Err(CliError::validation(
            "config",
            format!("unknown g spec '{text}' (expected zero, const:, gaussian: or csv:)"),
        )),
    }
}

#[derive(Serialize)]
struct Summary {
    steps: usize,
    total_iterations: usize,
    max_iterations: usize,
    max_residual: f64,
    #[serde(rename = "W")]
    w: f64,
    min_value: f64,
    max_value: f64,
}

#[derive(Serialize)]
struct DiagReport<'a> {
    config: &'a RunConfig,
    summary: Summary,
    steps: &'a [StepDiagnostics],
}

pub fn pde_solve(args: &PdeSolveArgs) -> CliResult<i32> {
    let cfg: RunConfig = read_json(&args.config)?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let order = FractionalOrder::new(cfg.alpha)?;
    let spatial = SpatialKernelSpec::calibrated(cfg.sigma, cfg.lambda, cfg.lambda_upper)?;
    let far = parse_far_field(&cfg.far_field)?;
    let tgrid = TimeGrid::new(cfg.a, cfg.b, cfg.kappa)?;
    let xgrid = SpaceGrid::new(cfg.half_width, cfg.n_points, far)?;
    let u0 = initial_values(&cfg.u0, &xgrid, base)?;
    let mut solver = SolverConfig::new(order, spatial, forcing(&cfg.g, &tgrid, &xgrid, base)?);
    if let Some(t) = cfg.linear_solver_tol {
        solver.linear_solver_tol = t;
    }
    if let Some(m) = cfg.max_iterations {
        solver.max_iterations = m;
    }
    solver.max_history = cfg.max_history;

    let sol = solve(&u0, &solver, &tgrid, &xgrid)?;
    write_field(&args.out, &sol.field)?;
    if let Some(path) = &args.diag {
        let d = &sol.diagnostics;
        let all = sol.field.values.iter().flatten();
        let summary = Summary {
            steps: d.len(),
            total_iterations: d.iter().map(|s| s.iterations).sum(),
            max_iterations: d.iter().map(|s| s.iterations).max().unwrap_or(0),
            max_residual: d.iter().fold(0.0, |m, s| m.max(s.residual)),
            w: d.first().map_or(0.0, |s| s.w),
            min_value: all.clone().fold(f64::INFINITY, |m, v| m.min(*v)),
            max_value: all.fold(f64::NEG_INFINITY, |m, v| m.max(*v)),
        };
        write_json(
            path,
            &DiagReport {
                config: &cfg,
                summary,
                steps: d,
            },
        )?;
    }
    Ok(0)
}
