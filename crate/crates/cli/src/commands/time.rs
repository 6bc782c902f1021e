use rayon::prelude::*;
use serde::Serialize;

use mlfrac::ab_operators::{
    ab_caputo_form, ab_derivative, ab_integral, discrete_l, l_operator_series, TimeGrid, TimeSeries,
};
use mlfrac::fode::{
    fode_residual, max_abs, solve_c1_zero, solve_general, CandidateReport, FodeMethod, FodeProblem, Source,
};
use mlfrac::kernels::FractionalOrder;

use crate::error::{CliError, CliResult};
use crate::io::{check_times, csv_text, fmt, read_columns, write_atomic, write_json};
use crate::{AbApplyArgs, AbForm, FodeSolveArgs};

const RESIDUAL_QUAD_TOL: f64 = 1e-10;

fn write_series(path: &std::path::Path, s: &TimeSeries, column: &str) -> CliResult<()> {
    let rows: Vec<Vec<String>> = s
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| vec![fmt(s.grid.t(k)), fmt(*v)])
        .collect();
    write_atomic(path, &csv_text(&["t", column], &rows)?)
}

pub fn ab_apply(args: &AbApplyArgs) -> CliResult<i32> {
    let order = FractionalOrder::new(args.alpha)?;
    let grid = TimeGrid::new(args.a, args.b, args.kappa)?;
    let cols = read_columns(&args.input, &["t", "u"])?;
    let what = args.input.display().to_string();
    check_times(&cols[0], &grid, &what)?;
    let series = TimeSeries::new(grid, cols[1].clone())?;
    let interp = series.interpolant()?;
    let tol = args.quad_tol;
    let a = grid.a;

    // the operators over [a, a] are zero except the integral's local term
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| -> mlfrac::Result<f64> {
            let t = grid.t(k);
            match args.form {
                AbForm::Integral => ab_integral(&|s| interp.eval(s), &order, a, t, tol),
                AbForm::Discrete => discrete_l(&series, &order, k),
                _ if k == 0 => Ok(0.0),
                AbForm::Deriv => ab_derivative(&|s| interp.derivative(s), &order, a, t, tol),
                AbForm::Caputo => ab_caputo_form(&|s| interp.eval(s), &order, a, t, tol),
                AbForm::History => l_operator_series(&series, &order, t, tol),
            }
        })
        .collect::<mlfrac::Result<_>>()?;
    write_series(&args.output, &TimeSeries::new(grid, out)?, "u")?;
    Ok(0)
}

fn parse_source(spec: &str) -> CliResult<Source> {
    match spec.trim().strip_prefix("csv:") {
        Some(path) => {
            let cols = read_columns(std::path::Path::new(path), &["t", "h"])?;
            let mut it = cols.into_iter();
            let (ts, hs) = (it.next().unwrap_or_default(), it.next().unwrap_or_default());
            Ok(Source::from_samples(ts, hs)?)
        }
        None => Ok(Source::parse(spec)?),
    }
}

#[derive(Serialize)]
struct FodeReport {
    alpha: f64,
    c0: f64,
    c1: f64,
    source: String,
    u0: f64,
    start: f64,
    end: f64,
    kappa: usize,
    solver: &'static str,
    chosen: Option<FodeMethod>,
    candidates: Vec<CandidateReport>,
    /// sup-norm gap between the two-kernel formula and the chosen solution
    discrepancy: Option<f64>,
    max_residual: f64,
    residual: Vec<f64>,
}

pub fn fode_solve(args: &FodeSolveArgs) -> CliResult<i32> {
    if !(args.tol > 0.0) {
        return Err(CliError::validation(
            "tol",
            format!("tolerance must be positive, got {}", args.tol),
        ));
    }
    let order = FractionalOrder::new(args.alpha)?;
    let source = parse_source(&args.h)?;
    let label = source.label.clone();
    let p = FodeProblem::new(order, args.c0, args.c1, source, args.u0, args.start, args.end)?;
    let grid = TimeGrid::new(args.start, args.end, args.kappa)?;

    let (series, solver, chosen, candidates, discrepancy, residual) = if args.c1 == 0.0 {
        let u = solve_c1_zero(&p, &grid)?;
        let r = fode_residual(&u, &p, RESIDUAL_QUAD_TOL)?;
        (u, "c1_zero", None, Vec::new(), None, r)
    } else {
        let arb = solve_general(&p, &grid, args.tol)?;
        (
            arb.series,
            "general",
            Some(arb.chosen),
            arb.candidates,
            Some(arb.discrepancy),
            arb.residual,
        )
    };
    write_series(&args.out, &series, "u")?;
    if let Some(path) = &args.residual_report {
        let report = FodeReport {
            alpha: args.alpha,
            c0: args.c0,
            c1: args.c1,
            source: label,
            u0: args.u0,
            start: args.start,
            end: args.end,
            kappa: args.kappa,
            solver,
            chosen,
            candidates,
            discrepancy,
            max_residual: max_abs(&residual),
            residual,
        };
        write_json(path, &report)?;
    }
    Ok(0)
}
