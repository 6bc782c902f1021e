//! Artifact reading and writing. Every file is written to a temporary file in
//! the target directory and renamed into place.

use std::io::Write;
use std::path::Path;

use mlfrac::ab_operators::TimeGrid;
use mlfrac::nonlocal_space::{FarField, SpaceGrid};
use mlfrac::parabolic_solver::SpaceTimeField;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Relative tolerance when matching stored coordinates against a grid.
const COORD_TOL: f64 = 1e-9;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::from(e.error))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation("io", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation("schema", format!("{}: {e}", path.display())))
}

/// Shortest representation that parses back to the same value.
pub fn fmt(v: f64) -> String {
    format!("{v:?}")
}

/// CSV text from a header and rows of preformatted cells.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| CliError::validation("csv", e.to_string()))
}

/// Reads the named numeric columns of a CSV file (header required, `#` lines skipped).
pub fn read_columns(path: &Path, names: &[&str]) -> CliResult<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::validation("io", format!("cannot read {}: {e}", path.display())))?;
    let header = rdr.headers()?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| CliError::validation("csv", format!("{} has no column '{n}'", path.display())))
        })
        .collect::<CliResult<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (c, &i) in idx.iter().enumerate() {
            let cell = rec.get(i).unwrap_or("");
            let v: f64 = cell.parse().map_err(|_| {
                CliError::validation(
                    "csv",
                    format!("{} row {}: '{cell}' is not a number", path.display(), line + 1),
                )
            })?;
            if !v.is_finite() {
                return Err(CliError::validation(
                    "csv",
                    format!("{} row {}: non-finite value", path.display(), line + 1),
                ));
            }
            cols[c].push(v);
        }
    }
    if cols[0].is_empty() {
        return Err(CliError::validation(
            "csv",
            format!("{} has no data rows", path.display()),
        ));
    }
    Ok(cols)
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= COORD_TOL * scale.max(1.0)
}

/// Checks stored times against the nodes of `grid`.
pub fn check_times(ts: &[f64], grid: &TimeGrid, what: &str) -> CliResult<()> {
    if ts.len() != grid.len() {
        return Err(CliError::validation(
            "shape",
            format!("{what} has {} rows, the grid has {} nodes", ts.len(), grid.len()),
        ));
    }
    let scale = grid.a.abs().max(grid.b.abs());
    for (k, &t) in ts.iter().enumerate() {
        if !close(t, grid.t(k), scale) {
            return Err(CliError::validation(
                "grid",
                format!("{what}: time {t} in row {k} does not match the grid node {}", grid.t(k)),
            ));
        }
    }
    Ok(())
}

/// The symmetric uniform grid through the given coordinates.
pub fn space_grid_from_nodes(xs: &[f64], far_field: FarField, what: &str) -> CliResult<SpaceGrid> {
    let n = xs.len();
    if n == 1 {
        return Err(CliError::validation(
            "grid",
            format!("{what}: a single node does not define a grid"),
        ));
    }
    let half = xs[n - 1];
    let grid = SpaceGrid::new(half, n, far_field).map_err(|e| CliError::validation("grid", format!("{what}: {e}")))?;
    for (j, &x) in xs.iter().enumerate() {
        if !close(x, grid.x(j), half) {
            return Err(CliError::validation(
                "grid",
                format!(
                    "{what}: nodes must be uniform and symmetric about 0 (node {j} is {x}, expected {})",
                    grid.x(j)
                ),
            ));
        }
    }
    Ok(grid)
}

/// `zero`, `none` or `constant:v`.
pub fn parse_far_field(spec: &str) -> CliResult<FarField> {
    match spec.trim() {
        "zero" => Ok(FarField::Zero),
        "none" => Ok(FarField::None),
        s => match s.strip_prefix("constant:") {
            Some(v) => v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(|value| FarField::Constant { value })
                .ok_or_else(|| CliError::validation("far_field", format!("bad constant in '{spec}'"))),
            None => Err(CliError::validation(
                "far_field",
                format!("unknown far field '{spec}' (expected zero, none or constant:v)"),
            )),
        },
    }
}

pub fn far_field_label(f: &FarField) -> String {
    match f {
        FarField::None => "none".into(),
        FarField::Zero => "zero".into(),
        FarField::Constant { value } => format!("constant:{}", fmt(*value)),
        FarField::PowerGrowth { nu, coef, offset } => format!("power:{},{},{}", fmt(*nu), fmt(*coef), fmt(*offset)),
    }
}

/// Field file: `#` metadata lines, then a header `t,<x_0>,…,<x_{N−1}>` and
/// one row per time node.
pub fn write_field(path: &Path, u: &SpaceTimeField) -> CliResult<()> {
    let (tg, xg) = (&u.tgrid, &u.xgrid);
    let mut out = String::new();
    out.push_str("# mlfrac field\n");
    out.push_str(&format!(
        "# a={} b={} kappa={} L={} N={} far_field={}\n",
        fmt(tg.a),
        fmt(tg.b),
        tg.kappa,
        fmt(xg.half_width),
        xg.n_points,
        far_field_label(&xg.far_field)
    ));
    let mut header = vec!["t".to_string()];
    header.extend(xg.nodes().into_iter().map(fmt));
    let rows: Vec<Vec<String>> = (0..tg.len())
        .map(|k| {
            let mut r = vec![fmt(tg.t(k))];
            r.extend(u.values[k].iter().map(|v| fmt(*v)));
            r
        })
        .collect();
    let head: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut bytes = out.into_bytes();
    bytes.extend(csv_text(&head, &rows)?);
    write_atomic(path, &bytes)
}

pub fn read_field(path: &Path) -> CliResult<SpaceTimeField> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation("io", format!("cannot read {}: {e}", path.display())))?;
    let what = path.display().to_string();
    let mut meta = std::collections::BTreeMap::new();
    for line in text.lines().filter(|l| l.starts_with('#')) {
        for item in line.trim_start_matches('#').split_whitespace() {
            if let Some((k, v)) = item.split_once('=') {
                meta.insert(k.to_string(), v.to_string());
            }
        }
    }
    let get = |k: &str| -> CliResult<&String> {
        meta.get(k)
            .ok_or_else(|| CliError::validation("field", format!("{what}: metadata is missing '{k}'")))
    };
    let num = |k: &str| -> CliResult<f64> {
        get(k)?
            .parse()
            .map_err(|_| CliError::validation("field", format!("{what}: metadata '{k}' is not a number")))
    };
    let int = |k: &str| -> CliResult<usize> {
        get(k)?
            .parse()
            .map_err(|_| CliError::validation("field", format!("{what}: metadata '{k}' is not an integer")))
    };
    let tg = TimeGrid::new(num("a")?, num("b")?, int("kappa")?)
        .map_err(|e| CliError::validation("field", format!("{what}: {e}")))?;
    let far = parse_far_field(get("far_field")?)?;
    let xg =
        SpaceGrid::new(num("L")?, int("N")?, far).map_err(|e| CliError::validation("field", format!("{what}: {e}")))?;

    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.len() != xg.n_points + 1 || header.get(0) != Some("t") {
        return Err(CliError::validation(
            "field",
            format!("{what}: header must be t followed by {} node coordinates", xg.n_points),
        ));
    }
    for (j, h) in header.iter().skip(1).enumerate() {
        let x: f64 = h
            .parse()
            .map_err(|_| CliError::validation("field", format!("{what}: header cell '{h}' is not a coordinate")))?;
        if !close(x, xg.x(j), xg.half_width) {
            return Err(CliError::validation(
                "grid",
                format!("{what}: column {j} is x={x}, expected {}", xg.x(j)),
            ));
        }
    }
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let mut row = Vec::with_capacity(xg.n_points);
        for (c, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                CliError::validation("field", format!("{what} row {}: '{cell}' is not a number", line + 1))
            })?;
            if c == 0 {
                ts.push(v);
            } else {
                row.push(v);
            }
        }
        values.push(row);
    }
    check_times(&ts, &tg, &what)?;
    Ok(SpaceTimeField::new(tg, xg, values)?)
}
