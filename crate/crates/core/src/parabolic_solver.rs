//! Implicit time stepping for L u − J u = g on a uniform space-time lattice.
//!
//! Each step solves (W − J_h) u_k = history + g_k, where W = τ^α c_α Σ_{m≥1} w_m
//! collects every memory weight (the pre-history u(t) = u(a) for t < a is
//! folded into the history vector). J_h is the lattice operator built from
//! [`stencil_weights`] with a far-field closure outside the box.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ab_operators::{DiscreteWeights, TimeGrid, TimeSeries};
use crate::error::{Error, Result};
use crate::kernels::{FractionalOrder, SpatialKernelSpec};
use crate::nonlocal_space::{
    fractional_laplacian, stencil_tail, stencil_weights, FarField, FnField, SampledField, SpaceGrid,
};

/// Solution values on (κ+1) × N nodes; row k is time t_k.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub tgrid: TimeGrid,
    pub xgrid: SpaceGrid,
    pub values: Vec<Vec<f64>>,
}

impl SpaceTimeField {
    pub fn new(tgrid: TimeGrid, xgrid: SpaceGrid, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != tgrid.len() {
            return Err(Error::Shape(format!(
                "{} rows for {} time nodes",
                values.len(),
                tgrid.len()
            )));
        }
        for (k, row) in values.iter().enumerate() {
            if row.len() != xgrid.n_points {
                return Err(Error::Shape(format!(
                    "row {k} has {} values for {} space nodes",
                    row.len(),
                    xgrid.n_points
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Data(format!("row {k} contains non-finite values")));
            }
        }
        Ok(Self { tgrid, xgrid, values })
    }

    /// Field whose every row is `u0`.
    pub fn constant_in_time(tgrid: TimeGrid, xgrid: SpaceGrid, u0: &[f64]) -> Result<Self> {
        let rows = vec![u0.to_vec(); tgrid.len()];
        Self::new(tgrid, xgrid, rows)
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(tgrid: TimeGrid, xgrid: SpaceGrid, f: F) -> Result<Self> {
        let xs = xgrid.nodes();
        let values = tgrid
            .nodes()
            .iter()
            .map(|&t| xs.iter().map(|&x| f(t, x)).collect())
            .collect();
        Self::new(tgrid, xgrid, values)
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    /// Time series at spatial node j.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    pub fn max_abs_diff(&self, other: &SpaceTimeField) -> Result<f64> {
        if self.values.len() != other.values.len() || self.xgrid.n_points != other.xgrid.n_points {
            return Err(Error::Shape("fields live on different grids".into()));
        }
        let mut m: f64 = 0.0;
        for (r, s) in self.values.iter().zip(&other.values) {
            for (a, b) in r.iter().zip(s) {
                m = m.max((a - b).abs());
            }
        }
        Ok(m)
    }
}

/// Right-hand side g of the equation.
#[derive(Clone, Default)]
pub enum Forcing {
    #[default]
    Zero,
    Function(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
    /// One row per time node (row 0 is never used).
    Sampled(Vec<Vec<f64>>),
}

impl std::fmt::Debug for Forcing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Forcing::Zero => write!(f, "Zero"),
            Forcing::Function(_) => write!(f, "Function(..)"),
            Forcing::Sampled(r) => write!(f, "Sampled({} rows)", r.len()),
        }
    }
}

impl Forcing {
    pub fn function<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Forcing::Function(Arc::new(f))
    }

    pub fn row(&self, k: usize, t: f64, xgrid: &SpaceGrid) -> Result<Vec<f64>> {
        let n = xgrid.n_points;
        match self {
            Forcing::Zero => Ok(vec![0.0; n]),
            Forcing::Function(f) => Ok((0..n).map(|j| f(t, xgrid.x(j))).collect()),
            Forcing::Sampled(rows) => {
                let r = rows.get(k).ok_or(Error::Index {
                    index: k,
                    max: rows.len().saturating_sub(1),
                })?;
                if r.len() != n {
                    return Err(Error::Shape(format!(
                        "forcing row {k} has {} values, grid has {n}",
                        r.len()
                    )));
                }
                Ok(r.clone())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub order: FractionalOrder,
    pub spatial: SpatialKernelSpec,
    pub forcing: Forcing,
    /// stop when ‖r‖_∞ ≤ tol · max(1, ‖rhs‖_∞)
    pub linear_solver_tol: f64,
    pub max_iterations: usize,
    /// Keep only the last `max_history` weights exactly; older ones are
    /// lumped onto a single past row.
    pub max_history: Option<usize>,
}

impl SolverConfig {
    pub fn new(order: FractionalOrder, spatial: SpatialKernelSpec, forcing: Forcing) -> Self {
        Self {
            order,
            spatial,
            forcing,
            linear_solver_tol: 1e-13,
            max_iterations: 10_000,
            max_history: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.linear_solver_tol > 0.0) {
            return Err(Error::Config(format!(
                "linear solver tolerance must be positive, got {}",
                self.linear_solver_tol
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        if self.max_history == Some(0) {
            return Err(Error::Config("max_history must be at least 1".into()));
        }
        if self.spatial.dim != 1 {
            return Err(Error::Config(format!(
                "the solver is one-dimensional, got dim = {}",
                self.spatial.dim
            )));
        }
        Ok(())
    }
}

/// The lattice operator
/// J_h u_j = Σ_{i≠j} ω_{|i−j|} u_i − D u_j + b_j u_∞, with D = 2 Σ_{m≥1} ω_m and
/// b_j the weight of the exterior nodes (left and right of the box).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeOperator {
    /// ω_m for m = 0..N−1 (ω_0 = 0)
    pub omega: Vec<f64>,
    pub diag: f64,
    pub exterior: Vec<f64>,
    pub far_value: f64,
}

impl LatticeOperator {
    pub fn new(spatial: &SpatialKernelSpec, xgrid: &SpaceGrid) -> Result<Self> {
        let far_value = match xgrid.far_field {
            FarField::Zero => 0.0,
            FarField::Constant { value } => value,
            other => {
                return Err(Error::Config(format!(
                    "the solver needs a zero or constant far field, got {other:?}"
                )))
            }
        };
        let n = xgrid.n_points;
        if n == 1 {
            return Ok(Self {
                omega: vec![0.0],
                diag: 0.0,
                exterior: vec![0.0],
                far_value,
            });
        }
        let c = spatial.normalization;
        let omega: Vec<f64> = stencil_weights(spatial.sigma, xgrid.spacing, n - 1)
            .into_iter()
            .map(|w| c * w)
            .collect();
        if omega.iter().skip(1).any(|w| !(*w > 0.0)) {
            return Err(Error::Config("lattice weights must be positive".into()));
        }
        // suffix[m0] = Σ_{m>m0} ω_m, including the part beyond the box
        let mut suffix = vec![0.0; n];
        suffix[n - 1] = c * stencil_tail(spatial.sigma, xgrid.spacing, n - 1);
        for m0 in (0..n - 1).rev() {
            suffix[m0] = suffix[m0 + 1] + omega[m0 + 1];
        }
        let diag = 2.0 * suffix[0];
        let exterior = (0..n).map(|j| suffix[j] + suffix[n - 1 - j]).collect();
        Ok(Self {
            omega,
            diag,
            exterior,
            far_value,
        })
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    fn off_diagonal(&self, u: &[f64], j: usize) -> f64 {
        let mut s = 0.0;
        for (i, ui) in u.iter().enumerate() {
            if i != j {
                s += self.omega[i.abs_diff(j)] * ui;
            }
        }
        s
    }

    /// J_h u at every node.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.len() {
            return Err(Error::Shape(format!(
                "{} values for {} lattice nodes",
                u.len(),
                self.len()
            )));
        }
        Ok((0..u.len())
            .into_par_iter()
            .map(|j| self.off_diagonal(u, j) - self.diag * u[j] + self.exterior[j] * self.far_value)
            .collect())
    }

    /// (shift + D) u − Ω u.
    fn shifted_matvec(&self, shift: f64, u: &[f64]) -> Vec<f64> {
        (0..u.len())
            .into_par_iter()
            .map(|j| (shift + self.diag) * u[j] - self.off_diagonal(u, j))
            .collect()
    }

    /// Checks that shift·I − J_h has positive diagonal, nonpositive
    /// off-diagonal and strictly dominant rows.
    pub fn check_m_matrix(&self, shift: f64) -> Result<()> {
        if !(shift > 0.0) {
            return Err(Error::Config(format!("memory weight W must be positive, got {shift}")));
        }
        if self.omega.iter().skip(1).any(|w| *w < 0.0) {
            return Err(Error::Config(
                "off-diagonal entries of the system matrix must be nonpositive".into(),
            ));
        }
        let total: f64 = self.omega.iter().skip(1).sum();
        if self.exterior.iter().any(|b| *b < 0.0) || !(shift + self.diag > 0.0) {
            return Err(Error::Config("system matrix is not an M-matrix".into()));
        }
        // rows are dominant by W + b_j ≥ W > 0
        if self.len() > 1 && !(shift + self.diag - 2.0 * total >= -1e-12 * (shift + self.diag)) {
            return Err(Error::Config("system matrix rows are not diagonally dominant".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub k: usize,
    #[serde(rename = "W")]
    pub w: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: SpaceTimeField,
    pub diagnostics: Vec<StepDiagnostics>,
}

/// Precomputed weights and lattice operator for one run.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub cfg: SolverConfig,
    pub weights: DiscreteWeights,
    pub lattice: LatticeOperator,
    /// W = τ^α c_α Σ_{m≥1} w_m
    pub w_total: f64,
}

impl Stepper {
    pub fn new(cfg: &SolverConfig, tgrid: &TimeGrid, xgrid: &SpaceGrid) -> Result<Self> {
        cfg.validate()?;
        let weights = DiscreteWeights::new(&cfg.order, tgrid.tau, tgrid.kappa.max(1))?;
        let lattice = LatticeOperator::new(&cfg.spatial, xgrid)?;
        let w_total = weights.scale * weights.tail[0];
        lattice.check_m_matrix(w_total)?;
        Ok(Self {
            cfg: cfg.clone(),
            weights,
            lattice,
            w_total,
        })
    }

    /// τ^α c_α [Σ_{m=1}^{k} w_m u_{k−m} + H_k u_0] at every node. Under a
    /// history cap M the weights w_{M+1..k} are lumped onto u_{k−M−1}; the
    /// pre-history weight H_k stays on u_0.
    fn history(&self, rows: &[Vec<f64>], k: usize) -> Vec<f64> {
        let n = rows[0].len();
        let w = &self.weights.w;
        let h = &self.weights.tail;
        let (depth, lump_w, lump_row) = match self.cfg.max_history {
            Some(m) if k > m => (m, h[m] - h[k], k - m - 1),
            _ => (k, 0.0, 0),
        };
        (0..n)
            .into_par_iter()
            .map(|j| {
                let mut s = 0.0;
                for m in 1..=depth {
                    s += w[m] * rows[k - m][j];
                }
                s += lump_w * rows[lump_row][j];
                s += h[k] * rows[0][j];
                self.weights.scale * s
            })
            .collect()
    }

    /// Solves for row k given rows 0..k−1.
    pub fn step(&self, field: &mut SpaceTimeField, k: usize) -> Result<StepDiagnostics> {
        let kappa = field.tgrid.kappa;
        if k == 0 || k > kappa {
            return Err(Error::Index { index: k, max: kappa });
        }
        if field.xgrid.n_points != self.lattice.len() || kappa > self.weights.kappa() {
            return Err(Error::Shape("field does not match the stepper grids".into()));
        }
        let g = self.cfg.forcing.row(k, field.tgrid.t(k), &field.xgrid)?;
        let hist = self.history(&field.values, k);
        let lat = &self.lattice;
        let rhs: Vec<f64> = (0..g.len())
            .map(|j| hist[j] + g[j] + lat.exterior[j] * lat.far_value)
            .collect();
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite right-hand side at step {k}")));
        }
        let guess = field.values[k - 1].clone();
        let (x, iterations, residual) = conjugate_gradient(
            |v| lat.shifted_matvec(self.w_total, v),
            &rhs,
            guess,
            self.cfg.linear_solver_tol,
            self.cfg.max_iterations,
        )?;
        field.values[k] = x;
        Ok(StepDiagnostics {
            k,
            w: self.w_total,
            iterations,
            residual,
        })
    }
}

/// One implicit step on a field whose rows 0..k−1 are final.
pub fn step(field: &mut SpaceTimeField, cfg: &SolverConfig, k: usize) -> Result<StepDiagnostics> {
    let stepper = Stepper::new(cfg, &field.tgrid, &field.xgrid)?;
    stepper.step(field, k)
}

/// Runs every step from the initial row `u0`.
pub fn solve(u0: &[f64], cfg: &SolverConfig, tgrid: &TimeGrid, xgrid: &SpaceGrid) -> Result<Solution> {
    let mut field = SpaceTimeField::constant_in_time(*tgrid, *xgrid, u0)?;
    let stepper = Stepper::new(cfg, tgrid, xgrid)?;
    let mut diagnostics = Vec::with_capacity(tgrid.kappa);
    for k in 1..=tgrid.kappa {
        diagnostics.push(stepper.step(&mut field, k)?);
    }
    Ok(Solution { field, diagnostics })
}

// Plain CG (the diagonal is constant, so Jacobi scaling changes nothing).
// Dot products are sequential so results do not depend on the thread count.
fn conjugate_gradient<M: Fn(&[f64]) -> Vec<f64>>(
    matvec: M,
    rhs: &[f64],
    mut x: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize, f64)> {
    let norm_inf = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let target = tol * norm_inf(rhs).max(1.0);
    let ax = matvec(&x);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if norm_inf(&r) <= target {
        return Ok((x, 0, norm_inf(&r)));
    }
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for it in 1..=max_iter {
        let ap = matvec(&p);
        let alpha = rr / dot(&p, &ap);
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm_inf(&r) <= target {
            // confirm with the true residual
            let ax = matvec(&x);
            let res = norm_inf(&rhs.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>());
            if res <= 2.0 * target {
                return Ok((x, it, res));
            }
            r = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            p = r.clone();
            rr = dot(&r, &r);
            continue;
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::Solver {
        iterations: max_iter,
        residual: norm_inf(&r),
    })
}

/// Outcome of a manufactured-solution run with target U(t,x) = (t − a)·b(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedReport {
    pub kappa: usize,
    pub n_points: usize,
    /// max |L_h U − J_h U − g| over the lattice
    pub equation_residual: f64,
    /// max |u − U| for the solver output
    pub max_error: f64,
}

/// Forcing g_k = L_h U_k − J U_k: discrete in time, with the continuous
/// spatial operator applied to the profile by quadrature. The profile is
/// followed out to twice the box width (a cut at the box edge would make
/// J U infinite there), so it should be negligible beyond the box.
pub fn manufactured_forcing<F, G>(
    cfg: &SolverConfig,
    tgrid: &TimeGrid,
    xgrid: &SpaceGrid,
    profile: F,
    profile_d2: G,
    quad_tol: f64,
) -> Result<Forcing>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    if xgrid.far_field != FarField::Zero {
        return Err(Error::Config("manufactured runs use the zero far field".into()));
    }
    let field = FnField {
        f: profile,
        d2: profile_d2,
        far: FarField::Zero,
        reach: 2.0 * xgrid.half_width,
        panel: 0.0,
    };
    let xs = xgrid.nodes();
    let jb: Vec<f64> = xs
        .par_iter()
        .map(|&x| fractional_laplacian(&field, &cfg.spatial, x, quad_tol))
        .collect::<Result<_>>()?;
    let b: Vec<f64> = xs.iter().map(|&x| (field.f)(x)).collect();
    let phi: Vec<f64> = tgrid.nodes().iter().map(|t| t - tgrid.a).collect();
    let wts = DiscreteWeights::new(&cfg.order, tgrid.tau, tgrid.kappa.max(1))?;
    let mut rows = vec![vec![0.0; xs.len()]; tgrid.len()];
    for k in 1..tgrid.len() {
        let lphi = wts.apply(&phi, k)?;
        for j in 0..xs.len() {
            rows[k][j] = b[j] * lphi - phi[k] * jb[j];
        }
    }
    Ok(Forcing::Sampled(rows))
}

/// Solves with the manufactured forcing and compares with the target.
pub fn manufactured_run<F, G>(
    cfg: &SolverConfig,
    tgrid: &TimeGrid,
    xgrid: &SpaceGrid,
    profile: F,
    profile_d2: G,
    quad_tol: f64,
) -> Result<(Solution, ManufacturedReport)>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    let b: Vec<f64> = xgrid.nodes().iter().map(|&x| profile(x)).collect();
    let forcing = manufactured_forcing(cfg, tgrid, xgrid, profile, profile_d2, quad_tol)?;
    let mut run_cfg = cfg.clone();
    run_cfg.forcing = forcing;
    let target = SpaceTimeField::from_fn(*tgrid, *xgrid, |t, x| {
        let j = xgrid.nearest(x).unwrap_or(0);
        (t - tgrid.a) * b[j]
    })?;
    let equation_residual = equation_residual(&target, &run_cfg)?;
    let u0 = vec![0.0; xgrid.n_points];
    let sol = solve(&u0, &run_cfg, tgrid, xgrid)?;
    let max_error = sol.field.max_abs_diff(&target)?;
    let report = ManufacturedReport {
        kappa: tgrid.kappa,
        n_points: xgrid.n_points,
        equation_residual,
        max_error,
    };
    Ok((
        Solution {
            field: sol.field,
            diagnostics: sol.diagnostics,
        },
        report,
    ))
}

/// max_{k≥1, j} |L_h u − J_h u − g| for a given field.
pub fn equation_residual(u: &SpaceTimeField, cfg: &SolverConfig) -> Result<f64> {
    let wts = DiscreteWeights::new(&cfg.order, u.tgrid.tau, u.tgrid.kappa.max(1))?;
    let lat = LatticeOperator::new(&cfg.spatial, &u.xgrid)?;
    let mut worst: f64 = 0.0;
    for k in 1..u.tgrid.len() {
        let g = cfg.forcing.row(k, u.tgrid.t(k), &u.xgrid)?;
        let ju = lat.apply(&u.values[k])?;
        for j in 0..u.xgrid.n_points {
            let col = u.column(j);
            let lu = wts.apply(&col[..=k], k)?;
            worst = worst.max((lu - ju[j] - g[j]).abs());
        }
    }
    Ok(worst)
}

/// Terms of the discrete weak form Σ_k τ Σ_j dx ϑ (L_h u − J u − g).
///
/// `residual = time_form + boundary_history + test_operator + space_form − source`.
/// The time part is split by the discrete product rule into the symmetric
/// double sum, a boundary term carrying the weights H_{K−k} (the discrete
/// analogue of E_α[c(b−t)^α] − E_α[c(t−a)^α]) and −Σ u L_h ϑ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    pub time_form: f64,
    pub boundary_history: f64,
    pub test_operator: f64,
    pub space_form: f64,
    pub source: f64,
    pub residual: f64,
}

/// Weak-form residual of `u` against a test function ϑ(t,x). The spatial
/// term uses the continuous operator on the C¹ interpolant of each row, so
/// for a solver output it measures the consistency error of J_h.
pub fn weak_residual<T>(u: &SpaceTimeField, theta: T, cfg: &SolverConfig, quad_tol: f64) -> Result<WeakResidual>
where
    T: Fn(f64, f64) -> f64 + Sync,
{
    let (tg, xg) = (&u.tgrid, &u.xgrid);
    let kk = tg.kappa;
    let n = xg.n_points;
    let xs = xg.nodes();
    let ts = tg.nodes();
    let th: Vec<Vec<f64>> = ts.iter().map(|&t| xs.iter().map(|&x| theta(t, x)).collect()).collect();
    if th.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Data("test function is not finite on the grid".into()));
    }
    let wts = DiscreteWeights::new(&cfg.order, tg.tau, kk.max(1))?;
    let (w, h, scale) = (&wts.w, &wts.tail, wts.scale);
    let meas = tg.tau * xg.spacing;

    let per_node: Vec<(f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|j| -> Result<(f64, f64, f64)> {
            let uj: Vec<f64> = (0..=kk).map(|k| u.values[k][j]).collect();
            let pj: Vec<f64> = (0..=kk).map(|k| th[k][j]).collect();
            let mut sym = 0.0;
            for k in 0..=kk {
                for i in 0..k {
                    sym += w[k - i] * (uj[k] - uj[i]) * (pj[k] - pj[i]);
                }
                sym += h[k] * (uj[k] - uj[0]) * (pj[k] - pj[0]);
            }
            let q0 = uj[0] * pj[0];
            let mut bnd = 0.0;
            for k in 0..=kk {
                bnd += uj[k] * pj[k] * h[kk - k] - q0 * h[k];
            }
            let mut test = 0.0;
            for k in 1..=kk {
                test += uj[k] * wts.apply(&pj[..=k], k)?;
            }
            Ok((scale * sym, scale * bnd, -test))
        })
        .collect::<Result<_>>()?;

    let pairs: Vec<(usize, usize)> = (1..=kk)
        .flat_map(|k| (0..n).map(move |j| (k, j)))
        .filter(|&(k, j)| th[k][j] != 0.0)
        .collect();
    let rows: Vec<SampledField> = (0..=kk)
        .map(|k| SampledField::new(*xg, u.values[k].clone()))
        .collect::<Result<_>>()?;
    let space_terms: Vec<f64> = pairs
        .par_iter()
        .map(|&(k, j)| Ok(-th[k][j] * fractional_laplacian(&rows[k], &cfg.spatial, xs[j], quad_tol)?))
        .collect::<Result<_>>()?;
    let mut source = 0.0;
    for k in 1..=kk {
        let g = cfg.forcing.row(k, ts[k], xg)?;
        for j in 0..n {
            source += th[k][j] * g[j];
        }
    }

    let time_form = meas * per_node.iter().map(|p| p.0).sum::<f64>();
    let boundary_history = meas * per_node.iter().map(|p| p.1).sum::<f64>();
    let test_operator = meas * per_node.iter().map(|p| p.2).sum::<f64>();
    let space_form = meas * space_terms.iter().sum::<f64>();
    let source = meas * source;
    Ok(WeakResidual {
        time_form,
        boundary_history,
        test_operator,
        space_form,
        source,
        residual: time_form + boundary_history + test_operator + space_form - source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbpReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Σ_{k≤j} u_k L_h u_k ≥ ½ τ^α c_α Σ_{0≤i<k≤j} w_{k−i}(u_k − u_i)² for series
/// starting at zero.
pub fn discrete_ibp_check(u: &TimeSeries, order: &FractionalOrder, j: usize) -> Result<IbpReport> {
    let kk = u.grid.kappa;
    if j > kk {
        return Err(Error::Index { index: j, max: kk });
    }
    if u.values[0] != 0.0 {
        return Err(Error::Precondition(format!(
            "the series must start at zero, got u_0 = {}",
            u.values[0]
        )));
    }
    let wts = DiscreteWeights::new(order, u.grid.tau, kk.max(1))?;
    let v = &u.values;
    let mut lhs = 0.0;
    let mut sq = 0.0;
    for k in 1..=j {
        lhs += v[k] * wts.apply(&v[..=k], k)?;
        for i in 0..k {
            sq += wts.w[k - i] * (v[k] - v[i]).powi(2);
        }
    }
    let rhs = 0.5 * wts.scale * sq;
    Ok(IbpReport {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-12 * lhs.abs(),
    })
}

/// Classical implicit Euler for ∂_t u = J u + g on the same lattice.
pub fn implicit_euler(u0: &[f64], cfg: &SolverConfig, tgrid: &TimeGrid, xgrid: &SpaceGrid) -> Result<SpaceTimeField> {
    cfg.validate()?;
    let lat = LatticeOperator::new(&cfg.spatial, xgrid)?;
    let shift = 1.0 / tgrid.tau;
    lat.check_m_matrix(shift)?;
    let mut field = SpaceTimeField::constant_in_time(*tgrid, *xgrid, u0)?;
    for k in 1..tgrid.len() {
        let g = cfg.forcing.row(k, tgrid.t(k), xgrid)?;
        let rhs: Vec<f64> = (0..xgrid.n_points)
            .map(|j| shift * field.values[k - 1][j] + g[j] + lat.exterior[j] * lat.far_value)
            .collect();
        let guess = field.values[k - 1].clone();
        let (x, _, _) = conjugate_gradient(
            |v| lat.shifted_matvec(shift, v),
            &rhs,
            guess,
            cfg.linear_solver_tol,
            cfg.max_iterations,
        )?;
        field.values[k] = x;
    }
    Ok(field)
}
