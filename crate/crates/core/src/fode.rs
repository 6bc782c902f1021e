//! Closed-form solutions of L u = −c₁u + c₀h, their residual check, the
//! corollary lower bound and the barrier ϱ(t) = max{2|rt|^ν − 1, 0}.
//!
//! The solution is allowed to jump at `start`: the history is the constant
//! u₀ for s < start while u(start) is whatever the equation dictates. With
//! that convention the Laplace-transform solutions are exact.

use crate::ab_operators::{DiscreteWeights, TimeGrid, TimeSeries};
use crate::error::{Error, Result};
use crate::interpolation::MonotoneCubic;
use crate::kernels::FractionalOrder;
use crate::quadrature::{integrate_with_breaks, GaussLegendre, QuadOptions};
use crate::special_functions::{gamma, mittag_leffler, MLParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

const SOLVE_TOL: f64 = 1e-12;

/// A scalar forcing h(t) with the points where it is not smooth.
#[derive(Clone)]
pub struct Source {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub breaks: Vec<f64>,
    pub label: String,
}

impl std::fmt::Debug for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Source")
            .field("label", &self.label)
            .field("breaks", &self.breaks)
            .finish()
    }
}

impl Source {
    pub fn constant(v: f64) -> Self {
        Self {
            f: Arc::new(move |_| v),
            breaks: vec![],
            label: format!("const:{v}"),
        }
    }

    /// height on [lo, hi), zero elsewhere
    pub fn indicator(lo: f64, hi: f64, height: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Domain(format!("indicator needs lo < hi, got {lo}, {hi}")));
        }
        Ok(Self {
            f: Arc::new(move |t| if t >= lo && t < hi { height } else { 0.0 }),
            breaks: vec![lo, hi],
            label: format!("indicator:{lo},{hi}"),
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F, label: &str) -> Self {
        Self {
            f: Arc::new(f),
            breaks: vec![],
            label: label.to_string(),
        }
    }

    /// Piecewise linear through (t_i, v_i), constant outside.
    pub fn from_samples(ts: Vec<f64>, vs: Vec<f64>) -> Result<Self> {
        if ts.len() != vs.len() || ts.is_empty() {
            return Err(Error::Data("sample table needs equal, non-zero lengths".into()));
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) || vs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(
                "sample times must increase and values must be finite".into(),
            ));
        }
        let breaks = ts.clone();
        let (t2, v2) = (ts.clone(), vs.clone());
        Ok(Self {
            f: Arc::new(move |t| {
                if t <= t2[0] {
                    return v2[0];
                }
                if t >= t2[t2.len() - 1] {
                    return v2[v2.len() - 1];
                }
                let i = t2.partition_point(|&x| x <= t) - 1;
                let s = (t - t2[i]) / (t2[i + 1] - t2[i]);
                v2[i] + s * (v2[i + 1] - v2[i])
            }),
            breaks,
            label: "table".into(),
        })
    }

    /// `const:V` or `indicator:A,B` (height 1).
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("source spec '{spec}' needs the form kind:args")))?;
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{s}' in source spec '{spec}'")))
        };
        match kind {
            "const" => Ok(Self::constant(num(rest)?)),
            "indicator" => {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Config(format!("indicator needs two bounds, got '{rest}'")))?;
                Self::indicator(num(a)?, num(b)?, 1.0)
            }
            other => Err(Error::Config(format!("unknown source kind '{other}'"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

#[derive(Debug, Clone)]
pub struct FodeProblem {
    pub order: FractionalOrder,
    pub c0: f64,
    pub c1: f64,
    pub h: Source,
    pub u0: f64,
    pub start: f64,
    pub end: f64,
}

impl FodeProblem {
    pub fn new(order: FractionalOrder, c0: f64, c1: f64, h: Source, u0: f64, start: f64, end: f64) -> Result<Self> {
        if !(c0 >= 0.0 && c1 >= 0.0) {
            return Err(Error::Domain(format!(
                "coefficients must be nonnegative, got c0={c0}, c1={c1}"
            )));
        }
        if !(start < end) || !u0.is_finite() {
            return Err(Error::Domain(format!(
                "need start < end and finite u0, got [{start}, {end}], u0={u0}"
            )));
        }
        Ok(Self {
            order,
            c0,
            c1,
            h,
            u0,
            start,
            end,
        })
    }

    /// γ = αc₁/(B + (1−α)c₁)
    pub fn gamma(&self) -> f64 {
        let o = &self.order;
        o.alpha * self.c1 / (o.b_alpha + (1.0 - o.alpha) * self.c1)
    }

    /// ζ = B/(B + (1−α)c₁)
    pub fn zeta(&self) -> f64 {
        let o = &self.order;
        o.b_alpha / (o.b_alpha + (1.0 - o.alpha) * self.c1)
    }

    fn check_grid(&self, grid: &TimeGrid) -> Result<()> {
        if (grid.a - self.start).abs() > 1e-12 * (1.0 + self.start.abs()) {
            return Err(Error::Shape(format!(
                "grid starts at {}, problem at {}",
                grid.a, self.start
            )));
        }
        Ok(())
    }

    /// ∫_start^t k(t−s) h(s) ds with k(x) = x^{α−1} m(x^α), through w = (t−s)^α.
    fn memory(&self, t: f64, m: &(dyn Fn(f64) -> Result<f64> + Sync)) -> Result<f64> {
        if t <= self.start {
            return Ok(0.0);
        }
        let al = self.order.alpha;
        let upper = (t - self.start).powf(al);
        let mut ws: Vec<f64> = self
            .h
            .breaks
            .iter()
            .filter(|&&b| b > self.start && b < t)
            .map(|&b| (t - b).powf(al))
            .collect();
        ws.extend([0.0, upper]);
        ws.sort_by(f64::total_cmp);
        ws.dedup();
        let err = std::cell::RefCell::new(None);
        let q = integrate_with_breaks(
            |w| {
                let mw = m(w).unwrap_or_else(|e| {
                    err.borrow_mut().get_or_insert(e);
                    0.0
                });
                mw * self.h.eval(t - w.powf(1.0 / al)) / al
            },
            &ws,
            QuadOptions::abs(SOLVE_TOL).with_rel(1e-13),
        );
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        Ok(q?.value)
    }

    fn tabulate(&self, grid: &TimeGrid, f: &(dyn Fn(f64) -> Result<f64> + Sync)) -> Result<TimeSeries> {
        self.check_grid(grid)?;
        let values: Result<Vec<f64>> = grid.nodes().par_iter().map(|&t| f(t)).collect();
        TimeSeries::new(*grid, values?)
    }
}

/// u(t) = u₀ + (1−α)c₀/B·h(t) + αc₀/(BΓ(α)) ∫_start^t h(s)(t−s)^{α−1} ds.
///
/// For u₀ = 0 this is the c₁ = 0 formula verbatim; the u₀ shift follows from
/// the same Laplace computation.
pub fn solve_c1_zero(p: &FodeProblem, grid: &TimeGrid) -> Result<TimeSeries> {
    if p.c1 != 0.0 {
        return Err(Error::WrongSolver(format!("solve_c1_zero needs c1 = 0, got {}", p.c1)));
    }
    let o = p.order;
    let local = (1.0 - o.alpha) * p.c0 / o.b_alpha;
    let pref = o.alpha * p.c0 / (o.b_alpha * gamma(o.alpha));
    p.tabulate(grid, &|t| {
        Ok(p.u0 + local * p.h.eval(t) + pref * p.memory(t, &|_| Ok(1.0))?)
    })
}

/// The c₁ > 0 solution as a two-kernel convolution:
/// ζE_α[−γ(t−start)^α]u₀ + (αc₀ζ/B)∫ [E_{α,α}[−γx^α] + ((1−α)/α)γ^{−2α}E_{α,α}[−γ^{−2α}x^α]] x^{α−1} h(t−x) dx.
pub fn two_kernel_form(p: &FodeProblem, grid: &TimeGrid) -> Result<TimeSeries> {
    if p.c1 <= 0.0 {
        return Err(Error::WrongSolver(format!(
            "two_kernel_form needs c1 > 0, got {}",
            p.c1
        )));
    }
    let o = p.order;
    let al = o.alpha;
    let (g, z) = (p.gamma(), p.zeta());
    let one = MLParams { alpha: al, beta: 1.0 };
    let aa = MLParams { alpha: al, beta: al };
    let g2 = g.powf(-2.0 * al);
    let pref = al * p.c0 * z / o.b_alpha;
    let kernel = move |w: f64| -> Result<f64> {
        Ok(mittag_leffler(aa, -g * w)? + (1.0 - al) / al * g2 * mittag_leffler(aa, -g2 * w)?)
    };
    p.tabulate(grid, &|t| {
        let head = z * mittag_leffler(one, -g * (t - p.start).powf(al))? * p.u0;
        Ok(head + pref * p.memory(t, &kernel)?)
    })
}

/// Inverse Laplace transform of the problem's transformed equation:
/// ζE_α[−γτ^α]u₀ + (1−α)c₀ζ/B·h(t) + c₀ζ(α − (1−α)γ)/B ∫ x^{α−1}E_{α,α}[−γx^α] h(t−x) dx.
pub fn closed_form(p: &FodeProblem, grid: &TimeGrid) -> Result<TimeSeries> {
    let o = p.order;
    let al = o.alpha;
    let (g, z) = (p.gamma(), p.zeta());
    let one = MLParams { alpha: al, beta: 1.0 };
    let aa = MLParams { alpha: al, beta: al };
    let local = (1.0 - al) * p.c0 * z / o.b_alpha;
    let pref = p.c0 * z * (al - (1.0 - al) * g) / o.b_alpha;
    let kernel = move |w: f64| mittag_leffler(aa, -g * w);
    p.tabulate(grid, &|t| {
        let head = z * mittag_leffler(one, -g * (t - p.start).powf(al))? * p.u0;
        Ok(head + local * p.h.eval(t) + pref * p.memory(t, &kernel)?)
    })
}

/// Implicit stepping of the discrete operator: u_0 = u₀ and, for k ≥ 1,
/// L_h u_k = −c₁u_k + c₀h(t_k).
pub fn solve_discrete(p: &FodeProblem, grid: &TimeGrid) -> Result<TimeSeries> {
    p.check_grid(grid)?;
    let wts = DiscreteWeights::new(&p.order, grid.tau, grid.kappa)?;
    let mut u = vec![p.u0; grid.len()];
    let total = wts.tail[0];
    for k in 1..grid.len() {
        let mut hist = 0.0;
        for i in (0..k).rev() {
            hist += wts.w[k - i] * u[i];
        }
        hist += wts.tail[k] * u[0];
        u[k] = (wts.scale * hist + p.c0 * p.h.eval(grid.t(k))) / (wts.scale * total + p.c1);
    }
    TimeSeries::new(*grid, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FodeMethod {
    TwoKernelForm,
    ClosedForm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateReport {
    pub method: FodeMethod,
    pub max_residual: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arbitration {
    pub series: TimeSeries,
    pub chosen: FodeMethod,
    pub candidates: Vec<CandidateReport>,
    /// sup-norm gap between the two-kernel formula and the chosen solution
    pub discrepancy: f64,
    pub residual: Vec<f64>,
}

/// Solves the c₁ > 0 problem: the two-kernel formula is accepted if its
/// residual is within `tol`, otherwise the Laplace closed form is used and
/// the gap between the two is reported.
pub fn solve_general(p: &FodeProblem, grid: &TimeGrid, tol: f64) -> Result<Arbitration> {
    if p.c1 <= 0.0 {
        return Err(Error::WrongSolver(format!("solve_general needs c1 > 0, got {}", p.c1)));
    }
    let quad_tol = 1e-10;
    let two = two_kernel_form(p, grid)?;
    let r_two = fode_residual(&two, p, quad_tol)?;
    let m_two = max_abs(&r_two);
    let mut candidates = vec![CandidateReport {
        method: FodeMethod::TwoKernelForm,
        max_residual: m_two,
        accepted: m_two <= tol,
    }];
    if m_two <= tol {
        return Ok(Arbitration {
            series: two,
            chosen: FodeMethod::TwoKernelForm,
            candidates,
            discrepancy: 0.0,
            residual: r_two,
        });
    }
    let closed = closed_form(p, grid)?;
    let r_closed = fode_residual(&closed, p, quad_tol)?;
    let m_closed = max_abs(&r_closed);
    candidates.push(CandidateReport {
        method: FodeMethod::ClosedForm,
        max_residual: m_closed,
        accepted: m_closed <= tol,
    });
    let discrepancy = two
        .values
        .iter()
        .zip(&closed.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Arbitration {
        series: closed,
        chosen: FodeMethod::ClosedForm,
        candidates,
        discrepancy,
        residual: r_closed,
    })
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// r_k = L û(t_k) + c₁u_k − c₀h(t_k), û the monotone cubic interpolant of u
/// in the graded variable (t − start)^α and history u₀ before start.
///
/// Each grid interval is integrated with Gauss–Legendre; the interval next
/// to t_k uses w = (t_k − s)^α and the first interval uses y = (s − start)^α.
/// Kernel values depend only on the offset k − j, so they are tabulated once.
pub fn fode_residual(u: &TimeSeries, p: &FodeProblem, quad_tol: f64) -> Result<Vec<f64>> {
    p.check_grid(&u.grid)?;
    if !(quad_tol > 0.0) {
        return Err(Error::Domain(format!(
            "quadrature tolerance must be positive, got {quad_tol}"
        )));
    }
    let o = p.order;
    let al = o.alpha;
    let grid = u.grid;
    let tau = grid.tau;
    let kappa = grid.kappa;
    let n = if quad_tol >= 1e-6 {
        8
    } else if quad_tol >= 1e-9 {
        12
    } else {
        20
    };
    let gl = GaussLegendre::new(n);
    let graded: Vec<f64> = grid.nodes().iter().map(|t| (t - p.start).powf(al)).collect();
    let interp = MonotoneCubic::new(graded, u.values.clone())?;
    let uhat = |s: f64| interp.eval((s - p.start).max(0.0).powf(al));
    let aa = MLParams { alpha: al, beta: al };
    let kernel = |x: f64| -> Result<f64> { Ok(x.powf(al - 1.0) * mittag_leffler(aa, o.c * x.powf(al))?) };
    // unit nodes on [0, 1]
    let unit: Vec<(f64, f64)> = gl
        .nodes
        .iter()
        .zip(&gl.weights)
        .map(|(x, w)| (0.5 * (1.0 + x), 0.5 * w))
        .collect();

    // last interval: w ∈ [0, τ^α], E_{α,α}(cw)/α dw
    let wl = tau.powf(al);
    let last: Vec<(f64, f64)> = unit
        .iter()
        .map(|&(v, q)| {
            Ok((
                tau - (v * wl).powf(1.0 / al),
                q * wl * mittag_leffler(aa, o.c * v * wl)? / al,
            ))
        })
        .collect::<Result<_>>()?;
    // interior intervals: offset m = k − j ≥ 2, node s = t_j + vτ, gap (m − v)τ
    let mid: Vec<Vec<f64>> = (2..=kappa)
        .into_par_iter()
        .map(|m| {
            unit.iter()
                .map(|&(v, q)| Ok(q * tau * kernel((m as f64 - v) * tau)?))
                .collect()
        })
        .collect::<Result<_>>()?;
    // first interval for k ≥ 2: y ∈ [0, τ^α], s − start = y^{1/α}
    let first_nodes: Vec<(f64, f64)> = unit
        .iter()
        .map(|&(v, q)| {
            let y = v * wl;
            (y.powf(1.0 / al), q * wl * y.powf(1.0 / al - 1.0) / al)
        })
        .collect();
    let first: Vec<Vec<f64>> = (2..=kappa)
        .into_par_iter()
        .map(|k| {
            first_nodes
                .iter()
                .map(|&(x, q)| Ok(q * kernel(k as f64 * tau - x)?))
                .collect()
        })
        .collect::<Result<_>>()?;
    let tails: Vec<f64> = (0..=kappa)
        .into_par_iter()
        .map(|k| o.kernel_tail(grid.t(k) - p.start))
        .collect::<Result<_>>()?;

    // û on the shared interior nodes of every interval
    let interior: Vec<Vec<f64>> = (0..kappa)
        .map(|j| unit.iter().map(|&(v, _)| uhat(grid.t(j) + v * tau)).collect())
        .collect();
    let first_vals: Vec<f64> = first_nodes.iter().map(|&(x, _)| interp.eval((x).powf(al))).collect();

    let res: Result<Vec<f64>> = (0..=kappa)
        .into_par_iter()
        .map(|k| {
            let tk = grid.t(k);
            let uk = u.values[k];
            let mut s = 0.0;
            if k == 1 {
                // split the single interval at its midpoint
                let half = 0.5 * tau;
                let wh = half.powf(al);
                for &(v, q) in &unit {
                    let w = v * wh;
                    s += q * wh * mittag_leffler(aa, o.c * w)? / al * (uk - uhat(tk - w.powf(1.0 / al)));
                    let y = v * wh;
                    let x = y.powf(1.0 / al);
                    s += q * wh * x.powf(1.0 - al) / al * kernel(tk - p.start - x)? * (uk - uhat(p.start + x));
                }
            } else if k >= 2 {
                for &(dt, q) in &last {
                    s += q * (uk - uhat(grid.t(k - 1) + dt));
                }
                for (q, v) in first[k - 2].iter().zip(&first_vals) {
                    s += q * (uk - v);
                }
                for j in 1..k - 1 {
                    let row = &mid[k - j - 2];
                    for (q, v) in row.iter().zip(&interior[j]) {
                        s += q * (uk - v);
                    }
                }
            }
            let l = o.c_alpha * (s + (uk - p.u0) * tails[k]);
            Ok(l + p.c1 * uk - p.c0 * p.h.eval(tk))
        })
        .collect();
    res
}

/// (α/2) E_{α,α}[−2c₁] c₀ μ.
pub fn corollary_floor(order: &FractionalOrder, c0: f64, c1: f64, mu: f64) -> Result<f64> {
    if !(c0 > 0.0 && c1 > 0.0 && mu >= 0.0) {
        return Err(Error::Domain(format!(
            "need c0, c1 > 0 and mu >= 0, got {c0}, {c1}, {mu}"
        )));
    }
    let e = mittag_leffler(
        MLParams {
            alpha: order.alpha,
            beta: order.alpha,
        },
        -2.0 * c1,
    )?;
    Ok(0.5 * order.alpha * e * c0 * mu)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub alpha: f64,
    pub c1: f64,
    pub floor: f64,
    pub min_solution: f64,
    pub holds: bool,
    pub method: FodeMethod,
    pub max_residual: f64,
}

/// Solves on [−2, 0] with u(−2) = 0 and h = μ·1_{[−2,−1)}, then compares
/// min_{t ∈ [−1,0]} u(t) with the floor.
pub fn corollary_check(order: &FractionalOrder, c0: f64, c1: f64, mu: f64, kappa: usize) -> Result<CorollaryReport> {
    let floor = corollary_floor(order, c0, c1, mu)?;
    let h = Source::indicator(-2.0, -1.0, mu)?;
    let p = FodeProblem::new(*order, c0, c1, h, 0.0, -2.0, 0.0)?;
    let grid = TimeGrid::new(-2.0, 0.0, kappa)?;
    let arb = solve_general(&p, &grid, 1e-4)?;
    let min_solution = grid
        .nodes()
        .iter()
        .zip(&arb.series.values)
        .filter(|(t, _)| **t >= -1.0)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    Ok(CorollaryReport {
        alpha: order.alpha,
        c1,
        floor,
        min_solution,
        holds: min_solution >= floor,
        method: arb.chosen,
        max_residual: max_abs(&arb.residual),
    })
}

/// ϱ(t) = max{2|rt|^ν − 1, 0}.
pub fn barrier_eval(t: f64, nu: f64, r: f64) -> f64 {
    (2.0 * (r * t).abs().powf(nu) - 1.0).max(0.0)
}

/// r = min{1/4, 4^{−α/(2σ)}}.
pub fn barrier_radius(alpha: f64, sigma: f64) -> f64 {
    0.25f64.min(4f64.powf(-alpha / (2.0 * sigma)))
}

/// L ϱ(t₁) = c_α ∫_0^∞ (ϱ(t₁) − ϱ(t₁ − x)) T(x) dx over the whole past.
pub fn barrier_l(order: &FractionalOrder, nu: f64, sigma: f64, t1: f64, quad_tol: f64) -> Result<f64> {
    let al = order.alpha;
    if !(nu > 0.0 && nu < al) {
        return Err(Error::Domain(format!(
            "barrier exponent needs 0 < nu < alpha, got nu={nu}, alpha={al}"
        )));
    }
    if t1 > 0.0 {
        return Err(Error::Domain(format!("barrier is evaluated at t1 <= 0, got {t1}")));
    }
    let r = barrier_radius(al, sigma);
    let rho1 = barrier_eval(t1, nu, r);
    let diff = |x: f64| rho1 - barrier_eval(t1 - x, nu, r);
    // ϱ(t₁ − x) leaves zero at x_k
    let xk = t1 + 2f64.powf(-1.0 / nu) / r;
    let big_x = (2.0 * xk).max(1.0);
    let aa = MLParams { alpha: al, beta: al };
    let opts = QuadOptions::abs(quad_tol / order.c_alpha).with_rel(1e-12);
    let err = std::cell::RefCell::new(None);
    let ml = |z: f64| {
        mittag_leffler(aa, z).unwrap_or_else(|e| {
            err.borrow_mut().get_or_insert(e);
            0.0
        })
    };
    let mut ws = vec![0.0, big_x.powf(al)];
    if xk > 0.0 && xk < big_x {
        ws.insert(1, xk.powf(al));
    }
    let near = integrate_with_breaks(|w| ml(order.c * w) * diff(w.powf(1.0 / al)) / al, &ws, opts)?;
    // x = X v^{−1/α}: T(x)dx = (X^α/α) v^{−2} E_{α,α}(cX^α/v) dv
    let xa = big_x.powf(al);
    let far = integrate_with_breaks(
        |v| {
            if v <= 0.0 {
                return 0.0;
            }
            ml(order.c * xa / v) * xa / (al * v * v) * diff(big_x * v.powf(-1.0 / al))
        },
        &[0.0, 1.0],
        opts,
    )?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(order.c_alpha * (near.value + far.value))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierReport {
    pub value: f64,
    pub lower: f64,
    pub d_emp: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub holds: bool,
}

/// L ϱ(t₁) together with d_{α,ν} = −min L ϱ over 50 points of [−2, 0] and t₁.
pub fn barrier_l_bound(order: &FractionalOrder, nu: f64, sigma: f64, t1: f64, quad_tol: f64) -> Result<BarrierReport> {
    let value = barrier_l(order, nu, sigma, t1, quad_tol)?;
    let grid: Vec<f64> = (0..50).map(|i| -2.0 + 2.0 * i as f64 / 49.0).collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&t| barrier_l(order, nu, sigma, t, quad_tol))
        .collect::<Result<_>>()?;
    let d_emp = -values.iter().cloned().fold(value, f64::min);
    let holds = value <= 1e-10 && values.iter().all(|&v| v <= 1e-10);
    Ok(BarrierReport {
        value,
        lower: -d_emp,
        d_emp,
        grid,
        values,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(alpha: f64, c0: f64, c1: f64, h: Source, u0: f64) -> FodeProblem {
        FodeProblem::new(FractionalOrder::new(alpha).unwrap(), c0, c1, h, u0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn c1_zero_closed_values() {
        let g = TimeGrid::new(0.0, 1.0, 8).unwrap();
        let p = problem(0.5, 1.0, 0.0, Source::constant(1.0), 0.0);
        let u = solve_c1_zero(&p, &g).unwrap();
        let b = p.order.b_alpha;
        let exact = 0.5 / b + 0.5 / (b * gamma(1.5));
        assert!((u.values[8] - exact).abs() < 1e-12);
        // mpmath quadrature of the same formula with h(t) = t, c0 = 2
        let p = problem(0.5, 2.0, 0.0, Source::from_fn(|t| t, "t"), 0.0);
        let u = solve_c1_zero(&p, &g).unwrap();
        assert!((u.values[8] - 2.240_460_870_592_643).abs() < 1e-10);
        let zero = solve_c1_zero(&problem(0.5, 1.0, 0.0, Source::constant(0.0), 0.0), &g).unwrap();
        assert!(zero.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn wrong_solver_is_reported() {
        let g = TimeGrid::new(0.0, 1.0, 4).unwrap();
        let p = problem(0.5, 1.0, 1.0, Source::constant(1.0), 0.0);
        assert!(matches!(solve_c1_zero(&p, &g), Err(Error::WrongSolver(_))));
        let p = problem(0.5, 1.0, 0.0, Source::constant(1.0), 0.0);
        assert!(matches!(solve_general(&p, &g, 1e-4), Err(Error::WrongSolver(_))));
    }

    #[test]
    fn relaxation_only() {
        let g = TimeGrid::new(0.0, 1.0, 4).unwrap();
        let p = problem(0.5, 0.0, 1.0, Source::constant(1.0), 2.0);
        let u = two_kernel_form(&p, &g).unwrap();
        let one = MLParams { alpha: 0.5, beta: 1.0 };
        for (t, v) in g.nodes().iter().zip(&u.values) {
            let e = p.zeta() * mittag_leffler(one, -p.gamma() * t.sqrt()).unwrap() * 2.0;
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn floor_value() {
        let o = FractionalOrder::new(0.5).unwrap();
        let f = corollary_floor(&o, 1.0, 1.0, 0.5).unwrap();
        assert!((f - 0.125 * 0.053_398_230_926_744_8).abs() < 1e-15);
        assert_eq!(corollary_floor(&o, 1.0, 1.0, 0.0).unwrap(), 0.0);
        assert!(corollary_floor(&o, 0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn barrier_basics() {
        let r = barrier_radius(0.5, 1.0);
        assert_eq!(r, 0.25);
        // |rt| ≤ 2^{−1/ν} clamps to zero
        assert_eq!(barrier_eval(-0.2, 0.25, r), 0.0);
        assert!(barrier_eval(-3.0, 0.25, r) > 0.0);
        let o = FractionalOrder::new(0.5).unwrap();
        assert!(matches!(barrier_l(&o, 0.5, 1.0, -1.0, 1e-10), Err(Error::Domain(_))));
    }
}
