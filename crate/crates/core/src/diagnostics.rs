//! Empirical regularity measurements on space-time fields.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ab_operators::TimeGrid;
use crate::error::{Error, Result};
use crate::nonlocal_space::{FarField, SpaceGrid};
use crate::parabolic_solver::{solve, SolverConfig, SpaceTimeField};

/// B_r(x₀) × [t₀ − r^{2σ/α}, t₀].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicCylinder {
    pub center_x: f64,
    pub center_t: f64,
    pub radius: f64,
    pub time_depth: f64,
    pub sigma: f64,
    pub alpha: f64,
}

impl ParabolicCylinder {
    pub fn new(center_x: f64, center_t: f64, radius: f64, sigma: f64, alpha: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("cylinder radius must be positive, got {radius}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0 && sigma > 0.0 && sigma < 2.0) {
            return Err(Error::Domain(format!(
                "orders out of range: alpha={alpha}, sigma={sigma}"
            )));
        }
        Ok(Self {
            center_x,
            center_t,
            radius,
            time_depth: Self::depth(radius, sigma, alpha),
            sigma,
            alpha,
        })
    }

    pub fn depth(radius: f64, sigma: f64, alpha: f64) -> f64 {
        radius.powf(2.0 * sigma / alpha)
    }

    fn space_nodes(&self, grid: &SpaceGrid) -> Vec<usize> {
        let slack = 1e-12 * grid.spacing.max(1.0);
        (0..grid.n_points)
            .filter(|&j| (grid.x(j) - self.center_x).abs() <= self.radius + slack)
            .collect()
    }

    fn time_nodes(&self, grid: &TimeGrid) -> Vec<usize> {
        let slack = 1e-12 * grid.tau.max(1.0);
        let lo = self.center_t - self.time_depth;
        (0..grid.len())
            .filter(|&k| {
                let t = grid.t(k);
                t >= lo - slack && t <= self.center_t + slack
            })
            .collect()
    }

    /// Node indices inside the cylinder; a dimension with no node inside
    /// falls back to the node nearest the centre when the centre lies on the grid.
    pub fn nodes(&self, tgrid: &TimeGrid, xgrid: &SpaceGrid) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut ks = self.time_nodes(tgrid);
        let mut js = self.space_nodes(xgrid);
        let t_lo = self.center_t - self.time_depth;
        if ks.is_empty() && t_lo <= tgrid.b && self.center_t >= tgrid.a {
            let k = ((self.center_t.clamp(tgrid.a, tgrid.b) - tgrid.a) / tgrid.tau).round() as usize;
            ks.push(k.min(tgrid.kappa));
        }
        if js.is_empty() {
            if let Some(j) = xgrid.nearest(self.center_x) {
                js.push(j);
            }
        }
        if ks.is_empty() || js.is_empty() {
            return Err(Error::Domain(format!(
                "cylinder at ({}, {}) with radius {} misses the grid",
                self.center_x, self.center_t, self.radius
            )));
        }
        Ok((ks, js))
    }
}

/// max − min of u over the nodes of the cylinder.
pub fn oscillation(u: &SpaceTimeField, cyl: &ParabolicCylinder) -> Result<f64> {
    let (ks, js) = cyl.nodes(&u.tgrid, &u.xgrid)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &k in &ks {
        for &j in &js {
            let v = u.values[k][j];
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok(hi - lo)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub radii: Vec<f64>,
    pub oscillations: Vec<f64>,
    /// None when fewer than two cylinders have positive oscillation
    pub fitted_kappa: Option<f64>,
    pub bound_ok: Vec<bool>,
    /// osc_{k+1} ≤ osc_k for every k
    pub nonincreasing: bool,
}

/// Minimum spatial nodes in the smallest cylinder.
pub const MIN_SPACE_NODES: usize = 3;
/// Minimum time nodes in the smallest cylinder.
pub const MIN_TIME_NODES: usize = 1;

/// r = min(1/4, 4^{−α/(2σ)}).
pub fn default_ratio(alpha: f64, sigma: f64) -> f64 {
    0.25f64.min(4f64.powf(-alpha / (2.0 * sigma)))
}

/// Oscillation over Q_{r^k} for k = 0..=depth and the least-squares fit of
/// log osc_k = κ·k·log r + b.
pub fn oscillation_decay(
    u: &SpaceTimeField,
    r: f64,
    depth: usize,
    center: (f64, f64),
    sigma: f64,
    alpha: f64,
) -> Result<OscillationReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("ratio r must lie in (0, 1), got {r}")));
    }
    if depth < 2 {
        return Err(Error::Domain(format!("need at least depth 2, got {depth}")));
    }
    let mut radii = Vec::with_capacity(depth + 1);
    let mut oscillations = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let rk = r.powi(k as i32);
        let cyl = ParabolicCylinder::new(center.0, center.1, rk, sigma, alpha)?;
        let nx = cyl.space_nodes(&u.xgrid).len();
        if nx < MIN_SPACE_NODES {
            return Err(Error::Resolution {
                k,
                dimension: "space",
                nodes: nx,
                required: MIN_SPACE_NODES,
            });
        }
        let nt = cyl.time_nodes(&u.tgrid).len();
        if nt < MIN_TIME_NODES {
            return Err(Error::Resolution {
                k,
                dimension: "time",
                nodes: nt,
                required: MIN_TIME_NODES,
            });
        }
        radii.push(rk);
        oscillations.push(oscillation(u, &cyl)?);
    }
    let pts: Vec<(f64, f64)> = oscillations
        .iter()
        .enumerate()
        .filter(|(_, o)| **o > 0.0)
        .map(|(k, o)| (k as f64 * r.ln(), o.ln()))
        .collect();
    let fitted_kappa = least_squares_slope(&pts);
    let bound_ok = oscillations
        .iter()
        .enumerate()
        .map(|(k, &o)| match fitted_kappa {
            Some(kap) => o <= 2.0 * r.powf(kap * k as f64),
            None => o <= 2.0,
        })
        .collect();
    let nonincreasing = oscillations.windows(2).all(|w| w[1] <= w[0]);
    Ok(OscillationReport {
        radii,
        oscillations,
        fitted_kappa,
        bound_ok,
        nonincreasing,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Closed space-time box [x_min, x_max] × [t_min, t_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Region {
    pub fn whole(u: &SpaceTimeField) -> Self {
        Self {
            x_min: -u.xgrid.half_width,
            x_max: u.xgrid.half_width,
            t_min: u.tgrid.a,
            t_max: u.tgrid.b,
        }
    }
}

/// Node count above which pairs are taken from a subsample.
pub const HOLDER_MAX_NODES: usize = 10_000;

/// sup |u(x,t) − u(y,s)| / (|x−y|^κ + |t−s|^{κα/(2σ)}) over node pairs in
/// the region. Nodes are listed time-major; above [`HOLDER_MAX_NODES`] every
/// ⌈n / HOLDER_MAX_NODES⌉-th node of that list is kept.
pub fn holder_seminorm(u: &SpaceTimeField, kappa: f64, alpha: f64, sigma: f64, region: &Region) -> Result<f64> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Domain(format!("kappa must lie in (0, 1], got {kappa}")));
    }
    let eps = 1e-12;
    let mut nodes: Vec<(f64, f64, f64)> = Vec::new();
    for k in 0..u.tgrid.len() {
        let t = u.tgrid.t(k);
        if t < region.t_min - eps || t > region.t_max + eps {
            continue;
        }
        for j in 0..u.xgrid.n_points {
            let x = u.xgrid.x(j);
            if x >= region.x_min - eps && x <= region.x_max + eps {
                nodes.push((x, t, u.values[k][j]));
            }
        }
    }
    if nodes.len() < 2 {
        return Err(Error::Domain(format!(
            "region holds {} nodes, need at least 2",
            nodes.len()
        )));
    }
    if nodes.len() > HOLDER_MAX_NODES {
        let stride = nodes.len().div_ceil(HOLDER_MAX_NODES);
        nodes = nodes.into_iter().step_by(stride).collect();
    }
    let te = kappa * alpha / (2.0 * sigma);
    let best = (0..nodes.len())
        .into_par_iter()
        .map(|a| {
            let (xa, ta, va) = nodes[a];
            let mut m: f64 = 0.0;
            for &(xb, tb, vb) in &nodes[a + 1..] {
                let d = (xa - xb).abs().powf(kappa) + (ta - tb).abs().powf(te);
                if d > 0.0 {
                    m = m.max((va - vb).abs() / d);
                }
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Grid and data for the point-estimate experiment: u(−2, x) equals
/// `baseline` except on the dip |x| < μ/2 where it is 0; the far field is
/// `baseline`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointEstimateSetup {
    pub baseline: f64,
    pub half_width: f64,
    pub n_points: usize,
    pub kappa: usize,
}

impl Default for PointEstimateSetup {
    fn default() -> Self {
        Self {
            baseline: 1.0,
            half_width: 2.0,
            n_points: 129,
            kappa: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointEstimateReport {
    pub mu: f64,
    /// 1 − max u over B₁ × [−1, 0]
    pub theta_emp: f64,
    pub passed: bool,
    /// measured |{u ≤ 0} ∩ B₁ × [−2, −1]| (node-cell quadrature)
    pub dip_measure: f64,
    pub max_value: f64,
}

pub fn point_estimate_scenario(cfg: &SolverConfig, mu: f64, setup: &PointEstimateSetup) -> Result<PointEstimateReport> {
    if !(0.0..=2.0).contains(&mu) {
        return Err(Error::Config(format!("dip width must lie in [0, 2], got {mu}")));
    }
    if !(setup.baseline <= 1.0) {
        return Err(Error::Config(format!(
            "data must satisfy u <= 1, baseline is {}",
            setup.baseline
        )));
    }
    if setup.half_width < 1.0 {
        return Err(Error::Config("the box must contain B_1".into()));
    }
    let far = if setup.baseline == 0.0 {
        FarField::Zero
    } else {
        FarField::Constant { value: setup.baseline }
    };
    let xgrid = SpaceGrid::new(setup.half_width, setup.n_points, far).map_err(|e| Error::Config(e.to_string()))?;
    let tgrid = TimeGrid::new(-2.0, 0.0, setup.kappa).map_err(|e| Error::Config(e.to_string()))?;
    let u0: Vec<f64> = xgrid
        .nodes()
        .iter()
        .map(|&x| if x.abs() < 0.5 * mu { 0.0 } else { setup.baseline })
        .collect();
    let sol = solve(&u0, cfg, &tgrid, &xgrid)?;
    let f = &sol.field;
    let mut max_value = f64::NEG_INFINITY;
    let mut dip = 0.0;
    for k in 0..tgrid.len() {
        let t = tgrid.t(k);
        for j in 0..xgrid.n_points {
            let x = xgrid.x(j);
            if x.abs() > 1.0 + 1e-12 {
                continue;
            }
            let v = f.values[k][j];
            if t >= -1.0 - 1e-12 {
                max_value = max_value.max(v);
            }
            if t <= -1.0 + 1e-12 && k > 0 && v <= 0.0 {
                dip += xgrid.spacing * tgrid.tau;
            }
        }
    }
    let theta_emp = 1.0 - max_value;
    Ok(PointEstimateReport {
        mu,
        theta_emp,
        passed: theta_emp > 0.0,
        dip_measure: dip,
        max_value,
    })
}
