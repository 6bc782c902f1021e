//! Atangana–Baleanu derivative and integral: velocity form, Caputo-type
//! pointwise form, history form and the uniform-grid discretization.
//!
//! Throughout, the weakly singular factor (t−s)^{α−1} is removed by the
//! substitution w = (t−s)^α, so every adaptive quadrature sees a bounded
//! integrand.

use crate::error::{Error, Result};
use crate::interpolation::MonotoneCubic;
use crate::kernels::FractionalOrder;
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::special_functions::{gamma, mittag_leffler, MLParams};
use serde::{Deserialize, Serialize};

/// Uniform grid t_k = a + kτ, τ = (b−a)/κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub a: f64,
    pub b: f64,
    pub kappa: usize,
    pub tau: f64,
}

impl TimeGrid {
    pub fn new(a: f64, b: f64, kappa: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::Domain(format!("time grid needs a < b, got [{a}, {b}]")));
        }
        // κ = 0 is a grid holding only the initial time
        Ok(Self {
            a,
            b,
            kappa,
            tau: (b - a) / kappa.max(1) as f64,
        })
    }

    pub fn t(&self, k: usize) -> f64 {
        if k == self.kappa && k > 0 {
            self.b
        } else {
            self.a + k as f64 * self.tau
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.kappa).map(|k| self.t(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.kappa + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Samples u(t_k); the value at t_0 doubles as the constant history for t < a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "series has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("series contains non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: TimeGrid, f: F) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    /// Monotone cubic interpolant in t, constant beyond the grid.
    pub fn interpolant(&self) -> Result<MonotoneCubic> {
        MonotoneCubic::new(self.grid.nodes(), self.values.clone())
    }
}

fn opts(quad_tol: f64) -> Result<QuadOptions> {
    if !(quad_tol > 0.0) {
        return Err(Error::Domain(format!(
            "quadrature tolerance must be positive, got {quad_tol}"
        )));
    }
    Ok(QuadOptions::abs(quad_tol).with_rel(1e-13))
}

fn require_after(a: f64, t: f64) -> Result<()> {
    if !(t > a) {
        return Err(Error::Domain(format!("need t > a, got a={a}, t={t}")));
    }
    Ok(())
}

// Evaluation errors inside a quadrature closure are carried out through a cell.
struct Fallible(std::cell::RefCell<Option<Error>>);

impl Fallible {
    fn new() -> Self {
        Self(std::cell::RefCell::new(None))
    }
    fn take(&self, v: Result<f64>) -> f64 {
        match v {
            Ok(x) => x,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    }
    fn finish<T>(self, r: Result<T>) -> Result<T> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

/// ν_α ∫_a^t E_α[c(t−s)^α] u′(s) ds.
pub fn ab_derivative(
    u_prime: &dyn Fn(f64) -> f64,
    order: &FractionalOrder,
    a: f64,
    t: f64,
    quad_tol: f64,
) -> Result<f64> {
    require_after(a, t)?;
    let al = order.alpha;
    let ml = MLParams { alpha: al, beta: 1.0 };
    let errs = Fallible::new();
    // s = t − w^{1/α}, ds = w^{1/α−1}/α dw
    let f = |w: f64| {
        let e = errs.take(mittag_leffler(ml, order.c * w));
        e * u_prime(t - w.powf(1.0 / al)) * w.powf(1.0 / al - 1.0) / al
    };
    let upper = (t - a).powf(al);
    let q = integrate_with_breaks(f, &[0.0, upper], opts(quad_tol / order.nu_alpha)?);
    errs.finish(q).map(|q| order.nu_alpha * q.value)
}

/// ν_α E_α[c(t−a)^α](u(t)−u(a)) + c_α ∫_a^t (t−s)^{α−1} E_{α,α}[c(t−s)^α](u(t)−u(s)) ds.
pub fn ab_caputo_form(u: &dyn Fn(f64) -> f64, order: &FractionalOrder, a: f64, t: f64, quad_tol: f64) -> Result<f64> {
    require_after(a, t)?;
    let ut = u(t);
    let boundary = order.nu_alpha * order.relaxation(t - a)? * (ut - u(a));
    let inner = memory_inner(&|s| ut - u(s), order, a, t, &[], quad_tol / order.c_alpha)?;
    Ok(boundary + order.c_alpha * inner)
}

/// ∫_a^t T(t−s) d(s) ds for a difference function d, with T(τ) = τ^{α−1}E_{α,α}(cτ^α).
/// `breaks` lists points in (a, t) where d has kinks.
pub(crate) fn memory_inner(
    d: &dyn Fn(f64) -> f64,
    order: &FractionalOrder,
    a: f64,
    t: f64,
    breaks: &[f64],
    quad_tol: f64,
) -> Result<f64> {
    if t <= a {
        return Ok(0.0);
    }
    let al = order.alpha;
    let ml = MLParams { alpha: al, beta: al };
    let errs = Fallible::new();
    let f = |w: f64| {
        let e = errs.take(mittag_leffler(ml, order.c * w));
        e * d(t - w.powf(1.0 / al)) / al
    };
    let upper = (t - a).powf(al);
    let mut ws: Vec<f64> = breaks
        .iter()
        .filter(|&&s| s > a && s < t)
        .map(|&s| (t - s).powf(al))
        .collect();
    ws.push(0.0);
    ws.push(upper);
    ws.sort_by(f64::total_cmp);
    ws.dedup();
    let q = integrate_with_breaks(f, &ws, opts(quad_tol)?);
    errs.finish(q).map(|q| q.value)
}

/// ∫_{t−a}^∞ T(τ) dτ by quadrature (w = (t−a)^α / v maps the tail to (0, 1]).
pub(crate) fn memory_tail(order: &FractionalOrder, gap: f64, quad_tol: f64) -> Result<f64> {
    let al = order.alpha;
    if gap <= 0.0 {
        return Ok(1.0 / (-order.c));
    }
    let w0 = gap.powf(al);
    let ml = MLParams { alpha: al, beta: al };
    // E_{α,α}(−x) ~ −x^{−2}/Γ(−α) as x → ∞
    let limit = -1.0 / (gamma(-al) * order.c * order.c * w0 * w0);
    let errs = Fallible::new();
    let f = |v: f64| {
        if v <= 0.0 {
            return w0 * limit / al;
        }
        let e = errs.take(mittag_leffler(ml, order.c * w0 / v));
        w0 * e / (v * v) / al
    };
    let q = integrate_with_breaks(f, &[0.0, 1.0], opts(quad_tol)?);
    errs.finish(q).map(|q| q.value)
}

/// c_α ∫_{−∞}^t (u(t) − u(s)) T(t,s) ds with u(s) = `u_hist` for s < a.
///
/// The part over (−∞, a) is integrated numerically; it is not zero unless
/// u(t) = u_hist.
pub fn l_operator(
    u: &dyn Fn(f64) -> f64,
    u_hist: f64,
    order: &FractionalOrder,
    a: f64,
    t: f64,
    quad_tol: f64,
) -> Result<f64> {
    history_form(u, u_hist, order, a, t, &[], quad_tol, &|d| d)
}

/// [`l_operator`] applied to the monotone cubic interpolant of a series;
/// the history value is the first sample.
pub fn l_operator_series(series: &TimeSeries, order: &FractionalOrder, t: f64, quad_tol: f64) -> Result<f64> {
    let interp = series.interpolant()?;
    let nodes = series.grid.nodes();
    history_form(
        &|s| interp.eval(s),
        series.values[0],
        order,
        series.grid.a,
        t,
        &nodes,
        quad_tol,
        &|d| d,
    )
}

/// c_α [∫_a^t g(u(t)−u(s)) T ds + g(u(t)−u_hist) ∫_{t−a}^∞ T]; g = identity gives L u.
#[allow(clippy::too_many_arguments)]
pub(crate) fn history_form(
    u: &dyn Fn(f64) -> f64,
    u_hist: f64,
    order: &FractionalOrder,
    a: f64,
    t: f64,
    breaks: &[f64],
    quad_tol: f64,
    g: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    if t < a {
        return Ok(0.0);
    }
    let ut = u(t);
    let tol = 0.5 * quad_tol / order.c_alpha;
    let inner = memory_inner(&|s| g(ut - u(s)), order, a, t, breaks, tol)?;
    let jump = g(ut - u_hist);
    let tail = if jump == 0.0 {
        0.0
    } else {
        jump * memory_tail(order, t - a, tol / jump.abs())?
    };
    Ok(order.c_alpha * (inner + tail))
}

/// (1−α)/B(α)·u(t) + α/(B(α)Γ(α)) ∫_a^t u(y)(t−y)^{α−1} dy.
pub fn ab_integral(u: &dyn Fn(f64) -> f64, order: &FractionalOrder, a: f64, t: f64, quad_tol: f64) -> Result<f64> {
    if !(t >= a) {
        return Err(Error::Domain(format!("need t >= a, got a={a}, t={t}")));
    }
    let al = order.alpha;
    let b = order.b_alpha;
    let local = (1.0 - al) / b * u(t);
    if t == a {
        return Ok(local);
    }
    let pref = al / (b * gamma(al));
    let f = |w: f64| u(t - w.powf(1.0 / al)) / al;
    let q = integrate_with_breaks(f, &[0.0, (t - a).powf(al)], opts(quad_tol / pref)?)?;
    Ok(local + pref * q.value)
}

/// Weights of the discrete operator on a uniform grid:
/// w_m = E_{α,α}[cτ^α m^α]/m^{1−α} and the history tails H_k = Σ_{m>k} w_m.
#[derive(Debug, Clone)]
pub struct DiscreteWeights {
    pub order: FractionalOrder,
    pub tau: f64,
    /// w[m] for m = 0..=κ (w[0] unused, set to 0)
    pub w: Vec<f64>,
    /// tail[k] = H_k for k = 0..=κ; tail[0] = Σ_{m≥1} w_m
    pub tail: Vec<f64>,
    /// τ^α c_α
    pub scale: f64,
}

impl DiscreteWeights {
    pub fn new(order: &FractionalOrder, tau: f64, kappa: usize) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("time step must be positive, got {tau}")));
        }
        let al = order.alpha;
        let ml = MLParams { alpha: al, beta: al };
        let ta = tau.powf(al);
        let weight = |m: f64| -> Result<f64> { Ok(mittag_leffler(ml, order.c * ta * m.powf(al))? * m.powf(al - 1.0)) };
        let mut w = vec![0.0; kappa + 1];
        for (m, slot) in w.iter_mut().enumerate().skip(1) {
            *slot = weight(m as f64)?;
        }
        // Σ_{m>κ} w_m: explicit sum up to M − 1, then Euler–Maclaurin at M
        let big_m = kappa + 128;
        let mut far = 0.0;
        for m in (kappa + 1..big_m).rev() {
            far += weight(m as f64)?;
        }
        let mf = big_m as f64;
        let wm = weight(mf)?;
        let dw = 0.5 * (weight(mf + 1.0)? - weight(mf - 1.0)?);
        // ∫_M^∞ w(m) dm = τ^{−α} E_α(c(Mτ)^α)/(−c)
        let integral = order.relaxation(mf * tau)? / (-order.c * ta);
        far += integral + 0.5 * wm - dw / 12.0;
        let mut tail = vec![0.0; kappa + 1];
        tail[kappa] = far;
        for k in (0..kappa).rev() {
            tail[k] = tail[k + 1] + w[k + 1];
        }
        Ok(Self {
            order: *order,
            tau,
            w,
            tail,
            scale: ta * order.c_alpha,
        })
    }

    pub fn kappa(&self) -> usize {
        self.w.len() - 1
    }

    /// τ^α c_α [Σ_{i=k−1..0} w_{k−i}(u_k − u_i) + H_k (u_k − u_0)].
    pub fn apply(&self, values: &[f64], k: usize) -> Result<f64> {
        if k > self.kappa() || k >= values.len() {
            return Err(Error::Index {
                index: k,
                max: self.kappa().min(values.len().saturating_sub(1)),
            });
        }
        let uk = values[k];
        let mut s = 0.0;
        for i in (0..k).rev() {
            s += self.w[k - i] * (uk - values[i]);
        }
        s += self.tail[k] * (uk - values[0]);
        Ok(self.scale * s)
    }

    /// The sum restricted to 0 ≤ i < k, without the history part.
    pub fn apply_truncated(&self, values: &[f64], k: usize) -> Result<f64> {
        if k > self.kappa() || k >= values.len() {
            return Err(Error::Index {
                index: k,
                max: self.kappa().min(values.len().saturating_sub(1)),
            });
        }
        let uk = values[k];
        let mut s = 0.0;
        for i in (0..k).rev() {
            s += self.w[k - i] * (uk - values[i]);
        }
        Ok(self.scale * s)
    }
}

/// Discrete operator at node k, including the constant history before t_0.
pub fn discrete_l(series: &TimeSeries, order: &FractionalOrder, k: usize) -> Result<f64> {
    if k > series.grid.kappa {
        return Err(Error::Index {
            index: k,
            max: series.grid.kappa,
        });
    }
    let weights = DiscreteWeights::new(order, series.grid.tau, k.max(1))?;
    weights.apply(&series.values[..=k], k)
}

/// Discrete operator at node k with the sum over 0 ≤ i < k only.
pub fn discrete_l_truncated(series: &TimeSeries, order: &FractionalOrder, k: usize) -> Result<f64> {
    if k > series.grid.kappa {
        return Err(Error::Index {
            index: k,
            max: series.grid.kappa,
        });
    }
    let weights = DiscreteWeights::new(order, series.grid.tau, k.max(1))?;
    weights.apply_truncated(&series.values[..=k], k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn constants_are_annihilated() {
        let o = ord(0.5);
        assert_eq!(ab_derivative(&|_| 0.0, &o, 0.0, 1.0, 1e-10).unwrap(), 0.0);
        assert_eq!(ab_caputo_form(&|_| 5.0, &o, 0.0, 1.0, 1e-10).unwrap(), 0.0);
        assert_eq!(l_operator(&|_| 5.0, 5.0, &o, 0.0, 1.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn tail_integral_matches_closed_form() {
        for &a in &[0.25, 0.5, 0.75] {
            let o = ord(a);
            for &gap in &[0.01, 0.5, 2.0] {
                let num = memory_tail(&o, gap, 1e-13).unwrap();
                let exact = o.kernel_tail(gap).unwrap();
                assert!(
                    (num - exact).abs() < 1e-11 * exact.max(1.0),
                    "a={a} gap={gap}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn step_history_gives_boundary_term() {
        let o = ord(0.5);
        let v = l_operator(&|_| 1.0, 0.0, &o, 0.0, 0.5, 1e-12).unwrap();
        let exact = o.nu_alpha * o.relaxation(0.5).unwrap();
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn integral_of_one() {
        let o = ord(0.5);
        let b = o.b_alpha;
        // α t^α/(B Γ(α+1)) from the power integral
        let exact = 0.5 / b + 0.5 / (b * gamma(1.5));
        let v = ab_integral(&|_| 1.0, &o, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - exact).abs() < 1e-12);
        assert_eq!(ab_integral(&|_| 3.0, &o, 0.0, 0.0, 1e-12).unwrap(), 0.5 / b * 3.0);
    }

    #[test]
    fn single_step_discrete() {
        let o = ord(0.5);
        let g = TimeGrid::new(0.0, 1.0, 4).unwrap();
        let s = TimeSeries::new(g, vec![0.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        let ta = g.tau.powf(0.5);
        let e = mittag_leffler(MLParams { alpha: 0.5, beta: 0.5 }, o.c * ta).unwrap();
        let expect = ta * o.c_alpha * e;
        assert!((discrete_l_truncated(&s, &o, 1).unwrap() - expect).abs() < 1e-14);
        assert_eq!(discrete_l(&s, &o, 0).unwrap(), 0.0);
        assert!(matches!(discrete_l(&s, &o, 5), Err(Error::Index { .. })));
    }

    #[test]
    fn history_tail_sum_matches_direct_sum() {
        // H_0 = Σ_{m≥1} w_m; compare against a long direct sum plus the integral tail
        let o = ord(0.5);
        let tau = 0.05;
        let w = DiscreteWeights::new(&o, tau, 16).unwrap();
        let ml = MLParams { alpha: 0.5, beta: 0.5 };
        let mut direct = 0.0;
        let n = 200_000;
        for m in 1..=n {
            let mf = m as f64;
            direct += mittag_leffler(ml, o.c * tau.sqrt() * mf.sqrt()).unwrap() / mf.sqrt();
        }
        // remaining tail ≈ ∫_{n+1/2}^∞
        direct += o.relaxation((n as f64 + 0.5) * tau).unwrap() / (-o.c * tau.sqrt());
        assert!((w.tail[0] - direct).abs() < 1e-7 * direct, "{} vs {direct}", w.tail[0]);
    }
}
