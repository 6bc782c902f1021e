//! Two-parameter Mittag-Leffler function E_{α,β}(z) = Σ_{k≥0} z^k / Γ(αk + β)
//! on the real line.
//!
//! Evaluation strategy for real z:
//!
//! * `z > 0`: the power series. All terms are positive, so summation is
//!   well conditioned; arguments whose leading growth exp(z^{1/α}) overflows
//!   are rejected with [`Error::Overflow`].
//! * `z < 0`, small |z|: the power series, accepted only when the running
//!   sum of |terms| certifies the cancellation error.
//! * `z < 0`, |z| ≥ [`ASYMPTOTIC_RADIUS`]: the algebraic expansion
//!   E_{α,β}(−x) ~ Σ_{m≥1} (−1)^{m+1} x^{−m} / Γ(β − αm), plus the exact pole
//!   residues when 1 < α ≤ 2, accepted when the first omitted term is below
//!   the target.
//! * otherwise: the Hankel contour for 1/(2πi)∮ e^s s^{α−β}/(s^α + x) ds
//!   collapsed onto the negative real axis, which gives a real integral with
//!   a non-negative exponential weight, plus pole residues for 1 < α ≤ 2.
//!
//! α = 1 on the negative axis is handled through e^z and its incomplete
//! integrals because the poles sit on the branch cut there.

use super::gamma::{gamma, ln_gamma, recip_gamma};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use serde::Serialize;
use std::f64::consts::PI;

/// Default |z| at which the asymptotic expansion is first attempted on the
/// negative axis.
pub const ASYMPTOTIC_RADIUS: f64 = 15.0;

/// Relative accuracy target used when choosing between methods.
const TARGET_REL: f64 = 1e-13;

/// Largest |z| for which the series is attempted on the negative axis.
const SERIES_NEG_LIMIT: f64 = 12.0;

/// Orders (α, β) of E_{α,β}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) || !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Domain(format!(
                "Mittag-Leffler orders must be positive and finite, got alpha={}, beta={}",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }
}

/// Which evaluation route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MlMethod {
    Series,
    Asymptotic,
    Integral,
    Exponential,
}

impl MlMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            MlMethod::Series => "series",
            MlMethod::Asymptotic => "asymptotic",
            MlMethod::Integral => "integral",
            MlMethod::Exponential => "exponential",
        }
    }
}

/// A value together with the route used and its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MlValue {
    pub value: f64,
    pub method: MlMethod,
    pub est_error: f64,
}

/// E_{α,β}(z).
pub fn mittag_leffler(params: MLParams, z: f64) -> Result<f64> {
    mittag_leffler_detailed(params, z).map(|v| v.value)
}

/// E_α(z) = E_{α,1}(z).
pub fn ml_one_param(alpha: f64, z: f64) -> Result<f64> {
    mittag_leffler(MLParams::new(alpha, 1.0)?, z)
}

/// E_{α,β}(z) with the method and error estimate reported.
pub fn mittag_leffler_detailed(params: MLParams, z: f64) -> Result<MlValue> {
    params.validate()?;
    if !z.is_finite() {
        return Err(Error::Domain(format!("argument must be finite, got {z}")));
    }
    let MLParams { alpha, beta } = params;
    if z == 0.0 {
        return Ok(MlValue {
            value: recip_gamma(beta),
            method: MlMethod::Series,
            est_error: 0.0,
        });
    }
    if z > 0.0 {
        check_overflow(alpha, beta, z)?;
        let (value, abs_sum) = series_sum(alpha, beta, z)?;
        return Ok(MlValue {
            value,
            method: MlMethod::Series,
            est_error: series_error(abs_sum),
        });
    }

    let x = -z;
    if x <= SERIES_NEG_LIMIT {
        let (value, abs_sum) = series_sum(alpha, beta, z)?;
        let est = series_error(abs_sum);
        if est <= TARGET_REL * value.abs() {
            return Ok(MlValue {
                value,
                method: MlMethod::Series,
                est_error: est,
            });
        }
    }
    if alpha == 1.0 {
        return unit_alpha_negative(beta, x);
    }
    if alpha > 2.0 {
        return Err(Error::Accuracy {
            what: format!(
                "E_{{{alpha},{beta}}}({z}): alpha > 2 is only supported where the series is well conditioned"
            ),
            estimate: f64::INFINITY,
        });
    }
    if x >= ASYMPTOTIC_RADIUS {
        let (value, err) = asymptotic_negative(alpha, beta, x);
        if err <= TARGET_REL * value.abs() {
            return Ok(MlValue {
                value,
                method: MlMethod::Asymptotic,
                est_error: err,
            });
        }
    }
    let (value, err) = integral_negative(alpha, beta, x)?;
    Ok(MlValue {
        value,
        method: MlMethod::Integral,
        est_error: err,
    })
}

fn series_error(abs_sum: f64) -> f64 {
    // rounding in the sum plus the relative error of each Γ evaluation
    (8.0 * f64::EPSILON + 2e-15) * abs_sum
}

fn check_overflow(alpha: f64, beta: f64, z: f64) -> Result<()> {
    // leading growth (1/α) z^{(1−β)/α} exp(z^{1/α})
    let log_mag = z.powf(1.0 / alpha) + (1.0 - beta) / alpha * z.ln() - alpha.ln();
    if log_mag > 700.0 {
        return Err(Error::Overflow {
            what: format!("E_{{{alpha},{beta}}}({z})"),
            threshold: 700f64.powf(alpha),
        });
    }
    Ok(())
}

/// Power series with tail-driven truncation; returns (sum, Σ|terms|).
pub fn series_sum(alpha: f64, beta: f64, z: f64) -> Result<(f64, f64)> {
    let lnz = z.abs().ln();
    let neg = z < 0.0;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut prev_abs = f64::INFINITY;
    let max_terms = 200_000usize;
    for k in 0..max_terms {
        let arg = alpha * k as f64 + beta;
        let mag = if arg < 170.0 && (k as f64) * lnz < 700.0 {
            z.abs().powi(k as i32) * recip_gamma(arg)
        } else {
            (k as f64 * lnz - ln_gamma(arg)).exp()
        };
        let term = if neg && k % 2 == 1 { -mag } else { mag };
        sum += term;
        abs_sum += mag;
        // past the peak and below the tail threshold; a geometric bound on
        // the remaining terms follows from the decreasing ratio
        if k > 2 && mag <= prev_abs && mag <= 1e-17 * abs_sum.max(f64::MIN_POSITIVE) {
            return Ok((sum, abs_sum));
        }
        prev_abs = mag;
    }
    Err(Error::Accuracy {
        what: format!("Mittag-Leffler series did not converge for z={z}"),
        estimate: prev_abs,
    })
}

/// Algebraic asymptotic expansion on the negative axis (plus pole residues
/// for α > 1). Returns (value, estimated truncation error).
pub fn asymptotic_negative(alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut err = f64::INFINITY;
    for m in 1..200 {
        let y = beta - alpha * m as f64;
        let t = x.powi(-m) * recip_gamma(y);
        // |1/Γ(y)| ≤ Γ(1−y)/π for y < 1; the bound is smooth across the poles,
        // where rounded arguments would give spuriously tiny terms
        let env = if y < 1.0 {
            x.powi(-m) * gamma(1.0 - y) / PI
        } else {
            t.abs()
        };
        if !env.is_finite() || env > prev {
            // divergent tail starts: optimal truncation
            err = prev;
            break;
        }
        if m % 2 == 1 {
            sum += t;
        } else {
            sum -= t;
        }
        prev = env;
        err = env;
        if env <= 1e-18 * sum.abs() && m > 2 {
            break;
        }
    }
    if alpha > 1.0 {
        sum += pole_residues(alpha, beta, x);
    } else if alpha == 1.0 {
        sum += (-x).exp() * x.powf(1.0 - beta);
    }
    (sum, err)
}

/// Contribution of the two poles s = x^{1/α} e^{±iπ/α} for 1 < α ≤ 2.
fn pole_residues(alpha: f64, beta: f64, x: f64) -> f64 {
    let theta = PI / alpha;
    let rho = x.powf(1.0 / alpha);
    (2.0 / alpha)
        * x.powf((1.0 - beta) / alpha)
        * (rho * theta.cos()).exp()
        * (rho * theta.sin() + theta * (1.0 - beta)).cos()
}

/// Collapsed Hankel-contour integral for E_{α,β}(−x), α ∈ (0,2], α ≠ 1.
pub fn integral_negative(alpha: f64, beta: f64, x: f64) -> Result<(f64, f64)> {
    if beta >= alpha + 1.0 {
        // E_{α,β}(z) = (E_{α,β−α}(z) − 1/Γ(β−α)) / z
        let (lower, err) = integral_negative(alpha, beta - alpha, x)?;
        let v = (lower - recip_gamma(beta - alpha)) / (-x);
        return Ok((v, err / x));
    }
    // r^{α−β} dr = dv / p with r = v^{1/p}
    let p = alpha - beta + 1.0;
    let sin_b = sin_pi(beta);
    // sin(π(β − α)) = sin(π(1 − p)) = sin(πp)
    let sin_ba = sin_pi(p);
    // 1 + cos(πα) = 2 cos²(πα/2), kept separate to avoid cancellation in the
    // denominator when α is close to 1
    let one_plus_cos = 2.0 * cos_pi(0.5 * alpha).powi(2);
    let core = move |r: f64| -> f64 {
        let ra = r.powf(alpha);
        let d = ra - x;
        let den = d * d + 2.0 * x * ra * one_plus_cos;
        (-r).exp() * (ra * sin_b + x * sin_ba) / den
    };
    let r_star = x.powf(1.0 / alpha);
    let split = r_star.min(1.0) * 0.5;
    // near 0 the weight r^{α−β} is close to 1/r when β → α + 1: integrate
    // core(r) − core(0) = O(r^α) with r = v^{1/q}, q = p + α, and add the
    // core(0) part in closed form
    let core0 = sin_ba / x;
    let q = p + alpha;
    let near = move |v: f64| -> f64 {
        let r = v.max(f64::MIN_POSITIVE).powf(1.0 / q);
        (core(r) - core0) * r.powf(-alpha) / q
    };
    let head = core0 * split.powf(p) / p;
    let far = move |r: f64| -> f64 { r.powf(alpha - beta) * core(r) };
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 2e-14,
        max_intervals: 400,
    };
    let q_near = integrate_with_breaks(near, &[0.0, split.powf(q)], opts)?;
    // e^{−r} underflows past r ≈ 745
    let upper = (split.max(r_star * 2.0) + 60.0).min(750.0);
    let mut breaks = vec![split];
    breaks.extend(
        [1.0, 4.0, 16.0, 40.0, 100.0]
            .into_iter()
            .filter(|&b| b > split && b < upper),
    );
    // the integrand peaks near r* when α is close to 1 (poles near the cut)
    let width = (x * (PI * alpha).sin().abs()).max(1e-3 * r_star).min(0.25 * r_star);
    for b in [
        r_star - 4.0 * width,
        r_star - width,
        r_star,
        r_star + width,
        r_star + 4.0 * width,
    ] {
        if b > split && b < upper {
            breaks.push(b);
        }
    }
    breaks.push(upper);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let q_far = integrate_with_breaks(far, &breaks, opts)?;
    let mut value = (head + q_near.value + q_far.value) / PI;
    if alpha > 1.0 {
        value += pole_residues(alpha, beta, x);
    }
    let err = (q_near.error + q_far.error) / PI + 4.0 * f64::EPSILON * value.abs();
    Ok((value, err))
}

/// sin(πy) with exact zeros at the integers.
fn sin_pi(y: f64) -> f64 {
    let r = y - 2.0 * (0.5 * y).floor();
    // r in [0, 2)
    match r {
        r if r == 0.0 || r == 1.0 => 0.0,
        r if r <= 0.25 => (PI * r).sin(),
        r if r <= 0.75 => (PI * (0.5 - r)).cos(),
        r if r <= 1.25 => (PI * (1.0 - r)).sin(),
        r if r <= 1.75 => -(PI * (1.5 - r)).cos(),
        r => -(PI * (2.0 - r)).sin(),
    }
}

fn cos_pi(y: f64) -> f64 {
    sin_pi(y + 0.5)
}

/// α = 1, z = −x < 0.
fn unit_alpha_negative(beta: f64, x: f64) -> Result<MlValue> {
    if beta == 1.0 {
        return Ok(MlValue {
            value: (-x).exp(),
            method: MlMethod::Exponential,
            est_error: f64::EPSILON * (-x).exp(),
        });
    }
    if beta < 1.0 {
        // E_{1,β}(z) = 1/Γ(β) + z E_{1,β+1}(z)
        let up = unit_alpha_negative(beta + 1.0, x)?;
        return Ok(MlValue {
            value: recip_gamma(beta) - x * up.value,
            method: MlMethod::Integral,
            est_error: x * up.est_error + f64::EPSILON,
        });
    }
    // E_{1,β}(−x) = 1/Γ(β−1) ∫_0^1 e^{−xt} (1−t)^{β−2} dt, β > 1;
    // with w = (1−t)^{β−1}: (1/((β−1)Γ(β−1))) ∫_0^1 e^{−x(1−w^{1/(β−1)})} dw
    let q = beta - 1.0;
    let f = move |w: f64| (-x * (1.0 - w.powf(1.0 / q))).exp();
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 2e-14,
        max_intervals: 400,
    };
    let res = integrate_with_breaks(f, &[0.0, 0.5, 0.9, 0.99, 1.0], opts)?;
    let scale = recip_gamma(q) / q;
    Ok(MlValue {
        value: scale * res.value,
        method: MlMethod::Integral,
        est_error: scale * res.error,
    })
}
