//! Time and space kernels and the constants derived from the fractional order.

use crate::error::{Error, Result};
use crate::special_functions::{gamma, mittag_leffler, MLParams};
use serde::{Deserialize, Serialize};

/// Lower bound σ₀ for the spatial order.
pub const SIGMA_MIN: f64 = 0.1;
/// Default verification window for time kernels.
pub const DEFAULT_HORIZON: f64 = 4.0;

/// The order α ∈ (0,1) together with B(α), c, ν_α and c_α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalOrder {
    pub alpha: f64,
    /// B(α) = 1 − α + α/Γ(α)
    pub b_alpha: f64,
    /// c = −α/(1−α)
    pub c: f64,
    /// ν_α = B(α)/(1−α)
    pub nu_alpha: f64,
    /// c_α = −c·ν_α
    pub c_alpha: f64,
}

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "fractional order must lie in (0,1), got {alpha}"
            )));
        }
        let b_alpha = 1.0 - alpha + alpha / gamma(alpha);
        let c = -alpha / (1.0 - alpha);
        let nu_alpha = b_alpha / (1.0 - alpha);
        let c_alpha = -c * nu_alpha;
        Ok(Self {
            alpha,
            b_alpha,
            c,
            nu_alpha,
            c_alpha,
        })
    }

    /// E_α(c τ^α), the kernel of the derivative in velocity form.
    pub fn relaxation(&self, tau: f64) -> Result<f64> {
        if tau <= 0.0 {
            return Ok(1.0);
        }
        mittag_leffler(
            MLParams {
                alpha: self.alpha,
                beta: 1.0,
            },
            self.c * tau.powf(self.alpha),
        )
    }

    /// E_{α,α}(c w); the kernel T(τ) equals τ^{α−1}·this at w = τ^α.
    pub fn ml_alpha_alpha(&self, w: f64) -> Result<f64> {
        mittag_leffler(
            MLParams {
                alpha: self.alpha,
                beta: self.alpha,
            },
            self.c * w,
        )
    }

    /// ∫_{τ0}^∞ T(τ) dτ = E_α(c τ0^α)/(−c).
    pub fn kernel_tail(&self, tau0: f64) -> Result<f64> {
        Ok(self.relaxation(tau0)? / (-self.c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeKernelKind {
    MittagLeffler,
    CaputoPower,
}

impl std::str::FromStr for TimeKernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ml" | "mittag_leffler" => Ok(Self::MittagLeffler),
            "caputo" | "caputo_power" => Ok(Self::CaputoPower),
            other => Err(Error::Config(format!("unknown kernel kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeKernelSpec {
    pub order: FractionalOrder,
    pub horizon: f64,
    pub kind: TimeKernelKind,
}

impl TimeKernelSpec {
    pub fn new(order: FractionalOrder, horizon: f64, kind: TimeKernelKind) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self { order, horizon, kind })
    }

    /// Kernel as a function of the gap τ = t − s > 0.
    pub fn eval_gap(&self, tau: f64) -> Result<f64> {
        let a = self.order.alpha;
        match self.kind {
            TimeKernelKind::MittagLeffler => Ok(tau.powf(a - 1.0) * self.order.ml_alpha_alpha(tau.powf(a))?),
            TimeKernelKind::CaputoPower => Ok(tau.powf(a - 1.0) / gamma(a)),
        }
    }
}

/// T(t, s) for s < t with t − s inside the horizon.
pub fn time_kernel_eval(spec: &TimeKernelSpec, t: f64, s: f64) -> Result<f64> {
    if !(s < t) {
        return Err(Error::Domain(format!("kernel needs s < t, got s={s}, t={t}")));
    }
    let gap = t - s;
    if gap > spec.horizon {
        return Err(Error::Domain(format!(
            "gap t−s = {gap} lies outside the verification window {}",
            spec.horizon
        )));
    }
    spec.eval_gap(gap)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub lambda_emp: f64,
    #[serde(rename = "Lambda_emp")]
    pub lambda_upper_emp: f64,
    pub holds: bool,
    /// gaps τ_i at which the ratio was sampled
    pub grid: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// Samples ρ(τ) = T(τ)Γ(α+1)/τ^{α−1} on a log-spaced grid of gaps in
/// (0, horizon] and reports min ρ/(−c) and max ρ/(−c).
pub fn verify_time_kernel_envelope(spec: &TimeKernelSpec, n_samples: usize) -> Result<EnvelopeReport> {
    if n_samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {n_samples}")));
    }
    let a = spec.order.alpha;
    let g1 = gamma(a + 1.0);
    let lo = spec.horizon * 1e-6;
    let ratio_step = (spec.horizon / lo).ln() / (n_samples - 1) as f64;
    let mut grid = Vec::with_capacity(n_samples);
    let mut ratios = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let tau = if i + 1 == n_samples {
            spec.horizon
        } else {
            lo * (ratio_step * i as f64).exp()
        };
        let rho = spec.eval_gap(tau)? * g1 / tau.powf(a - 1.0);
        grid.push(tau);
        ratios.push(rho);
    }
    let scale = -spec.order.c;
    let lambda_emp = ratios.iter().cloned().fold(f64::INFINITY, f64::min) / scale;
    let lambda_upper_emp = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / scale;
    let holds = lambda_emp > 0.0 && lambda_emp <= lambda_upper_emp && lambda_upper_emp.is_finite();
    Ok(EnvelopeReport {
        lambda_emp,
        lambda_upper_emp,
        holds,
        grid,
        ratios,
    })
}

/// Checks T(t, t−s) = T(t+s, t) on every sample for an arbitrary two-point kernel.
pub fn verify_symmetry_with<F>(kernel: F, samples: &[(f64, f64)]) -> Result<bool>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    for &(t, s) in samples {
        let left = kernel(t, t - s)?;
        let right = kernel(t + s, t)?;
        if (left - right).abs() > 1e-14 * (1.0 + left.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn verify_time_symmetry(spec: &TimeKernelSpec, samples: &[(f64, f64)]) -> Result<bool> {
    verify_symmetry_with(|t, s| time_kernel_eval(spec, t, s), samples)
}

/// The power kernel C(n,σ)|h|^{−n−σ} with ellipticity bounds λ ≤ Λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialKernelSpec {
    pub dim: usize,
    pub sigma: f64,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub lambda_upper: f64,
    pub normalization: f64,
}

impl SpatialKernelSpec {
    pub fn new(dim: usize, sigma: f64, lambda: f64, lambda_upper: f64, normalization: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if !(sigma > SIGMA_MIN && sigma < 2.0) {
            return Err(Error::Domain(format!(
                "sigma must lie in ({SIGMA_MIN}, 2), got {sigma}"
            )));
        }
        if !(lambda > 0.0 && lambda <= lambda_upper && lambda_upper.is_finite()) {
            return Err(Error::Domain(format!(
                "ellipticity constants need 0 < lambda <= Lambda, got {lambda}, {lambda_upper}"
            )));
        }
        if !(normalization > 0.0 && normalization.is_finite()) {
            return Err(Error::Domain(format!(
                "normalization must be positive, got {normalization}"
            )));
        }
        Ok(Self {
            dim,
            sigma,
            lambda,
            lambda_upper,
            normalization,
        })
    }

    /// One-dimensional kernel with C(1,σ) from the spectral calibration in
    /// [`crate::nonlocal_space::calibrate_normalization`].
    pub fn calibrated(sigma: f64, lambda: f64, lambda_upper: f64) -> Result<Self> {
        if !(sigma > SIGMA_MIN && sigma < 2.0) {
            return Err(Error::Domain(format!(
                "sigma must lie in ({SIGMA_MIN}, 2), got {sigma}"
            )));
        }
        let c = crate::nonlocal_space::calibrate_normalization(sigma)?;
        Self::new(1, sigma, lambda, lambda_upper, c)
    }

    pub fn eval(&self, h: &[f64]) -> Result<f64> {
        if h.len() != self.dim {
            return Err(Error::Shape(format!(
                "offset has length {}, kernel dimension is {}",
                h.len(),
                self.dim
            )));
        }
        let r2: f64 = h.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Err(Error::Domain("spatial kernel is singular at h = 0".into()));
        }
        Ok(self.normalization * r2.powf(-0.5 * (self.dim as f64 + self.sigma)))
    }

    /// λ|h|^{−n−σ} ≤ K(h) ≤ Λ|h|^{−n−σ} on every sampled offset.
    pub fn envelope_holds(&self, samples: &[Vec<f64>]) -> Result<bool> {
        for h in samples {
            let k = self.eval(h)?;
            let r: f64 = h.iter().map(|v| v * v).sum::<f64>().sqrt();
            let p = r.powf(-(self.dim as f64) - self.sigma);
            if k < self.lambda * p * (1.0 - 1e-15) || k > self.lambda_upper * p * (1.0 + 1e-15) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// C(1,σ) = σ 2^{σ−2} Γ((1+σ)/2) / (√π Γ(1−σ/2)), the constant for which
/// ∫ δ_h u C|h|^{−1−σ} dh has Fourier symbol −|ξ|^σ.
pub fn normalization_closed_form(sigma: f64) -> f64 {
    sigma * 2f64.powf(sigma - 2.0) * gamma(0.5 * (1.0 + sigma))
        / (std::f64::consts::PI.sqrt() * gamma(1.0 - 0.5 * sigma))
}
