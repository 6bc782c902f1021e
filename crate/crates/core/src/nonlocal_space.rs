//! Second differences, the one-dimensional fractional Laplacian and the
//! Pucci extremal operators in space and time.

use crate::ab_operators::{history_form, TimeSeries};
use crate::error::{Error, Result};
use crate::kernels::{FractionalOrder, SpatialKernelSpec};
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::special_functions::{hurwitz_zeta, zeta};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How a field continues outside the computational box |x| ≤ L.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum FarField {
    /// no model; leaving the box is an error
    None,
    Zero,
    Constant {
        value: f64,
    },
    /// coef·|x|^nu + offset
    PowerGrowth {
        nu: f64,
        coef: f64,
        offset: f64,
    },
}

impl FarField {
    pub fn value(&self, x: f64) -> Result<f64> {
        match *self {
            FarField::None => Err(Error::Domain(format!("no far-field model to evaluate at x={x}"))),
            FarField::Zero => Ok(0.0),
            FarField::Constant { value } => Ok(value),
            FarField::PowerGrowth { nu, coef, offset } => Ok(coef * x.abs().powf(nu) + offset),
        }
    }

    /// Growth exponent of |u| at infinity.
    pub fn growth(&self) -> f64 {
        match *self {
            FarField::PowerGrowth { nu, coef, .. } if coef != 0.0 => nu,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    pub half_width: f64,
    pub n_points: usize,
    pub spacing: f64,
    pub far_field: FarField,
}

impl SpaceGrid {
    pub fn new(half_width: f64, n_points: usize, far_field: FarField) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Domain(format!("half width must be positive, got {half_width}")));
        }
        if n_points == 0 || n_points.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "number of points must be odd and positive, got {n_points}"
            )));
        }
        let spacing = if n_points == 1 {
            2.0 * half_width
        } else {
            2.0 * half_width / (n_points - 1) as f64
        };
        Ok(Self {
            half_width,
            n_points,
            spacing,
            far_field,
        })
    }

    pub fn x(&self, j: usize) -> f64 {
        if self.n_points == 1 {
            return 0.0;
        }
        let mid = (self.n_points - 1) / 2;
        (j as f64 - mid as f64) * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Index of the node nearest to x, if x lies in the box.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        if x.abs() > self.half_width + 0.5 * self.spacing || self.n_points == 1 {
            return if self.n_points == 1 && x.abs() <= self.half_width {
                Some(0)
            } else {
                None
            };
        }
        let mid = ((self.n_points - 1) / 2) as f64;
        let j = (x / self.spacing + mid).round();
        Some(j.clamp(0.0, (self.n_points - 1) as f64) as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalConstants {
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub lambda_upper: f64,
}

impl ExtremalConstants {
    pub fn new(lambda: f64, lambda_upper: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= lambda_upper && lambda_upper.is_finite()) {
            return Err(Error::Domain(format!(
                "extremal constants need 0 < lambda <= Lambda, got {lambda}, {lambda_upper}"
            )));
        }
        Ok(Self { lambda, lambda_upper })
    }

    /// Λ d₊ − λ d₋
    pub fn plus(&self, d: f64) -> f64 {
        if d >= 0.0 {
            self.lambda_upper * d
        } else {
            self.lambda * d
        }
    }

    /// λ d₊ − Λ d₋
    pub fn minus(&self, d: f64) -> f64 {
        if d >= 0.0 {
            self.lambda * d
        } else {
            self.lambda_upper * d
        }
    }
}

/// Which power the Lévy measure μ(dh) = |h|^{−1−s} dh uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureExponent {
    #[default]
    Sigma,
    TwoSigma,
}

impl MeasureExponent {
    pub fn exponent(&self, sigma: f64) -> f64 {
        match self {
            MeasureExponent::Sigma => sigma,
            MeasureExponent::TwoSigma => 2.0 * sigma,
        }
    }
}

/// A real function on the line that can be evaluated anywhere.
pub trait SpatialField: Sync {
    fn value(&self, x: f64) -> Result<f64>;
    /// Second derivative at x (symmetric average where the field has a kink).
    fn d2(&self, x: f64) -> f64;
    fn far_field(&self) -> FarField;
    /// Half width of the region where the field is not given by the far-field model.
    fn reach(&self) -> f64;
    /// Offsets h > 0 at which h ↦ δ_h u(x) may have kinks.
    fn kinks(&self, x: f64) -> Vec<f64>;
    /// `Some((r, a3))` when δ_h u(x) = d2(x)h² + a3 h³ holds exactly for 0 < h < r.
    fn local_cubic(&self, _x: f64) -> Option<(f64, f64)> {
        None
    }
}

/// Grid samples with C¹ cubic Hermite interpolation (centred slopes), which
/// reproduces quadratics exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: SpaceGrid,
    pub values: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::Shape(format!(
                "{} values for {} grid points",
                values.len(),
                grid.n_points
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("field contains non-finite values".into()));
        }
        let n = values.len();
        let h = grid.spacing;
        let mut slopes = vec![0.0; n];
        if n >= 3 {
            for j in 1..n - 1 {
                slopes[j] = (values[j + 1] - values[j - 1]) / (2.0 * h);
            }
            slopes[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
            slopes[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
        } else if n == 2 {
            let s = (values[1] - values[0]) / h;
            slopes = vec![s, s];
        }
        Ok(Self { grid, values, slopes })
    }

    fn segment(&self, x: f64) -> (usize, f64) {
        let l = self.grid.half_width;
        let h = self.grid.spacing;
        let mut pos = ((x + l) / h).clamp(0.0, (self.grid.n_points - 1) as f64);
        // snap to a node when x is one up to rounding
        if (pos - pos.round()).abs() < 1e-12 * pos.max(1.0) {
            pos = pos.round();
        }
        let i = (pos.floor() as usize).min(self.grid.n_points - 2);
        (i, pos - i as f64)
    }

    fn third_derivative_on(&self, i: usize) -> f64 {
        let h = self.grid.spacing;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        (12.0 * y0 + 6.0 * d0 - 12.0 * y1 + 6.0 * d1) / (h * h * h)
    }

    fn second_derivative_on(&self, i: usize, s: f64) -> f64 {
        let h = self.grid.spacing;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        ((12.0 * s - 6.0) * y0 + (6.0 * s - 4.0) * d0 + (6.0 - 12.0 * s) * y1 + (6.0 * s - 2.0) * d1) / (h * h)
    }
}

impl SpatialField for SampledField {
    fn value(&self, x: f64) -> Result<f64> {
        let l = self.grid.half_width;
        if x.abs() > l * (1.0 + 1e-14) {
            return self.grid.far_field.value(x);
        }
        if self.grid.n_points == 1 {
            return Ok(self.values[0]);
        }
        let (i, s) = self.segment(x);
        let h = self.grid.spacing;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        Ok(y0 * (2.0 * s3 - 3.0 * s2 + 1.0) + d0 * (s3 - 2.0 * s2 + s) + y1 * (3.0 * s2 - 2.0 * s3) + d1 * (s3 - s2))
    }

    fn d2(&self, x: f64) -> f64 {
        let n = self.grid.n_points;
        if n < 2 {
            return 0.0;
        }
        let (i, s) = self.segment(x);
        let right = self.second_derivative_on(i, s);
        if s == 0.0 && i > 0 {
            0.5 * (right + self.second_derivative_on(i - 1, 1.0))
        } else if s == 1.0 && i + 2 < n {
            0.5 * (right + self.second_derivative_on(i + 1, 0.0))
        } else {
            right
        }
    }

    fn far_field(&self) -> FarField {
        self.grid.far_field
    }

    fn reach(&self) -> f64 {
        self.grid.half_width
    }

    fn local_cubic(&self, x: f64) -> Option<(f64, f64)> {
        let n = self.grid.n_points;
        if n < 3 || x.abs() >= self.grid.half_width {
            return None;
        }
        let (i, s) = self.segment(x);
        let h = self.grid.spacing;
        if s > 0.0 && s < 1.0 {
            return Some((s.min(1.0 - s) * h, 0.0));
        }
        // at a node the two neighbouring cubics differ from the third derivative on
        let j = if s == 0.0 { i } else { i + 1 };
        if j == 0 || j + 1 >= n {
            return None;
        }
        let jump = self.third_derivative_on(j) - self.third_derivative_on(j - 1);
        Some((h, jump / 6.0))
    }

    fn kinks(&self, x: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .grid
            .nodes()
            .iter()
            .map(|&xi| (xi - x).abs())
            .filter(|&h| h > 0.0)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// A closure-defined field; beyond `reach` the far-field model takes over.
pub struct FnField<F, G> {
    pub f: F,
    pub d2: G,
    pub far: FarField,
    pub reach: f64,
    /// quadrature panel width hint (e.g. a period for oscillatory fields)
    pub panel: f64,
}

impl<F, G> SpatialField for FnField<F, G>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    fn value(&self, x: f64) -> Result<f64> {
        if x.abs() > self.reach {
            self.far.value(x)
        } else {
            Ok((self.f)(x))
        }
    }
    fn d2(&self, x: f64) -> f64 {
        (self.d2)(x)
    }
    fn far_field(&self) -> FarField {
        self.far
    }
    fn reach(&self) -> f64 {
        self.reach
    }
    fn kinks(&self, x: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.panel > 0.0 {
            let top = self.reach + x.abs();
            let n = (top / self.panel).ceil() as usize;
            out.extend((1..=n.min(100_000)).map(|k| k as f64 * self.panel));
        }
        out.push((self.reach - x).abs());
        out.push(self.reach + x.abs());
        out.retain(|&h| h > 0.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// δ_h u(x) = u(x+h) + u(x−h) − 2u(x).
pub fn second_difference(u: &dyn SpatialField, x: f64, h: f64) -> Result<f64> {
    Ok(u.value(x + h)? + u.value(x - h)? - 2.0 * u.value(x)?)
}

/// 2∫_0^∞ g(δ_h u(x)) h^{−1−s} dh for a positively homogeneous g.
///
/// Near h = 0 the Taylor term g(u″)h² is subtracted and integrated exactly;
/// beyond the reach of the field both x ± h lie in the far field and the tail
/// is closed analytically (zero/constant models) or through v = (H/h)^s.
pub(crate) fn levy_integral(
    u: &dyn SpatialField,
    x: f64,
    s: f64,
    h0: f64,
    g: &dyn Fn(f64) -> f64,
    linear: bool,
    quad_tol: f64,
) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::Divergence(format!("measure exponent {s} outside (0, 2)")));
    }
    let growth = u.far_field().growth();
    if growth >= s {
        return Err(Error::Divergence(format!(
            "far-field growth |x|^{growth} is not integrable against |h|^(-1-{s})"
        )));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::Domain(format!(
            "quadrature tolerance must be positive, got {quad_tol}"
        )));
    }
    let ux = u.value(x)?;
    let taylor = g(u.d2(x));
    let errs = std::cell::RefCell::new(None);
    let delta = |h: f64| -> f64 {
        match (u.value(x + h), u.value(x - h)) {
            (Ok(p), Ok(m)) => p + m - 2.0 * ux,
            (Err(e), _) | (_, Err(e)) => {
                errs.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let opts = QuadOptions::abs(quad_tol).with_rel(1e-13);
    let big_h = u.reach() + x.abs();
    let h0 = h0.min(big_h);
    let kinks = u.kinks(x);

    // exact piece near h = 0, where differences of values lose all digits
    let (start, exact) = match u.local_cubic(x) {
        Some((r, a3)) if linear && r > 0.0 => {
            let r = r.min(h0);
            (r, a3 * r.powf(3.0 - s) / (3.0 - s))
        }
        // for s > 1 rounding in δ_h is not integrable at 0; below h_c the
        // remainder is replaced by its leading quartic term
        _ if s > 1.0 => {
            let hc = 1e-3 * h0;
            let r = g(delta(hc)) - taylor * hc * hc;
            (hc, r * hc.powf(-s) / (4.0 - s))
        }
        _ => (0.0, 0.0),
    };
    let mut near_breaks = vec![start];
    near_breaks.extend(kinks.iter().cloned().filter(|&k| k > start && k < h0));
    near_breaks.push(h0);
    let near = integrate_with_breaks(
        |h| {
            if h <= 0.0 {
                return 0.0;
            }
            (g(delta(h)) - taylor * h * h) * h.powf(-1.0 - s)
        },
        &near_breaks,
        opts,
    )?;
    let mut total = exact + near.value + taylor * h0.powf(2.0 - s) / (2.0 - s);

    if big_h > h0 {
        let mut far_breaks = vec![h0];
        far_breaks.extend(kinks.iter().cloned().filter(|&k| k > h0 && k < big_h));
        far_breaks.push(big_h);
        let far = integrate_with_breaks(|h| g(delta(h)) * h.powf(-1.0 - s), &far_breaks, opts)?;
        total += far.value;
    }

    total += match u.far_field() {
        FarField::None => return Err(Error::Domain("field needs a far-field model for the tail".into())),
        FarField::Zero => g(-2.0 * ux) * big_h.powf(-s) / s,
        FarField::Constant { value } => g(2.0 * value - 2.0 * ux) * big_h.powf(-s) / s,
        FarField::PowerGrowth { .. } => {
            let q = integrate_with_breaks(
                |v| {
                    if v <= 0.0 {
                        return 0.0;
                    }
                    g(delta(big_h * v.powf(-1.0 / s)))
                },
                &[0.0, 1.0],
                QuadOptions::abs(quad_tol * s * big_h.powf(s)).with_rel(1e-12),
            )?;
            q.value * big_h.powf(-s) / s
        }
    };
    if let Some(e) = errs.into_inner() {
        return Err(e);
    }
    Ok(2.0 * total)
}

fn near_radius(u: &dyn SpatialField) -> f64 {
    // three grid spacings for sampled data; fields given by closures use a
    // fixed fraction of their reach
    let k = u.kinks(0.0);
    let spacing = k.first().cloned().unwrap_or(1.0);
    (3.0 * spacing).min(u.reach().max(1e-3))
}

/// J u(x) = ∫ δ_h u(x) C(1,σ)|h|^{−1−σ} dh.
pub fn fractional_laplacian(u: &dyn SpatialField, spec: &SpatialKernelSpec, x: f64, quad_tol: f64) -> Result<f64> {
    if spec.dim != 1 {
        return Err(Error::Config(format!(
            "quadrature is implemented for dimension 1, got {}",
            spec.dim
        )));
    }
    let c = spec.normalization;
    let v = levy_integral(u, x, spec.sigma, near_radius(u), &|d| d, true, quad_tol / c)?;
    Ok(c * v)
}

/// ∫ δ_h u(x) |h|^{−1−s} dh with an explicit measure exponent and no normalization.
pub fn levy_operator(u: &dyn SpatialField, sigma: f64, measure: MeasureExponent, x: f64, quad_tol: f64) -> Result<f64> {
    levy_integral(u, x, measure.exponent(sigma), near_radius(u), &|d| d, true, quad_tol)
}

/// M⁺u(x) = ∫ (Λ(δ_h u)₊ − λ(δ_h u)₋) μ(dh).
pub fn pucci_plus(
    u: &dyn SpatialField,
    x: f64,
    constants: &ExtremalConstants,
    sigma: f64,
    measure: MeasureExponent,
    quad_tol: f64,
) -> Result<f64> {
    let c = *constants;
    levy_integral(
        u,
        x,
        measure.exponent(sigma),
        near_radius(u),
        &move |d| c.plus(d),
        false,
        quad_tol,
    )
}

/// M⁻u(x) = ∫ (λ(δ_h u)₊ − Λ(δ_h u)₋) μ(dh).
pub fn pucci_minus(
    u: &dyn SpatialField,
    x: f64,
    constants: &ExtremalConstants,
    sigma: f64,
    measure: MeasureExponent,
    quad_tol: f64,
) -> Result<f64> {
    let c = *constants;
    levy_integral(
        u,
        x,
        measure.exponent(sigma),
        near_radius(u),
        &move |d| c.minus(d),
        false,
        quad_tol,
    )
}

/// c_α ∫_{−∞}^t [Λ(u(t)−u(s))₊ − λ(u(t)−u(s))₋] T(t,s) ds on the interpolated series.
pub fn pucci_time_plus(
    u: &TimeSeries,
    order: &FractionalOrder,
    t: f64,
    constants: &ExtremalConstants,
    quad_tol: f64,
) -> Result<f64> {
    let c = *constants;
    pucci_time(u, order, t, quad_tol, &move |d| c.plus(d))
}

/// As [`pucci_time_plus`] with λ and Λ swapped.
pub fn pucci_time_minus(
    u: &TimeSeries,
    order: &FractionalOrder,
    t: f64,
    constants: &ExtremalConstants,
    quad_tol: f64,
) -> Result<f64> {
    let c = *constants;
    pucci_time(u, order, t, quad_tol, &move |d| c.minus(d))
}

fn pucci_time(u: &TimeSeries, order: &FractionalOrder, t: f64, quad_tol: f64, g: &dyn Fn(f64) -> f64) -> Result<f64> {
    let interp = u.interpolant()?;
    let nodes = u.grid.nodes();
    history_form(
        &|s| interp.eval(s),
        u.values[0],
        order,
        u.grid.a,
        t,
        &nodes,
        quad_tol,
        g,
    )
}

/// Off-diagonal weights ω_m (m = 0..=m_max, ω_0 = 0) of the lattice
/// operator J_h u_j = Σ_{m≥1} ω_m δ_m u_j with unit normalization:
/// a trapezoid sum of 2∫_0^∞ δ_h h^{−1−σ} dh with the leading
/// Navot correction −ζ(σ−1) u″ dx^{2−σ}, where u″ ≈ δ_1/dx².
pub fn stencil_weights(sigma: f64, dx: f64, m_max: usize) -> Vec<f64> {
    let scale = 2.0 * dx.powf(-sigma);
    let mut w = vec![0.0; m_max + 1];
    for (m, slot) in w.iter_mut().enumerate().skip(1) {
        *slot = scale * (m as f64).powf(-1.0 - sigma);
    }
    if m_max >= 1 {
        w[1] += scale * (-zeta(sigma - 1.0));
    }
    w
}

/// Σ_{m>m0} ω_m for m0 ≥ 1 (no Navot term beyond m = 1).
pub fn stencil_tail(sigma: f64, dx: f64, m0: usize) -> f64 {
    2.0 * dx.powf(-sigma) * hurwitz_zeta(1.0 + sigma, m0 as f64 + 1.0)
}

/// Symbol of the unit-normalized lattice operator on cos(ξx) over a
/// 2π-periodic grid with n points: J_h cos(ξ·)(0) / cos(0).
pub fn periodic_symbol(sigma: f64, n: usize, xi: usize) -> f64 {
    let dx = 2.0 * PI / n as f64;
    let s = 1.0 + sigma;
    // Σ_{m≥1} m^{−s} cos(2πξm/n) = n^{−s} Σ_{r=1}^{n} cos(2πξr/n) ζ(s, r/n)
    let mut lattice = 0.0;
    for r in 1..=n {
        let phase = 2.0 * PI * ((xi * r) % n) as f64 / n as f64;
        lattice += phase.cos() * hurwitz_zeta(s, r as f64 / n as f64);
    }
    lattice *= (n as f64).powf(-s);
    let scale = 2.0 * dx.powf(-sigma);
    let trapezoid = scale * (2.0 * lattice - 2.0 * zeta(s));
    let navot = scale * (-zeta(sigma - 1.0)) * (2.0 * (dx * xi as f64).cos() - 2.0);
    trapezoid + navot
}

/// Grid used by [`calibrate_normalization`].
pub const CALIBRATION_POINTS: usize = 1024;

/// C(1,σ) such that the lattice operator has symbol −|ξ|^σ at ξ = 1 on a
/// fine periodic grid.
pub fn calibrate_normalization(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 2.0) {
        return Err(Error::Domain(format!("sigma must lie in (0, 2), got {sigma}")));
    }
    let sym = periodic_symbol(sigma, CALIBRATION_POINTS, 1);
    if !(sym < 0.0) {
        return Err(Error::Accuracy {
            what: format!("calibration symbol for sigma={sigma} is not negative"),
            estimate: sym,
        });
    }
    Ok(-1.0 / sym)
}
