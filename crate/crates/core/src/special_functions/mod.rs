//! Gamma-family functions and the two-parameter Mittag-Leffler function.

mod gamma;
mod mittag_leffler;

pub use gamma::{gamma, hurwitz_zeta, ln_gamma, recip_gamma, zeta};
pub use mittag_leffler::{
    asymptotic_negative, integral_negative, mittag_leffler, mittag_leffler_detailed, ml_one_param, series_sum,
    MLParams, MlMethod, MlValue, ASYMPTOTIC_RADIUS,
};
