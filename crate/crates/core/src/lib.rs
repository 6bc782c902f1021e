//! Atangana–Baleanu fractional calculus, nonlocal diffusion and regularity
//! diagnostics in one dimension.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ab_operators;
pub mod acceptance;
pub mod diagnostics;
pub mod error;
pub mod fode;
pub mod interpolation;
pub mod kernels;
pub mod nonlocal_space;
pub mod parabolic_solver;
pub mod quadrature;
pub mod special_functions;

pub use error::{Error, Result};
