mod diag;
mod ml;
mod space;
mod time;

pub use diag::{acceptance, diagnose};
pub use ml::{kernel_verify, ml_eval};
pub use space::{pde_solve, space_apply};
pub use time::{ab_apply, fode_solve};
