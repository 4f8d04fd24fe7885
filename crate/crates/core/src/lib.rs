//! Rank-2 generalized King plot toolkit for gravitomagnetic spin-quadrupole
//! searches in hydrogen-like ions.
//!
//! - [`nucdata`]: isotope chains with uncertainty notation
//! - [`angular`]: Wigner 6j symbols and E2 hyperfine ladders
//! - [`barriers`]: calibrated signal and background scaling laws
//! - [`gkp`]: design matrices, conditioning and extraction
//! - [`montecarlo`]: seeded κ sampling and injection-recovery
//! - [`budget`]: |χ − 1| bounds, milestone ladder, Ramsey planning

// Validation uses `!(x > 0.0)` so that NaN is rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod barriers;
pub mod budget;
pub mod constants;
pub mod decimal;
pub mod gkp;
pub mod halfint;
pub mod montecarlo;
pub mod nucdata;
pub mod resources;

pub use halfint::HalfInt;
