//! Construction, evolution, and verification of multidimensional shock
//! waves for the scalar conservation law
//!
//!   u_t + Σᵢ ∂/∂xᵢ fᵢ(u) = 0.
//!
//! The central object is the overturning profile u₁(x), carried by a bundle
//! of straight characteristic trajectories from a surface Γ₁ (where u₁ = U)
//! to a surface Γ₂ (where u₁ = u₀⁰), with one positive constant K(s) per
//! trajectory. From that bundle the crate derives breaking times 1/K(s),
//! focusing points, post-formation Rankine–Hugoniot fronts, jump-stability
//! verdicts, level-surface gaps, and rarefaction fans for the decay of
//! nonstable steps. A first-order finite-volume solver provides an
//! independent reference for all of it.
//!
//! The crate is `no_std`-compatible (`alloc` required, `libm` supplies the
//! float math); the companion CLI crate carries IO and file formats.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(a < b)`-style comparisons are deliberate: they reject NaN where a
// direct `>=` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod characteristics;
pub mod decay;
pub mod defaults;
mod error;
pub mod field;
pub mod flux;
pub mod fvm;
pub mod geometry;
pub mod initial;
pub mod level;
pub mod linalg;
pub(crate) mod math;
mod newton;
pub mod profile;
pub mod stability;

pub use error::{Error, Result};
pub use field::Field;
