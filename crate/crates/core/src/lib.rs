//! Weighted congestion games: exhaustive equilibrium analysis, approximate
//! potentials built from per-resource goodness parameters, and the resulting
//! (α, β)-equilibrium bounds.
//!
//! All model data is stored as exact rationals. Routines are generic over
//! [`numeric::Scalar`], instantiated with [`numeric::Q`] for exact runs and
//! `f64` when a cost needs transcendental functions.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cost;
pub mod error;
pub mod experiments;
pub mod game;
pub mod goodness;
pub mod numeric;
pub mod potential;
pub mod quadrature;

pub use cost::CostSpec;
pub use error::{ForgeError, Result};
pub use game::{Game, Player, Profile, Resource, Settings};
pub use numeric::{Extended, Mode, Scalar, Q};
