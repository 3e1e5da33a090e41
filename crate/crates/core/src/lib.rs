//! Multi-marginal repulsive optimal transport at desk scale.
//!
//! The crate computes N-marginal costs of finitely supported sub-probability
//! measures, their compactified relaxations, the dual point-configuration
//! functionals, the mean-field energies obtained as `N → ∞`, the radial
//! Coulomb minimizers in three dimensions and hard-sphere packing quantities.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::excessive_precision)]

pub mod convex;
pub mod duality;
pub mod energy;
pub mod error;
pub mod measures;
pub mod mmot;
pub mod packing;
pub mod qp;
pub mod quadrature;
pub mod radial;
pub mod selftest;

pub use error::{Error, Result};
pub use measures::{CostKind, CostSpec, DiscreteMeasure, GroundGrid, Tristate};
