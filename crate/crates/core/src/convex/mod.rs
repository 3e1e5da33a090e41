//! Convex-analysis kernel: a dense simplex solver, convex envelopes of lattice
//! data, discrete Legendre transforms and recession slopes.

pub mod envelope;
pub mod legendre;
pub mod lp;
pub mod scalar;

pub use envelope::{envelope_1d, envelope_eval, EnvelopeValue, PiecewiseAffine};
pub use legendre::{legendre_1d, recession_slope, RecessionSlope};
pub use lp::{solve as lp_solve, LinearProgram, LpOutcome, LpSolution};
pub use scalar::{ratio, Scalar};
