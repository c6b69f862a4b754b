//! Integral points on the Markoff surfaces `x1^2 + x2^2 + x3^2 - x1*x2*x3 = k`.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`point`] holds exact triple arithmetic, the moves of the Markoff group,
//!   canonical forms and the descent to fundamental representatives.
//! * [`classify`] decides admissibility, exceptionality and Hasse failures per level.
//! * [`local`] counts points modulo prime powers and evaluates local densities.
//! * [`scan`] runs range sweeps, censuses and the lattice-point experiments.
//! * [`oracle`] is slow, independent brute force used to check everything else.

pub mod arith;
pub mod classify;
pub mod error;
pub mod local;
pub mod oracle;
pub mod point;
pub mod scan;

pub use error::{MarkoffError, Result};
pub use point::{
    bhargava_forms, canonicalize, class_number, delta, delta_expanded, enumerate_fundamental, evaluate,
    parametric_line, reduce, vieta, CanonicalPoint, ClassNumber, FundamentalSet, GammaWord, Move, ParametricLine,
    QuadForm, Sign, Triple,
};
