//! Exact computational toolkit for square-difference-free sets: additive
//! energy of rationals with small denominators, divisor-function weights,
//! the gcd-colouring decomposition of linear equations in rationals, a
//! circle-method engine, and the Fourier density-increment iteration.
//!
//! Everything countable is counted in exact integer or rational arithmetic;
//! floating point only enters through quadrature, logarithms, and exponential
//! sums, each with stated tolerances.

pub mod config;
pub mod decomposition;
pub mod energy;
pub mod error;
pub mod fourier;
pub mod increment;
pub mod par;
pub mod rational;
pub mod sdf;
pub mod weights;

pub use error::{Error, Result};
pub use rational::{Frac, RationalSet, ReducedRational};
pub use sdf::IntegerSet;
