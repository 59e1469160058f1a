//! Exact and high-precision machinery around Dougall's well-poised `7F6`
//! summation and the `1/16`-rate pi series that fall out of its dual relation.
//!
//! The crate is organised bottom-up:
//!
//! * [`numeric`]: explicit-precision [`BigFloat`](numeric::BigFloat), elementary
//!   functions, a Machin reference for pi, Spouge's Gamma and constant
//!   expression trees.
//! * [`factorial`]: exact Pochhammer arithmetic, series specifications,
//!   rational functions of the index and partial fractions.
//! * [`inversion`]: the Gould–Hsu inverse pair and its `lambda`-extension.
//! * [`dougall`]: Dougall's identity, its parity and dual forms, and the
//!   infinite-series terms derived from them.
//! * [`catalog`]: the transcribed table of pi formulae and their certification.
//! * [`engine`]: binary splitting, pi extraction, BBP digit extraction and
//!   convergence-rate reports.

pub mod catalog;
pub mod dougall;
pub mod engine;
mod error;
pub mod factorial;
pub mod inversion;
pub mod numeric;
pub mod par;
pub mod rational;
pub mod rng;

pub use error::{Error, Result};
pub use num_rational::BigRational;
