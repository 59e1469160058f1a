//! Explicit-precision floating point and the transcendental constants built
//! on it.

mod bigfloat;
pub mod elementary;
pub mod expr;
pub mod gamma;
pub mod pi;

pub use bigfloat::BigFloat;
pub use expr::{ConstExpr, Signature};
pub use gamma::{factorial_growth_ratio, gamma_rational, SpougeTable};
pub use pi::pi_reference;

/// Guard bits added to requested precisions; overridable through the
/// `DOUGALL_PI_GUARD_BITS` environment variable for experiments.
pub fn guard_bits() -> u32 {
    std::env::var("DOUGALL_PI_GUARD_BITS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(32)
}

/// Bits needed for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32
}
