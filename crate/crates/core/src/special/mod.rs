//! Log-domain special functions.
//!
//! The evidence computations need `ln Γ` and `ln K_ν` at arguments where the
//! functions themselves over- or underflow `f64` (orders in the hundreds or
//! thousands, arguments near zero or in the hundreds), so both are only
//! exposed on the log scale.

mod bessel;

pub use bessel::log_bessel_k;

use crate::error::{Error, Result};

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain("log_gamma", format!("argument must be finite and positive, got {x}")));
    }
    Ok(libm::lgamma(x))
}
