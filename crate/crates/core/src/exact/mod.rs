//! Closed-form dimension values, the Bowen equation and exact correlation integrals.

mod bowen;
mod concentration;
mod correlation;
mod dims;

pub use bowen::bowen_solve;
pub use concentration::{concentration_certificate, ConcentrationCertificate, ConcentrationStep};
pub use correlation::correlation_integral_exact;
pub use dims::{exact_dims, DimensionTable, Entry, Mapping};

use crate::error::{Error, Result};

/// `entropy · (1/λ₁ − 1/λ₂)`, taken as plain arithmetic with no sign convention imposed.
pub fn young_dimension(entropy: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    if lambda1 == 0.0 || lambda2 == 0.0 {
        return Err(Error::ZeroExponent);
    }
    if !(entropy >= 0.0 && entropy.is_finite()) || !lambda1.is_finite() || !lambda2.is_finite() {
        return Err(Error::InvalidParameters(format!(
            "entropy {entropy} must be finite and non-negative, exponents finite"
        )));
    }
    Ok(entropy * (1.0 / lambda1 - 1.0 / lambda2))
}
