//! Lateral Casimir force between sinusoidally corrugated plasma-model
//! plates, computed beyond the proximity force approximation through the
//! second-order response function `G(k)`.
//!
//! Lengths are in nm and wavenumbers in nm⁻¹. Energies and forces per area
//! carry a factor ħc; [`units`] converts to piconewtons.

pub mod error;
pub mod lateral;
pub mod lifshitz;
pub mod medium;
pub mod nonspec;
pub mod parallel;
pub mod quad;
pub mod response;
pub mod units;

pub use error::{CasimirError, Result};

/// A computed value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn scaled(self, factor: f64) -> Self {
        Estimate {
            value: self.value * factor,
            error: self.error * factor.abs(),
        }
    }

    /// `self / other`, with relative errors added.
    pub fn ratio(&self, other: &Estimate) -> Estimate {
        let value = self.value / other.value;
        let rel = (self.error / self.value).abs() + (other.error / other.value).abs();
        Estimate {
            value,
            error: rel * value.abs(),
        }
    }

    pub fn relative_error(&self) -> f64 {
        (self.error / self.value).abs()
    }
}
