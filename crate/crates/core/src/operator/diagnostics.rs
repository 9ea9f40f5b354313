use std::fmt;

use serde::{Deserialize, Serialize};

/// A non-fatal accuracy concern attached to a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "warning", rename_all = "kebab-case")]
pub enum Warning {
    /// Gaussian mass wrapped past half a period on `axis`.
    PeriodizationOverlap { axis: usize, mass_fraction: f64 },
    /// The field does not vanish at the domain ends, so truncating an
    /// infinite-line integral to the grid is not justified.
    SlowDecay { boundary_ratio: f64 },
    /// Kernel phase advances by more than pi per sample at the domain edge.
    UnresolvedOscillation { spacing: f64, limit: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::PeriodizationOverlap { axis, mass_fraction } => write!(
                f,
                "heat kernel wraps around the period on axis {axis}: {mass_fraction:.3e} of its mass lies beyond half a period"
            ),
            Warning::SlowDecay { boundary_ratio } => write!(
                f,
                "field does not decay at the domain ends (boundary/max = {boundary_ratio:.3e}); infinite-line quadrature is truncated"
            ),
            Warning::UnresolvedOscillation { spacing, limit } => write!(
                f,
                "kernel oscillation unresolved: spacing {spacing:.4e} exceeds {limit:.4e}"
            ),
        }
    }
}

/// A result plus any warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosed<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Diagnosed<T> {
    pub fn new(value: T, warnings: Vec<Warning>) -> Self {
        Diagnosed { value, warnings }
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn into_value(self) -> T {
        self.value
    }
}
