use serde::Serialize;

/// Non-fatal conditions attached to a result.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Spectral tail above `1e-8` of the peak coefficient.
    Unresolved { tail_ratio: f64 },
    /// First extension height larger than the boundary spacing.
    CoarseFirstHeight { first_height: f64, spacing: f64 },
    /// Decay fit with poor goodness of fit (typically non-monotone data).
    LowFitQuality { r_squared: f64 },
    /// Shells with zero sup-norm dropped before fitting.
    DroppedShells { count: usize },
}

/// A value together with the warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosed<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Diagnosed<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn into_value(self) -> T {
        self.value
    }
}
