//! Numerical tolerance used by every approximate comparison.
//!
//! One metric rules all equality checks: the max-abs-entry distance between
//! complex matrices (or vectors, or scalars). A single `Tolerance` value is
//! threaded through validating constructors and decision procedures so a run
//! has exactly one epsilon.

use crate::error::{Error, Result};

/// Tolerance for approximate equality, max-abs-entry metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    eps: f64,
}

impl Tolerance {
    /// Construct a tolerance; must satisfy 0 < eps < 1e-3.
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1e-3) {
            return Err(Error::InvalidTolerance { eps });
        }
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Looser threshold used for commutation tests: sqrt(eps).
    pub fn commutator_eps(&self) -> f64 {
        self.eps.sqrt()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eps: 1e-9 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_1e9() {
        assert_eq!(Tolerance::default().eps(), 1e-9);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(-1e-9).is_err());
        assert!(Tolerance::new(1e-3).is_err());
        assert!(Tolerance::new(1e-6).is_ok());
    }
}
