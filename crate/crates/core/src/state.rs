//! Normalized state vectors.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use num_complex::Complex64;

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Build from amplitudes, requiring |<v|v> - 1| <= eps.
    pub fn new(amps: Vec<Complex64>, eps: f64) -> Result<Self> {
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let defect = (n2 - 1.0).abs();
        if defect > eps {
            return Err(Error::NotNormalized { defect });
        }
        Ok(Self { amps })
    }

    /// Build from arbitrary amplitudes, rescaling to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Self {
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(n > 0.0, "cannot normalize the zero vector");
        Self {
            amps: amps.into_iter().map(|a| a / n).collect(),
        }
    }

    /// Computational basis state |index> of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<self|other>|^2.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// |self> ⊗ |other>.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector { amps }
    }

    /// Apply a square matrix; the caller guarantees it preserves norm.
    pub fn apply(&self, m: &CMatrix) -> StateVector {
        StateVector {
            amps: m.mul_vec(&self.amps),
        }
    }

    /// Density matrix |self><self|.
    pub fn density(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj())
    }
}
