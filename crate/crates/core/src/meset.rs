//! Orthogonal sets of maximally entangled states.

use crate::error::{Error, Result};
use crate::state::StateVector;
use crate::tolerance::Tolerance;
use crate::unitary::Unitary;
use crate::weyl::{weyl_op, BellIndex};
use num_complex::Complex64;

/// An orthogonal set of maximally entangled states in dimension D ⊗ D,
/// encoded by unitaries: member j is (U_j ⊗ I)|Ψ00>.
///
/// Construction verifies each U_j is unitary and that distinct members are
/// trace-orthogonal, |tr(U_i† U_j)| <= D·eps, which is exactly orthogonality
/// of the encoded states.
#[derive(Debug, Clone)]
pub struct MESet {
    d: usize,
    unitaries: Vec<Unitary>,
}

impl MESet {
    pub fn new(d: usize, unitaries: Vec<Unitary>, tol: Tolerance) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension { dim: d, min: 2 });
        }
        if unitaries.is_empty() {
            return Err(Error::ShapeMismatch {
                expected: "at least one member".into(),
                found: "empty set".into(),
            });
        }
        for u in &unitaries {
            if u.dim() != d {
                return Err(Error::ShapeMismatch {
                    expected: format!("{d}x{d}"),
                    found: format!("{}x{}", u.dim(), u.dim()),
                });
            }
        }
        let bound = d as f64 * tol.eps();
        for i in 0..unitaries.len() {
            for j in (i + 1)..unitaries.len() {
                let overlap = unitaries[i]
                    .dagger()
                    .mat()
                    .matmul(unitaries[j].mat())
                    .trace()
                    .norm();
                if overlap > bound {
                    return Err(Error::NotOrthogonal { i, j, overlap });
                }
            }
        }
        Ok(Self { d, unitaries })
    }

    /// Set of canonical Bell states with the given labels.
    pub fn from_bell_indices(d: usize, indices: &[BellIndex], tol: Tolerance) -> Result<Self> {
        let unitaries = indices.iter().map(|&idx| weyl_op(d, idx)).collect();
        Self::new(d, unitaries, tol)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn unitaries(&self) -> &[Unitary] {
        &self.unitaries
    }

    pub fn unitary(&self, j: usize) -> &Unitary {
        &self.unitaries[j]
    }

    /// Member state (U_j ⊗ I)|Ψ00>, dim D².
    pub fn state(&self, j: usize) -> StateVector {
        let u = &self.unitaries[j];
        let d = self.d;
        let amp = 1.0 / (d as f64).sqrt();
        let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
        for k in 0..d {
            for r in 0..d {
                let v = u.get(r, k);
                if v.norm_sqr() != 0.0 {
                    amps[r * d + k] = v * amp;
                }
            }
        }
        StateVector::new(amps, 1e-10).unwrap()
    }

    /// Members multiplied on the right by U_0†, so member 0 becomes the
    /// identity and the rest are expressed relative to the anchor state.
    pub fn right_normalized(&self) -> Vec<Unitary> {
        let u0d = self.unitaries[0].dagger();
        self.unitaries.iter().map(|u| u.mul(&u0d)).collect()
    }
}
