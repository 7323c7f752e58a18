//! Tolerance-checked unitary operators.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::tolerance::Tolerance;
use num_complex::Complex64;

/// A square matrix verified unitary within tolerance at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    mat: CMatrix,
}

impl Unitary {
    pub fn new(mat: CMatrix, tol: Tolerance) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::ShapeMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", mat.rows(), mat.cols()),
            });
        }
        let defect = mat.unitary_defect();
        if defect > tol.eps() {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { mat })
    }

    /// Wrap a matrix known unitary by construction (permutations, exact
    /// phase diagonals, products of unitaries). Debug builds still verify.
    pub(crate) fn new_unchecked(mat: CMatrix) -> Self {
        debug_assert!(mat.is_unitary(1e-9), "new_unchecked got a non-unitary");
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> CMatrix {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat.get(i, j)
    }

    /// Column `j` as an amplitude vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.mat.column(j)
    }

    pub fn mul(&self, other: &Unitary) -> Unitary {
        Unitary::new_unchecked(self.mat.matmul(&other.mat))
    }

    pub fn dagger(&self) -> Unitary {
        Unitary::new_unchecked(self.mat.dagger())
    }

    pub fn kron(&self, other: &Unitary) -> Unitary {
        Unitary::new_unchecked(self.mat.kron(&other.mat))
    }

    /// Entrywise conjugate (still unitary).
    pub fn conj(&self) -> Unitary {
        Unitary::new_unchecked(self.mat.conj())
    }

    pub fn transpose(&self) -> Unitary {
        Unitary::new_unchecked(self.mat.transpose())
    }

    /// self^k by repeated multiplication.
    pub fn pow(&self, k: usize) -> Unitary {
        let mut out = Unitary::new_unchecked(CMatrix::identity(self.dim()));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn approx_eq(&self, other: &Unitary, eps: f64) -> bool {
        self.mat.approx_eq(&other.mat, eps)
    }
}
