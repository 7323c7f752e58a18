//! Dense complex matrices, Kronecker products, partial traces, and
//! subsystem-local operator application.
//!
//! Everything in this crate runs on small dimensions (states live in at most
//! dim D^4 with D <= 7), so a plain row-major `Vec<Complex64>` with O(n^3)
//! multiplication is the right tool. All approximate comparisons use the
//! max-abs-entry metric.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Build from row-major data. Panics if the length does not match.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows*cols");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max-abs-entry distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, eps: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= eps
    }

    /// Unitarity defect: max-abs distance of M·M† from the identity.
    pub fn unitary_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.matmul(&self.dagger())
            .max_abs_diff(&CMatrix::identity(self.rows))
    }

    pub fn is_unitary(&self, eps: f64) -> bool {
        self.unitary_defect() <= eps
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// Kronecker product with ordering (A ⊗ B)[(i·rB + k), (j·cB + l)] = A[i,j]·B[k,l].
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = CMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Column `j` as an amplitude vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::add(self, rhs)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::sub(self, rhs)
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Partial trace of `rho` over the subsystems *not* listed in `keep`.
///
/// `dims` gives the dimension of each tensor factor, most significant first
/// (matching `kron` order); `keep` is a strictly increasing, nonempty list of
/// 0-based factor indices. The kept factors retain their original order.
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if !rho.is_square() || rho.rows() != total {
        return Err(Error::ShapeMismatch {
            expected: format!("{total}x{total} (product of subsystem dims)"),
            found: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    if keep.is_empty()
        || keep.windows(2).any(|w| w[0] >= w[1])
        || keep.iter().any(|&k| k >= dims.len())
    {
        return Err(Error::ShapeMismatch {
            expected: format!("keep: increasing subset of 0..{}", dims.len()),
            found: format!("{keep:?}"),
        });
    }

    let st = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    // Decompose a flat index over a sublist of factors into a full-space offset.
    let offset = |factors: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for &f in factors.iter().rev() {
            off += (idx % dims[f]) * st[f];
            idx /= dims[f];
        }
        off
    };

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for r in 0..kept_dim {
        let ro = offset(keep, r);
        for c in 0..kept_dim {
            let co = offset(keep, c);
            let mut sum = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let to = offset(&traced, t);
                sum += rho.get(ro + to, co + to);
            }
            out.set(r, c, sum);
        }
    }
    Ok(out)
}

/// Apply an operator acting on the listed subsystems to a full-space vector.
///
/// `op` must be square with dimension equal to the product of the target
/// dims, its tensor factors ordered as in `targets`. Runs in
/// O(total · op_dim) without forming the embedded matrix.
pub fn apply_to_subsystems(
    amps: &[Complex64],
    dims: &[usize],
    targets: &[usize],
    op: &CMatrix,
) -> Vec<Complex64> {
    let total: usize = dims.iter().product();
    assert_eq!(amps.len(), total);
    let t_dim: usize = targets.iter().map(|&t| dims[t]).product();
    assert_eq!(op.rows(), t_dim, "operator does not match target dims");
    assert!(op.is_square());

    let st = strides(dims);
    let spectators: Vec<usize> = (0..dims.len()).filter(|i| !targets.contains(i)).collect();
    let s_dim: usize = spectators.iter().map(|&k| dims[k]).product();

    // Full-space offsets of every target configuration and spectator configuration.
    let conf_offsets = |factors: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &f in factors.iter().rev() {
                    off += (idx % dims[f]) * st[f];
                    idx /= dims[f];
                }
                off
            })
            .collect()
    };
    let t_off = conf_offsets(targets, t_dim);
    let s_off = conf_offsets(&spectators, s_dim);

    let mut out = vec![Complex64::new(0.0, 0.0); total];
    let mut gathered = vec![Complex64::new(0.0, 0.0); t_dim];
    for &so in &s_off {
        for (g, &to) in gathered.iter_mut().zip(&t_off) {
            *g = amps[so + to];
        }
        for i in 0..t_dim {
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..t_dim {
                sum += op.get(i, j) * gathered[j];
            }
            out[so + t_off[i]] = sum;
        }
    }
    out
}

/// Embed an operator on the listed subsystems into the full space as a dense
/// matrix (identity on all other factors). Intended for modest total dims.
pub fn embed_on_subsystems(dims: &[usize], targets: &[usize], op: &CMatrix) -> CMatrix {
    let total: usize = dims.iter().product();
    let t_dim: usize = targets.iter().map(|&t| dims[t]).product();
    assert_eq!(op.rows(), t_dim, "operator does not match target dims");

    let st = strides(dims);
    let spectators: Vec<usize> = (0..dims.len()).filter(|i| !targets.contains(i)).collect();
    let s_dim: usize = spectators.iter().map(|&k| dims[k]).product();

    let conf_offsets = |factors: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &f in factors.iter().rev() {
                    off += (idx % dims[f]) * st[f];
                    idx /= dims[f];
                }
                off
            })
            .collect()
    };
    let t_off = conf_offsets(targets, t_dim);
    let s_off = conf_offsets(&spectators, s_dim);

    let mut out = CMatrix::zeros(total, total);
    for &so in &s_off {
        for i in 0..t_dim {
            for j in 0..t_dim {
                let v = op.get(i, j);
                if v.norm_sqr() != 0.0 {
                    out.set(so + t_off[i], so + t_off[j], v);
                }
            }
        }
    }
    out
}
