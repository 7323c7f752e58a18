//! Eigendecomposition for Hermitian, unitary, and commuting families of
//! matrices.
//!
//! A unitary U is normal, so its Hermitian and anti-Hermitian parts
//! H = (U+U†)/2 and K = (U−U†)/2i share eigenvectors with U. We diagonalize
//! H with a cyclic complex Jacobi sweep, then split each degenerate H-cluster
//! by diagonalizing K compressed onto the cluster. Two distinct unit-circle
//! eigenvalues cannot agree in both real and imaginary part, so this always
//! separates the spectrum. Degenerate clusters are merged at threshold 1e-7
//! before per-block rediagonalization, which makes the routine robust when
//! eigenvalues genuinely coincide.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::tolerance::Tolerance;
use crate::unitary::Unitary;
use num_complex::Complex64;

/// Threshold for merging near-equal eigenvalues into one cluster.
pub const CLUSTER_EPS: f64 = 1e-7;

/// Eigendecomposition of a unitary: eigenvalues on the unit circle and an
/// orthonormal eigenvector matrix (columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Unitary,
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// Returns (eigenvalues ascending, eigenvector columns).
pub fn eig_hermitian(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert!(a.is_square(), "eig_hermitian requires a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);

    let scale = m.max_abs().max(1.0);
    let conv = 1e-14 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m.get(p, q).norm());
            }
        }
        if off <= conv {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let r = apq.norm();
                if r <= conv * 1e-2 {
                    continue;
                }
                let phi = apq.arg();
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    let sgn = if tau >= 0.0 { 1.0 } else { -1.0 };
                    1.0 / (tau + sgn * (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e_phi = Complex64::from_polar(1.0, phi);

                // Columns: [p q] <- [p q] · [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]
                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, mip * c - miq * s * e_phi.conj());
                    m.set(i, q, mip * s * e_phi + miq * c);
                }
                // Rows: conjugate-transpose action.
                for j in 0..n {
                    let mpj = m.get(p, j);
                    let mqj = m.get(q, j);
                    m.set(p, j, mpj * c - mqj * s * e_phi);
                    m.set(q, j, mpj * s * e_phi.conj() + mqj * c);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * s * e_phi.conj());
                    v.set(i, q, vip * s * e_phi + viq * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).re.partial_cmp(&m.get(j, j).re).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| m.get(i, i).re).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    (vals, vecs)
}

/// Group sorted real values into clusters with gap below `thr`.
fn cluster_sorted(vals: &[f64], thr: f64) -> Vec<(usize, usize)> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > thr {
            blocks.push((start, i - start));
            start = i;
        }
    }
    blocks
}

/// Eigendecomposition of a normal matrix via its Hermitian/anti-Hermitian
/// parts. Returns (eigenvalues, eigenvector columns), unsorted beyond the
/// H-then-K ordering.
pub(crate) fn eig_normal(m: &CMatrix) -> (Vec<Complex64>, CMatrix) {
    let n = m.rows();
    let md = m.dagger();
    let h = m.add(&md).scale(Complex64::new(0.5, 0.0));
    let k = m.sub(&md).scale(Complex64::new(0.0, -0.5));

    let (hvals, mut v) = eig_hermitian(&h);
    for (start, len) in cluster_sorted(&hvals, CLUSTER_EPS) {
        if len < 2 {
            continue;
        }
        // Compress K onto the cluster and split it there.
        let w = CMatrix::from_fn(n, len, |i, j| v.get(i, start + j));
        let kc = w.dagger().matmul(&k).matmul(&w);
        let (_, vk) = eig_hermitian(&kc);
        let wk = w.matmul(&vk);
        for i in 0..n {
            for j in 0..len {
                v.set(i, start + j, wk.get(i, j));
            }
        }
    }

    let eigenvalues: Vec<Complex64> = (0..n)
        .map(|j| {
            let col = v.column(j);
            let mv = m.mul_vec(&col);
            col.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
        })
        .collect();
    (eigenvalues, v)
}

/// Eigendecomposition of a unitary operator.
///
/// All eigenvalues land on the unit circle and V·diag(λ)·V† reconstructs the
/// input to 1e-8 in the max-abs metric.
pub fn eig_unitary(u: &Unitary, tol: Tolerance) -> Result<Spectrum> {
    let defect = u.mat().unitary_defect();
    if defect > tol.eps() {
        return Err(Error::NotUnitary { defect });
    }
    let (eigenvalues, v) = eig_normal(u.mat());
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Unitary::new_unchecked(v),
    })
}

/// Simultaneously diagonalize a family of pairwise-commuting unitaries.
///
/// Returns the common eigenbasis V and, per input, the diagonal of V†·U·V.
/// A pair with commutator norm above sqrt(eps) aborts with the offending
/// indices and norm. The basis is refined operator by operator: each current
/// joint eigenspace is split by the next operator's spectrum, clustering at
/// 1e-7 so degenerate directions stay together.
pub fn simultaneous_diagonalize(
    us: &[Unitary],
    tol: Tolerance,
) -> Result<(Unitary, Vec<Vec<Complex64>>)> {
    assert!(!us.is_empty(), "empty family");
    let n = us[0].dim();
    for u in us {
        if u.dim() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", u.dim(), u.dim()),
            });
        }
    }
    for i in 0..us.len() {
        for j in (i + 1)..us.len() {
            let ab = us[i].mat().matmul(us[j].mat());
            let ba = us[j].mat().matmul(us[i].mat());
            let norm = ab.max_abs_diff(&ba);
            if norm > tol.commutator_eps() {
                return Err(Error::NotSimultaneouslyDiagonalizable { i, j, norm });
            }
        }
    }

    let mut v = CMatrix::identity(n);
    // (start, len) column blocks of V spanning current joint eigenspaces.
    let mut blocks: Vec<(usize, usize)> = vec![(0, n)];

    for u in us {
        let mut next_blocks = Vec::new();
        for &(start, len) in &blocks {
            if len == 1 {
                next_blocks.push((start, 1));
                continue;
            }
            let w = CMatrix::from_fn(n, len, |i, j| v.get(i, start + j));
            let m = w.dagger().matmul(u.mat()).matmul(&w);
            let (lam, vm) = eig_normal(&m);

            // Order the block's columns so equal eigenvalues are adjacent.
            let mut order: Vec<usize> = (0..len).collect();
            order.sort_by(|&a, &b| {
                lam[a]
                    .arg()
                    .partial_cmp(&lam[b].arg())
                    .unwrap()
                    .then(a.cmp(&b))
            });
            // Union adjacent-in-angle values, with wrap-around at ±π.
            let mut sub = Vec::new();
            let mut s = 0;
            for i in 1..=len {
                let split = i == len || (lam[order[i]] - lam[order[i - 1]]).norm() > CLUSTER_EPS;
                if split {
                    sub.push((s, i - s));
                    s = i;
                }
            }
            if sub.len() > 1 {
                let (fs, fl) = sub[0];
                let (ls, ll) = *sub.last().unwrap();
                if (lam[order[fs]] - lam[order[ls + ll - 1]]).norm() <= CLUSTER_EPS {
                    // wrap-around: rotate the last cluster in front of the first
                    let mut rotated: Vec<usize> = order[ls..ls + ll].to_vec();
                    rotated.extend_from_slice(&order[..ls]);
                    order = rotated;
                    sub.pop();
                    sub = std::iter::once((0usize, ll + fl))
                        .chain(sub.into_iter().skip(1).map(|(s2, l2)| (s2 + ll, l2)))
                        .collect();
                }
            }

            let wm = w.matmul(&vm);
            for (i, &col) in order.iter().enumerate() {
                for r in 0..n {
                    v.set(r, start + i, wm.get(r, col));
                }
            }
            for (s2, l2) in sub {
                next_blocks.push((start + s2, l2));
            }
        }
        blocks = next_blocks;
    }

    // Extract diagonals and verify the construction.
    let mut diags = Vec::with_capacity(us.len());
    for (idx, u) in us.iter().enumerate() {
        let d = v.dagger().matmul(u.mat()).matmul(&v);
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(d.get(i, j).norm());
                }
            }
        }
        if off > 1e-8 {
            return Err(Error::NotSimultaneouslyDiagonalizable {
                i: idx,
                j: idx,
                norm: off,
            });
        }
        diags.push((0..n).map(|i| d.get(i, i)).collect());
    }
    Ok((Unitary::new_unchecked(v), diags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{pauli_x, pauli_z};

    fn reconstruct(spec: &Spectrum) -> CMatrix {
        let v = spec.eigenvectors.mat();
        let d = CMatrix::from_diag(&spec.eigenvalues);
        v.matmul(&d).matmul(&v.dagger())
    }

    #[test]
    fn clock_operator_spectrum() {
        let z = pauli_z(3);
        let spec = eig_unitary(&z, Tolerance::default()).unwrap();
        let mut angles: Vec<f64> = spec
            .eigenvalues
            .iter()
            .map(|l| l.arg().rem_euclid(std::f64::consts::TAU))
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [0.0, std::f64::consts::TAU / 3.0, 2.0 * std::f64::consts::TAU / 3.0];
        for (a, e) in angles.iter().zip(expect) {
            assert!((a - e).abs() < 1e-10, "angle {a} vs {e}");
        }
        assert!(reconstruct(&spec).approx_eq(z.mat(), 1e-10));
    }

    #[test]
    fn shift_operator_spectrum_d2() {
        // characteristic polynomial of the d=2 shift: λ² − 1 → {1, −1}
        let x = pauli_x(2);
        let spec = eig_unitary(&x, Tolerance::default()).unwrap();
        let mut re: Vec<f64> = spec.eigenvalues.iter().map(|l| l.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-10);
        assert!((re[1] - 1.0).abs() < 1e-10);
        assert!(reconstruct(&spec).approx_eq(x.mat(), 1e-10));
    }

    #[test]
    fn identity_spectrum_is_all_ones() {
        for d in [2, 3, 5] {
            let u = Unitary::new(CMatrix::identity(d), Tolerance::default()).unwrap();
            let spec = eig_unitary(&u, Tolerance::default()).unwrap();
            for l in &spec.eigenvalues {
                assert!((l - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_unitary_input() {
        // passes a loose construction tolerance but fails the default one
        let m = CMatrix::from_diag(&[Complex64::new(1.0 + 2e-4, 0.0), Complex64::new(1.0, 0.0)]);
        let u = Unitary::new(m, Tolerance::new(5e-4).unwrap()).unwrap();
        assert!(matches!(
            eig_unitary(&u, Tolerance::default()),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn sim_diag_clock_powers() {
        let z = pauli_z(3);
        let z2 = z.mul(&z);
        let (v, diags) = simultaneous_diagonalize(&[z.clone(), z2], Tolerance::default()).unwrap();
        assert!(v.mat().is_unitary(1e-10));
        assert_eq!(diags.len(), 2);
        for d in &diags {
            for l in d {
                assert!((l.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sim_diag_rejects_clock_and_shift() {
        let err = simultaneous_diagonalize(&[pauli_x(2), pauli_z(2)], Tolerance::default());
        match err {
            Err(Error::NotSimultaneouslyDiagonalizable { i, j, norm }) => {
                assert_eq!((i, j), (0, 1));
                assert!(norm > 1.0);
            }
            other => panic!("expected non-commuting failure, got {other:?}"),
        }
    }
}
