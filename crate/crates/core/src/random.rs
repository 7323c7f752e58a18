//! Seeded sampling of random unitaries, states, and channels.
//!
//! Used heavily by the test suites; handy for experiments. Everything is
//! deterministic given the generator state.

use crate::matrix::CMatrix;
use crate::modular::omega;
use crate::state::StateVector;
use crate::tolerance::Tolerance;
use crate::unitary::Unitary;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Counter-based generator used throughout; seeding is explicit.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; amplitude-level accuracy is irrelevant here.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(gaussian(rng), gaussian(rng))
    })
}

/// Orthonormalize the columns of a full-column-rank matrix (modified
/// Gram-Schmidt, two passes).
fn orthonormalize_columns(m: &CMatrix) -> CMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<Complex64>> = (0..cols).map(|j| m.column(j)).collect();
    for _pass in 0..2 {
        for j in 0..cols {
            for k in 0..j {
                let proj: Complex64 = q[k]
                    .iter()
                    .zip(&q[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for i in 0..rows {
                    let qk = q[k][i];
                    q[j][i] -= proj * qk;
                }
            }
            let norm: f64 = q[j].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            assert!(norm > 1e-12, "rank-deficient sample");
            for a in &mut q[j] {
                *a /= norm;
            }
        }
    }
    CMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

/// Haar-like random unitary (QR of a complex Gaussian matrix).
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> Unitary {
    let q = orthonormalize_columns(&gaussian_matrix(d, d, rng));
    Unitary::new(q, Tolerance::default()).expect("orthonormalized matrix is unitary")
}

/// Diagonal unitary with independent uniform phases, conjugated by a random
/// basis when `haar_basis` is set.
pub fn random_phase_diagonal(d: usize, haar_basis: bool, rng: &mut impl Rng) -> Unitary {
    let diag: Vec<Complex64> = (0..d)
        .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let dm = CMatrix::from_diag(&diag);
    let m = if haar_basis {
        let v = random_unitary(d, rng);
        v.mat().matmul(&dm).matmul(&v.dagger().mat())
    } else {
        dm
    };
    Unitary::new(m, Tolerance::default()).expect("phase diagonal is unitary")
}

/// Unitary whose spectrum is a full lattice of M-th roots of unity with
/// equal multiplicity d/M, in a Haar-random eigenbasis. M must divide d.
pub fn random_lattice_unitary(d: usize, m: usize, rng: &mut impl Rng) -> Unitary {
    assert!(m >= 1 && d % m == 0, "M must divide d");
    let mut exps: Vec<usize> = (0..d).map(|k| k % m).collect();
    // Fisher-Yates shuffle of the eigenvalue assignment.
    for i in (1..d).rev() {
        let j = rng.gen_range(0..=i);
        exps.swap(i, j);
    }
    let diag: Vec<Complex64> = exps
        .iter()
        .map(|&e| {
            if m == 1 {
                Complex64::new(1.0, 0.0)
            } else {
                omega(m, e as i64).unwrap()
            }
        })
        .collect();
    let v = random_unitary(d, rng);
    let mat = v
        .mat()
        .matmul(&CMatrix::from_diag(&diag))
        .matmul(&v.dagger().mat());
    Unitary::new(mat, Tolerance::default()).expect("lattice construction is unitary")
}

/// Random normalized pure state.
pub fn random_state(d: usize, rng: &mut impl Rng) -> StateVector {
    let amps: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    StateVector::normalized(amps)
}

/// Random density matrix (Wishart-style: G G† normalized to unit trace).
pub fn random_density(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian_matrix(d, d, rng);
    let w = g.matmul(&g.dagger());
    let t = w.trace().re;
    w.scale(Complex64::new(1.0 / t, 0.0))
}

/// Random Kraus decomposition of a channel on dimension d with k operators
/// (isometry columns split into blocks), satisfying completeness exactly up
/// to orthonormalization error.
pub fn random_kraus(d: usize, k: usize, rng: &mut impl Rng) -> Vec<CMatrix> {
    let iso = orthonormalize_columns(&gaussian_matrix(d * k, d, rng));
    (0..k)
        .map(|b| CMatrix::from_fn(d, d, |i, j| iso.get(b * d + i, j)))
        .collect()
}
