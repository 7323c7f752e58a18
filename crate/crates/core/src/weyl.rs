//! Generalized Pauli (Weyl–Heisenberg) operators, canonical Bell states, and
//! the controlled-subtraction gate.
//!
//! Conventions, used everywhere in this crate:
//!   * Z|k> = ω^k |k> with ω = exp(2πi/D)   (clock)
//!   * X|k> = |k ⊕ 1>                        (shift)
//! so that Z·X = ω·X·Z. The shift convention is the one fixed choice among
//! the two self-consistent readings of the cyclic ladder; every statement
//! checked here is covariant under that choice.

use crate::matrix::CMatrix;
use crate::modular::{add_mod, mul_mod, omega, sub_mod};
use crate::state::StateVector;
use crate::unitary::Unitary;
use num_complex::Complex64;

/// Label (n, m) of the canonical Bell state (Z^n X^m ⊗ I)|Ψ00>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BellIndex {
    pub n: usize,
    pub m: usize,
}

impl BellIndex {
    /// Reduce the components mod d.
    pub fn new(n: usize, m: usize, d: usize) -> Self {
        assert!(d >= 2);
        Self { n: n % d, m: m % d }
    }
}

/// Label of the operator Z^n X^m; same components as a Bell index.
pub type WeylLabel = BellIndex;

/// Clock operator diag(1, ω, ..., ω^{D−1}).
pub fn pauli_z(d: usize) -> Unitary {
    assert!(d >= 2, "dimension must be at least 2");
    let diag: Vec<Complex64> = (0..d).map(|k| omega(d, k as i64).unwrap()).collect();
    Unitary::new_unchecked(CMatrix::from_diag(&diag))
}

/// Cyclic shift operator, X|k> = |k ⊕ 1>.
pub fn pauli_x(d: usize) -> Unitary {
    assert!(d >= 2, "dimension must be at least 2");
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        m.set(add_mod(k, 1, d), k, Complex64::new(1.0, 0.0));
    }
    Unitary::new_unchecked(m)
}

/// Z^n · X^m.
pub fn weyl_op(d: usize, label: WeylLabel) -> Unitary {
    assert!(label.n < d && label.m < d, "label out of range");
    // (Z^n X^m)|k> = ω^{n(k ⊕ m)} |k ⊕ m>: one nonzero entry per column.
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        let row = add_mod(k, label.m, d);
        m.set(row, k, omega(d, mul_mod(label.n, row, d) as i64).unwrap());
    }
    Unitary::new_unchecked(m)
}

/// Canonical maximally entangled state |Ψ00> = (1/√D) Σ |k>|k>.
pub fn canonical_mes(d: usize) -> StateVector {
    assert!(d >= 2);
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for k in 0..d {
        amps[k * d + k] = amp;
    }
    StateVector::new(amps, 1e-12).unwrap()
}

/// Canonical Bell state (Z^n X^m ⊗ I)|Ψ00>, normalized, in dim D².
pub fn bell_state(d: usize, idx: BellIndex) -> StateVector {
    let w = weyl_op(d, idx);
    let amp = 1.0 / (d as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for k in 0..d {
        // (W ⊗ I)|k>|k> has amplitude W[j,k] on |j>|k>
        for j in 0..d {
            let v = w.get(j, k);
            if v.norm_sqr() != 0.0 {
                amps[j * d + k] = v * amp;
            }
        }
    }
    StateVector::new(amps, 1e-12).unwrap()
}

/// Controlled-subtraction gate on two registers: |a>|b> -> |a ⊖ b>|b>.
///
/// The subtracted register comes first; conjugating Z^j ⊗ I by this gate
/// yields Z^j ⊗ Z^j, which is what makes clock-power sets copiable.
pub fn gen_cnot(d: usize) -> Unitary {
    assert!(d >= 2, "dimension must be at least 2");
    let dim = d * d;
    let mut m = CMatrix::zeros(dim, dim);
    for a in 0..d {
        for b in 0..d {
            m.set(sub_mod(a, b, d) * d + b, a * d + b, Complex64::new(1.0, 0.0));
        }
    }
    Unitary::new_unchecked(m)
}
