//! Local copiability: decision procedures, copier construction, the
//! four-party copy protocol, and the diagonal-solution nullspace scan.
//!
//! A set of maximally entangled states (U_j ⊗ I)|Ψ00> is locally copiable in
//! prime dimension exactly when, after right-normalizing by U_0, all members
//! are simultaneously diagonal with eigenvalue lists ω^{n_j·k} in a common
//! basis — phases of the whole operator aside. The decision procedure below
//! constructs that witness or reports the first obstruction it hits.

use crate::eig::{eig_unitary, simultaneous_diagonalize};
use crate::error::{Error, Result};
use crate::matrix::{apply_to_subsystems, CMatrix};
use crate::meset::MESet;
use crate::modular::{is_prime, mul_mod, omega, sub_mod};
use crate::state::StateVector;
use crate::tolerance::Tolerance;
use crate::unitary::Unitary;
use crate::weyl::gen_cnot;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Angular tolerance for matching an eigenvalue ratio to a root-of-unity
/// lattice point: 1e-6 · 2π/D, well below the lattice spacing for D <= 7.
fn lattice_angle_eps(d: usize) -> f64 {
    1e-6 * TAU / d as f64
}

/// Constructive copiability certificate.
///
/// For each member j of the right-normalized set:
/// U_j·U_0† = phases[j] · V · diag(ω^{exponents[j]·k})_k · V†
/// within 1e-7 in the max-abs metric.
#[derive(Debug, Clone)]
pub struct CopyWitness {
    pub basis: Unitary,
    pub exponents: Vec<usize>,
    pub phases: Vec<Complex64>,
}

impl CopyWitness {
    pub fn d(&self) -> usize {
        self.basis.dim()
    }

    /// The phase-stripped member j: V · diag(ω^{n_j k}) · V†.
    pub fn normalized_member(&self, j: usize) -> Unitary {
        let d = self.d();
        let n = self.exponents[j];
        let diag: Vec<Complex64> = (0..d)
            .map(|k| omega(d, mul_mod(n, k, d) as i64).unwrap())
            .collect();
        let m = self
            .basis
            .mat()
            .matmul(&CMatrix::from_diag(&diag))
            .matmul(&self.basis.dagger().mat());
        Unitary::new_unchecked(m)
    }

    /// Largest deviation of any right-normalized member from its witnessed
    /// form; the constructor of a decision guarantees this is <= 1e-7.
    pub fn defect(&self, set: &MESet) -> f64 {
        set.right_normalized()
            .iter()
            .enumerate()
            .map(|(j, u)| {
                self.normalized_member(j)
                    .mat()
                    .scale(self.phases[j])
                    .max_abs_diff(u.mat())
            })
            .fold(0.0, f64::max)
    }
}

/// Why a set failed the copiability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// More members than the local dimension admits.
    TooMany,
    /// Right-normalized members do not pairwise commute.
    NonCommuting,
    /// Some member's spectrum is not a set of D-th root-of-unity powers.
    SpectrumNotRootsOfUnity,
    /// No basis labeling makes every exponent list linear.
    NoLinearLabeling,
}

impl FailureReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureReason::TooMany => "TooMany",
            FailureReason::NonCommuting => "NonCommuting",
            FailureReason::SpectrumNotRootsOfUnity => "SpectrumNotRootsOfUnity",
            FailureReason::NoLinearLabeling => "NoLinearLabeling",
        }
    }
}

/// Outcome of the set-copiability decision; a witness is present exactly
/// when the set is copiable.
#[derive(Debug, Clone)]
pub enum CopyDecision {
    Copiable(CopyWitness),
    NotCopiable(FailureReason),
}

impl CopyDecision {
    pub fn is_copiable(&self) -> bool {
        matches!(self, CopyDecision::Copiable(_))
    }

    pub fn witness(&self) -> Option<&CopyWitness> {
        match self {
            CopyDecision::Copiable(w) => Some(w),
            CopyDecision::NotCopiable(_) => None,
        }
    }

    pub fn failure_reason(&self) -> Option<FailureReason> {
        match self {
            CopyDecision::Copiable(_) => None,
            CopyDecision::NotCopiable(r) => Some(*r),
        }
    }
}

/// Does A·(U ⊗ I)·A† equal U ⊗ U within eps?
pub fn check_intertwine(a: &Unitary, u: &Unitary, tol: Tolerance) -> Result<bool> {
    let d = u.dim();
    if a.dim() != d * d {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", d * d),
            found: format!("{0}x{0}", a.dim()),
        });
    }
    let id = CMatrix::identity(d);
    let lhs = a
        .mat()
        .matmul(&u.mat().kron(&id))
        .matmul(&a.dagger().mat());
    let rhs = u.mat().kron(u.mat());
    Ok(lhs.max_abs_diff(&rhs) <= tol.eps())
}

/// Like `check_intertwine` but allows one fitted unit phase:
/// A·(U ⊗ I)·A† = c·(U ⊗ U)/|c|-normalized. Returns the phase when it fits.
pub(crate) fn intertwine_phase(a: &Unitary, u: &Unitary, tol: Tolerance) -> Option<Complex64> {
    let d = u.dim();
    let id = CMatrix::identity(d);
    let lhs = a
        .mat()
        .matmul(&u.mat().kron(&id))
        .matmul(&a.dagger().mat());
    let rhs = u.mat().kron(u.mat());
    let num = rhs.dagger().matmul(&lhs).trace();
    if num.norm() < 1e-12 {
        return None;
    }
    let c = num / num.norm();
    if lhs.max_abs_diff(&rhs.scale(c)) <= tol.eps().max(1e-9) {
        Some(c)
    } else {
        None
    }
}

/// Verdict of the two-member copiability criterion, with the lattice order
/// that witnessed success.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairVerdict {
    pub copiable: bool,
    /// M such that the spectrum is a rotated full set of M-th roots of unity
    /// with equal multiplicity D/M.
    pub lattice_order: Option<usize>,
}

/// Decide whether a single unitary T admits a copier for the pair
/// {|Ψ0>, (T ⊗ I)|Ψ0>}: after dividing out one global phase, the spectrum
/// must be the complete set of M-th roots of unity for some M | D, every
/// root appearing with the same multiplicity D/M.
pub fn copiable_pair(t: &Unitary, tol: Tolerance) -> Result<PairVerdict> {
    let d = t.dim();
    let spec = eig_unitary(t, tol)?;
    let anchor = spec.eigenvalues[0];
    let angle_eps = lattice_angle_eps(d);

    'm_loop: for m in 1..=d {
        if d % m != 0 {
            continue;
        }
        let step = TAU / m as f64;
        let mut counts = vec![0usize; m];
        for lam in &spec.eigenvalues {
            let ang = (lam / anchor).arg().rem_euclid(TAU);
            let slot = (ang / step).round();
            let dist = (ang - slot * step).abs().min((ang - (slot - m as f64) * step).abs());
            if dist > angle_eps {
                continue 'm_loop;
            }
            counts[(slot as usize) % m] += 1;
        }
        if counts.iter().all(|&c| c == d / m) {
            return Ok(PairVerdict {
                copiable: true,
                lattice_order: Some(m),
            });
        }
    }
    Ok(PairVerdict {
        copiable: false,
        lattice_order: None,
    })
}

/// Independent oracle for the pair criterion: a unitary A with
/// A(T⊗I)A† = T⊗T exists iff T⊗I and T⊗T are unitarily similar, i.e. share
/// their eigenvalue multiset. Compared with clustering tolerance 1e-7.
pub fn spectral_similarity_oracle(t: &Unitary, tol: Tolerance) -> Result<bool> {
    let d = t.dim();
    let spec = eig_unitary(t, tol)?;
    let mut left: Vec<Complex64> = Vec::with_capacity(d * d);
    for lam in &spec.eigenvalues {
        for _ in 0..d {
            left.push(*lam);
        }
    }
    let mut right: Vec<Complex64> = Vec::with_capacity(d * d);
    for a in &spec.eigenvalues {
        for b in &spec.eigenvalues {
            right.push(a * b);
        }
    }
    // Greedy multiset matching; values either coincide to ~1e-14 or differ
    // by a lattice gap, so nearest-unused matching is safe here.
    let mut used = vec![false; right.len()];
    for l in &left {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in right.iter().enumerate() {
            if used[i] {
                continue;
            }
            let dist = (l - r).norm();
            if best.map_or(true, |(_, bd)| dist < bd) {
                best = Some((i, dist));
            }
        }
        match best {
            Some((i, dist)) if dist <= 1e-7 => used[i] = true,
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Decide copiability of a whole set in prime dimension and build the
/// witness if one exists.
///
/// Steps: right-normalize; reject N > D; test pairwise commutation;
/// simultaneously diagonalize; quotient per-member phases; match every
/// eigenvalue list to the ω-lattice; then search the ≤ D(D−1) affine
/// relabelings pinned by the first non-identity member for one that makes
/// every exponent list linear in the label.
pub fn copiable_set_prime(set: &MESet, tol: Tolerance) -> Result<CopyDecision> {
    let d = set.d();
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension { dim: d });
    }
    let members = set.right_normalized();
    let n_members = members.len();

    if n_members > d {
        return Ok(CopyDecision::NotCopiable(FailureReason::TooMany));
    }

    for i in 0..n_members {
        for j in (i + 1)..n_members {
            let ab = members[i].mat().matmul(members[j].mat());
            let ba = members[j].mat().matmul(members[i].mat());
            if ab.max_abs_diff(&ba) > tol.commutator_eps() {
                return Ok(CopyDecision::NotCopiable(FailureReason::NonCommuting));
            }
        }
    }

    let (basis, diags) = simultaneous_diagonalize(&members, tol)?;

    // Integer exponent of each eigenvalue relative to the member's first,
    // on the D-th root lattice.
    let angle_eps = lattice_angle_eps(d);
    let step = TAU / d as f64;
    let mut exps: Vec<Vec<usize>> = Vec::with_capacity(n_members);
    for diag in &diags {
        let mut e = Vec::with_capacity(d);
        for lam in diag {
            let ang = (lam / diag[0]).arg().rem_euclid(TAU);
            let slot = (ang / step).round();
            let dist = (ang - slot * step).abs().min((ang - (slot - d as f64) * step).abs());
            if dist > angle_eps {
                return Ok(CopyDecision::NotCopiable(
                    FailureReason::SpectrumNotRootsOfUnity,
                ));
            }
            e.push((slot as usize) % d);
        }
        exps.push(e);
    }

    // Generator: first member with a non-constant exponent list.
    let generator = exps.iter().position(|e| e.iter().any(|&v| v != e[0]));
    let Some(g) = generator else {
        // All members are phases of the identity; orthogonality forces N = 1.
        let witness = CopyWitness {
            basis,
            exponents: vec![0; n_members],
            phases: diags.iter().map(|diag| unit(diag[0])).collect(),
        };
        return Ok(CopyDecision::Copiable(witness));
    };

    // In a copiable set the generator's exponents must all be distinct
    // (a linear list n·k with n ≠ 0 is a bijection for prime D).
    let mut pos = vec![usize::MAX; d];
    for (col, &v) in exps[g].iter().enumerate() {
        if pos[v] != usize::MAX {
            return Ok(CopyDecision::NotCopiable(FailureReason::NoLinearLabeling));
        }
        pos[v] = col;
    }

    for n_g in 1..d {
        for c in 0..d {
            // Relabeling sigma: label k -> the column whose generator
            // exponent is n_g·k + e_g[c]; sigma(0) = c by construction.
            let base_g = exps[g][c];
            let sigma: Vec<usize> = (0..d)
                .map(|k| pos[(mul_mod(n_g, k, d) + base_g) % d])
                .collect();
            let mut n_list = Vec::with_capacity(n_members);
            let mut ok = true;
            'member: for e in &exps {
                let base = e[sigma[0]];
                let n_j = sub_mod(e[sigma[1]], base, d);
                for (k, &s) in sigma.iter().enumerate() {
                    if sub_mod(e[s], base, d) != mul_mod(n_j, k, d) {
                        ok = false;
                        break 'member;
                    }
                }
                n_list.push(n_j);
            }
            if !ok {
                continue;
            }
            let permuted = CMatrix::from_fn(d, d, |r, k| basis.get(r, sigma[k]));
            let phases: Vec<Complex64> = diags.iter().map(|diag| unit(diag[sigma[0]])).collect();
            let witness = CopyWitness {
                basis: Unitary::new_unchecked(permuted),
                exponents: n_list,
                phases,
            };
            debug_assert!(witness.defect(set) <= 1e-7);
            return Ok(CopyDecision::Copiable(witness));
        }
    }
    Ok(CopyDecision::NotCopiable(FailureReason::NoLinearLabeling))
}

fn unit(z: Complex64) -> Complex64 {
    z / z.norm()
}

/// Copier unitary for a witnessed set: A = (V ⊗ V) · CNOT · (V ⊗ V)†.
///
/// Satisfies A·(W_j ⊗ I)·A† = W_j ⊗ W_j for every phase-stripped witnessed
/// member W_j.
pub fn build_copier(witness: &CopyWitness) -> Unitary {
    let d = witness.d();
    let vv = witness.basis.kron(&witness.basis);
    vv.mul(&gen_cnot(d)).mul(&vv.dagger())
}

/// Run the four-party copy protocol on member `j`.
///
/// Registers (1,2) hold the unknown member, (3,4) the blank, which is the
/// set's anchor state (member 0). One side applies the copier on (1,3), the
/// other its entrywise conjugate on (2,4); when member 0 is not the identity
/// the anchor frame is first removed and afterwards restored on the (2,4)
/// side, which reduces to the plain protocol when U_0 = I. The output state
/// has |<Ψ_j ⊗ Ψ_j|out>|² = 1 up to numerical error.
pub fn execute_copy(set: &MESet, j: usize, copier: &Unitary, tol: Tolerance) -> Result<StateVector> {
    let d = set.d();
    if copier.dim() != d * d {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", d * d),
            found: format!("{0}x{0}", copier.dim()),
        });
    }
    let u0 = set.unitary(0);
    let u0d = u0.dagger();
    for (i, u) in set.unitaries().iter().enumerate() {
        let member = u.mul(&u0d);
        if intertwine_phase(copier, &member, tol).is_none() {
            return Err(Error::ProtocolMismatch(format!(
                "copier does not intertwine member {i}"
            )));
        }
    }

    let input = set.state(j).tensor(&set.state(0));
    let dims = [d, d, d, d];
    let u0_conj = u0.conj();
    let u0_t = u0.transpose();

    let mut amps = input.amplitudes().to_vec();
    // Remove the anchor frame on the (2,4) side, run the copier, restore.
    amps = apply_to_subsystems(&amps, &dims, &[1], u0_conj.mat());
    amps = apply_to_subsystems(&amps, &dims, &[3], u0_conj.mat());
    amps = apply_to_subsystems(&amps, &dims, &[0, 2], copier.mat());
    amps = apply_to_subsystems(&amps, &dims, &[1, 3], copier.conj().mat());
    amps = apply_to_subsystems(&amps, &dims, &[1], u0_t.mat());
    amps = apply_to_subsystems(&amps, &dims, &[3], u0_t.mat());
    StateVector::new(amps, 1e-9).map_err(|_| {
        Error::ProtocolMismatch("copy protocol produced an unnormalized state".into())
    })
}

/// Fidelity of a copy-protocol output with the ideal |Ψ_j> ⊗ |Ψ_j>.
pub fn copy_fidelity(set: &MESet, j: usize, out: &StateVector) -> f64 {
    set.state(j).tensor(&set.state(j)).fidelity(out)
}

/// Scan the homogeneous linear system that forces solutions of the copier
/// component equations to be diagonal.
///
/// The operator must have the controlled-subtraction block structure: column
/// (a, b) supported on rows (k, l) with k ⊕ l = a, i.e.
/// A = Σ ξ^a_{b,c} |a⊖c>|c><a|<b| with each ξ^a unitary. The component
/// equations of A(U⊗I)A† = U⊗U couple the coefficient
/// Ξ^{r,s}_{b1,b2} = (ξ^{s†} ξ^r)_{b2,b1} to the single unknown U_{r,s};
/// every equation whose right-hand side vanishes for diagonal U joins the
/// homogeneous system, and the returned basis spans its solution space.
/// Every basis element is diagonal within 1e-8 for valid inputs.
pub fn lemma_nullspace_scan(a: &Unitary, d: usize, tol: Tolerance) -> Result<Vec<CMatrix>> {
    if a.dim() != d * d {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", d * d),
            found: format!("{0}x{0}", a.dim()),
        });
    }
    // Verify the block structure before scanning.
    for col_a in 0..d {
        for col_b in 0..d {
            for row_k in 0..d {
                for row_l in 0..d {
                    if (row_k + row_l) % d != col_a {
                        let v = a.get(row_k * d + row_l, col_a * d + col_b);
                        if v.norm() > tol.eps() {
                            return Err(Error::StructureViolation(format!(
                                "column ({col_a},{col_b}) leaks onto row ({row_k},{row_l}) \
                                 with amplitude {:.3e}",
                                v.norm()
                            )));
                        }
                    }
                }
            }
        }
    }

    // Extract the xi blocks: xi^a[b][c] = <a⊖c, c| A |a, b>.
    let xi: Vec<CMatrix> = (0..d)
        .map(|ablk| {
            CMatrix::from_fn(d, d, |b, c| {
                a.get(sub_mod(ablk, c, d) * d + c, ablk * d + b)
            })
        })
        .collect();

    // For each matrix entry (r, s), collect the coefficients of every
    // homogeneous equation touching it: tuples (b1, b2) with b1 ≠ b2 or
    // r⊖b1 ≠ s⊖b2. The entry is free exactly when all of them vanish.
    let mut basis = Vec::new();
    for r in 0..d {
        for s in 0..d {
            let gram = xi[s].dagger().matmul(&xi[r]);
            let mut constrained = false;
            for b1 in 0..d {
                for b2 in 0..d {
                    let diagonal_rhs = b1 == b2 && sub_mod(r, b1, d) == sub_mod(s, b2, d);
                    if diagonal_rhs {
                        continue;
                    }
                    if gram.get(b2, b1).norm() > 1e-8 {
                        constrained = true;
                    }
                }
            }
            if !constrained {
                let mut e = CMatrix::zeros(d, d);
                e.set(r, s, Complex64::new(1.0, 0.0));
                basis.push(e);
            }
        }
    }
    Ok(basis)
}
