//! Decides whether an orthogonal set of maximally entangled states in a
//! prime-dimensional bipartite system can be copied or distinguished with
//! local operations and classical communication, constructs the protocols
//! that do it (copier, one-way discrimination instrument, distiller, error
//! corrector), and verifies every claim by exact dense complex linear
//! algebra.
//!
//! Organization:
//! * [`matrix`], [`state`], [`unitary`], [`eig`] — the numerical core:
//!   dense complex matrices, tensor products, partial traces,
//!   eigendecomposition of unitaries, simultaneous diagonalization.
//! * [`weyl`] — clock/shift operators, canonical Bell states, the
//!   controlled-subtraction gate.
//! * [`meset`] — validated orthogonal sets of maximally entangled states.
//! * [`copying`] — copiability decisions, copier construction, the
//!   four-party copy protocol, the diagonal-solution nullspace scan.
//! * [`discrimination`] — Schmidt decomposability, the one-way
//!   discrimination instrument, the non-locality classification.
//! * [`channels`] — Choi duality, channel copying, distillation of
//!   maximally correlated states, collective-noise error correction, and a
//!   seeded key-distribution simulation.

pub mod channels;
pub mod copying;
pub mod discrimination;
pub mod eig;
pub mod error;
pub mod matrix;
pub mod meset;
pub mod modular;
pub mod random;
pub mod state;
pub mod tolerance;
pub mod unitary;
pub mod weyl;

pub use channels::{
    channel_copy_verify, channel_from_choi, choi, collective_channel, distill,
    error_correct_verify, qkd_simulate, ChoiState, CollectiveNoiseSpec, CollectiveWeights,
    Distillation, QChannel, QkdReport,
};
pub use copying::{
    build_copier, check_intertwine, copiable_pair, copiable_set_prime, copy_fidelity,
    execute_copy, lemma_nullspace_scan, spectral_similarity_oracle, CopyDecision, CopyWitness,
    FailureReason, PairVerdict,
};
pub use discrimination::{
    build_instrument, canonical_cyclic_check, classify_set, classify_set_detailed,
    execute_discrimination, ssd_check_bell, ssd_check_mes, transported_member, Classification,
    Instrument, SchmidtWitness, Tier,
};
pub use eig::{eig_hermitian, eig_unitary, simultaneous_diagonalize, Spectrum};
pub use error::{Error, Result};
pub use matrix::{apply_to_subsystems, embed_on_subsystems, partial_trace, CMatrix};
pub use meset::MESet;
pub use modular::{add_mod, is_prime, mul_mod, omega, sub_mod};
pub use state::StateVector;
pub use tolerance::Tolerance;
pub use unitary::Unitary;
pub use weyl::{bell_state, canonical_mes, gen_cnot, pauli_x, pauli_z, weyl_op, BellIndex, WeylLabel};
