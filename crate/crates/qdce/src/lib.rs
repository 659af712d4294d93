//! Exact state-vector simulator of a cavity-mediated quantum delayed-choice
//! experiment.
//!
//! Three two-level atoms and one truncated cavity mode run through a fixed
//! six-stage circuit: two Ramsey preparation pulses, a resonant half pulse
//! that swaps atom A1's superposition into the cavity, a dispersive pulse
//! that stamps a phase vartheta on the ancilla-conditioned one-photon
//! component, a second resonant half pulse that moves the superposition onto
//! atom A2, and a final Ramsey mixer. The ancilla angle alpha morphs the
//! device continuously between a closed interferometer (wave statistics)
//! and an open one (particle statistics), and the two behaviours live in
//! superposition until the ancilla is read out.
//!
//! Everything is exact, dense, complex linear algebra over at most a few
//! dozen dimensions. Closed-form gates are cross-checked against an
//! eigendecomposition-based matrix exponential, intermediate states are
//! validated against norm, truncation-leakage, and cavity-reset invariants,
//! and the final statistics are compared with the closed-form two-qubit
//! description, including the affine mapping between the dial phase
//! vartheta and the interference phase phi.
//!
//! Modules:
//! - [`hilbert`]: states, operators, embeddings, partial trace, a Jacobi
//!   eigensolver, and two-qubit density matrices.
//! - [`dynamics`]: the three generators, their closed-form evolutions, and
//!   the independent matrix-exponential oracle.
//! - [`protocol`]: the circuit sequencer with labelled checkpoints and the
//!   phase-mapping fit.
//! - [`ideal`]: the closed-form two-qubit target states and statistics.
//! - [`measurement`]: postselection, visibility, white noise, concurrence.
//! - [`cli`]: the batch front end used by the `qdce` binary.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod ideal;
pub mod measurement;
pub mod protocol;

pub use error::{Error, Result};
