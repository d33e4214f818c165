//! Multiple-quantum coherence dynamics in spin-1/2 XX chains.
//!
//! The crate decomposes density matrices by coherence order (the difference in
//! excitation number between the bra and ket basis states of each element),
//! evolves them exactly under excitation-conserving Hamiltonians using
//! per-sector propagators, transfers coherences from a sender block through a
//! thermal transmission line to a receiver block, and restores the sender's
//! state structure at the receiver by optimizing the phases of an
//! I_z-commuting unitary.
//!
//! Modules map onto the main concepts:
//!
//! * [`state`] — density matrices over the multiplicative basis, coherence
//!   decomposition, intensities, tensor products, partial traces, thermal states.
//! * [`analysis`] — closed-form rank bounds and maximal coherence intensities,
//!   eigenvalue pairing of single-order matrices.
//! * [`dynamics`] — excitation-sector construction of the nearest-neighbor XX
//!   Hamiltonian and exact sector-blocked propagators.
//! * [`transfer`] — sender-to-receiver coherence transfer and the linear
//!   transfer map `alpha_{ij;nm}(t)`.
//! * [`restore`] — I_z-commuting unitary families and the phase optimization
//!   that zeroes selected transfer coefficients.
//! * [`pipeline`] — the end-to-end N=20 reproduction run.

extern crate blas_src;

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod pipeline;
pub mod restore;
pub mod state;
pub mod transfer;

pub use error::{Error, Result};
pub use state::basis::BasisLabel;
pub use state::coherence::CoherenceDecomposition;
pub use state::density::DensityMatrix;
