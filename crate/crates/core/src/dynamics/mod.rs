//! Excitation-sector Hamiltonian construction and exact sector-blocked
//! evolution.

pub mod propagator;
pub mod sectors;

pub use propagator::{evolve, evolve_truncated, Propagators};
pub use sectors::{SectorSystem, DENSE_QUBIT_CAP};
