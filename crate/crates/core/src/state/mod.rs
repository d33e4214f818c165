//! Density matrices over the multiplicative basis and their coherence-order
//! structure.

pub mod basis;
pub mod coherence;
pub mod density;

pub use basis::{coherence_order, BasisLabel};
pub use coherence::{decompose, intensity, CoherenceDecomposition, OrderComponent};
pub use density::{partial_trace, tensor, thermal_state, DensityMatrix};
