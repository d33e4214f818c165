//! Coherence-order decomposition of density matrices.
//!
//! Each matrix element (i, j) belongs to exactly one order
//! `n = excitation(j) - excitation(i)`; the matrices rho^(n) built from the
//! order-n elements partition rho and sum back to it exactly. The n-order
//! coherence intensity is `I_n = Tr(rho^(n) rho^(-n))`, the squared-magnitude
//! sum of the order-n elements.

use ndarray::prelude::*;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::basis;
use crate::state::density::DensityMatrix;

/// Sparse order component: the order-n elements of a parent matrix, as a
/// coordinate list.
#[derive(Debug, Clone)]
pub struct OrderComponent {
    pub order: i32,
    pub qubit_count: usize,
    /// (row, column, value) triplets, rows ascending then columns.
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl OrderComponent {
    pub fn to_dense(&self) -> Array2<Complex64> {
        let dim = 1usize << self.qubit_count;
        let mut m = Array2::zeros((dim, dim));
        for &(i, j, v) in &self.entries {
            m[[i, j]] = v;
        }
        m
    }

    /// Sum of |entry|^2.
    pub fn squared_norm(&self) -> f64 {
        // fold from +0.0: an empty f64 Sum would yield -0.0
        self.entries.iter().fold(0.0, |acc, &(_, _, v)| acc + v.norm_sqr())
    }
}

/// The family { rho^(n) : n = -N .. N } with the intensity vector.
#[derive(Debug, Clone)]
pub struct CoherenceDecomposition {
    qubit_count: usize,
    components: Vec<OrderComponent>,
}

impl CoherenceDecomposition {
    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Component of the given order (|n| <= N).
    pub fn component(&self, order: i32) -> Result<&OrderComponent> {
        let n = self.qubit_count as i32;
        if order.abs() > n {
            return Err(Error::OrderOutOfRange {
                order,
                qubits: self.qubit_count,
            });
        }
        Ok(&self.components[(order + n) as usize])
    }

    pub fn components(&self) -> &[OrderComponent] {
        &self.components
    }

    /// I_n = Tr(rho^(n) rho^(-n)) = sum over order-n elements of |rho_ij|^2.
    pub fn intensity(&self, order: i32) -> Result<f64> {
        Ok(self.component(order)?.squared_norm())
    }

    /// All intensities, indexed by n + N.
    pub fn intensities(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(OrderComponent::squared_norm)
            .collect()
    }

    /// Sum of all intensities; equals Tr(rho^2) for Hermitian rho.
    pub fn total_intensity(&self) -> f64 {
        self.components
            .iter()
            .map(OrderComponent::squared_norm)
            .sum()
    }

    /// Reassembles the parent matrix from the components.
    pub fn reassemble(&self) -> Array2<Complex64> {
        let dim = 1usize << self.qubit_count;
        let mut m = Array2::zeros((dim, dim));
        for c in &self.components {
            for &(i, j, v) in &c.entries {
                m[[i, j]] = v;
            }
        }
        m
    }
}

/// Splits rho into its order components. Zero entries are not stored, so the
/// components are sparse; they still partition rho exactly.
pub fn decompose(rho: &DensityMatrix) -> CoherenceDecomposition {
    let n = rho.qubit_count();
    let dim = rho.dim();
    let mut components: Vec<OrderComponent> = (-(n as i32)..=n as i32)
        .map(|order| OrderComponent {
            order,
            qubit_count: n,
            entries: Vec::new(),
        })
        .collect();
    for i in 0..dim {
        for j in 0..dim {
            let v = rho.data()[[i, j]];
            if v != Complex64::new(0.0, 0.0) {
                let order = basis::coherence_order(i, j);
                components[(order + n as i32) as usize]
                    .entries
                    .push((i, j, v));
            }
        }
    }
    CoherenceDecomposition {
        qubit_count: n,
        components,
    }
}

/// I_n of rho without building the full decomposition.
pub fn intensity(rho: &DensityMatrix, order: i32) -> Result<f64> {
    let n = rho.qubit_count() as i32;
    if order.abs() > n {
        return Err(Error::OrderOutOfRange {
            order,
            qubits: rho.qubit_count(),
        });
    }
    let mut acc = 0.0;
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            if basis::coherence_order(i, j) == order {
                acc += rho.data()[[i, j]].norm_sqr();
            }
        }
    }
    Ok(acc)
}
