//! Multiplicative-basis labels.
//!
//! A basis state of an N-spin chain is a bitstring (i_1 .. i_N), one bit per
//! spin, with bit value 1 marking an excited spin. Spin k owns bit 2^(k-1),
//! so `index = sum_k i_k 2^(k-1)` (zero-based; the literature's 1-based
//! enumeration is this plus one). The excitation count is the popcount.

use crate::error::{Error, Result};

/// One basis state of an N-qubit register: its index and qubit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    index: usize,
    qubit_count: usize,
}

impl BasisLabel {
    pub fn new(index: usize, qubit_count: usize) -> Result<Self> {
        if qubit_count == 0 || qubit_count > usize::BITS as usize - 1 {
            return Err(Error::Precondition(format!(
                "unsupported qubit count {qubit_count}"
            )));
        }
        if index >= (1usize << qubit_count) {
            return Err(Error::DimensionMismatch {
                expected: 1 << qubit_count,
                got: index,
            });
        }
        Ok(Self { index, qubit_count })
    }

    /// Builds the label from the per-spin bits (i_1 first).
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut index = 0usize;
        for (k, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::Precondition(format!(
                    "bit value {b} at spin {}",
                    k + 1
                )));
            }
            index |= (b as usize) << k;
        }
        Self::new(index, bits.len())
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Bits in spin order (i_1 .. i_N).
    pub fn bits(&self) -> Vec<u8> {
        (0..self.qubit_count)
            .map(|k| ((self.index >> k) & 1) as u8)
            .collect()
    }

    /// Number of excited spins.
    pub fn excitation(&self) -> u32 {
        self.index.count_ones()
    }

    /// I_z eigenvalue in the convention where the order of an element equals
    /// twice the I_z difference of its column and row labels:
    /// `(excitations - N/2) / 2`.
    pub fn iz_eigenvalue(&self) -> f64 {
        0.5 * (self.excitation() as f64 - self.qubit_count as f64 / 2.0)
    }

    /// Coherence order of the matrix element (self, other): the excitation
    /// count of the column label minus that of the row label.
    pub fn coherence_order(&self, other: &BasisLabel) -> Result<i32> {
        if self.qubit_count != other.qubit_count {
            return Err(Error::QubitMismatch {
                left: self.qubit_count,
                right: other.qubit_count,
            });
        }
        Ok(other.excitation() as i32 - self.excitation() as i32)
    }
}

/// Coherence order of element (row `i`, column `j`) for raw indices.
pub fn coherence_order(i: usize, j: usize) -> i32 {
    j.count_ones() as i32 - i.count_ones() as i32
}
