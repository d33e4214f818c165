//! Excitation-number sectors of the nearest-neighbor XX chain.
//!
//! The Hamiltonian `H = sum_i D (I_x I_x + I_y I_y)` flips adjacent "10"/"01"
//! spin pairs with amplitude D/2 and commutes with I_z, so it is block
//! diagonal over the excitation sectors. Each block is real symmetric with
//! zero diagonal.

use ndarray::prelude::*;
use once_cell::sync::OnceCell;

use crate::error::{Error, Result};
use crate::linalg;

/// Largest chain built dense over all sectors; beyond this, use
/// [`SectorSystem::truncated`].
pub const DENSE_QUBIT_CAP: usize = 14;

/// One excitation sector: its basis labels (ascending global indices) and
/// Hamiltonian block.
#[derive(Debug, Clone)]
pub struct Sector {
    pub excitation: usize,
    /// Global basis indices of the sector states, ascending.
    pub labels: Vec<usize>,
    /// Real symmetric block of dimension C(N, excitation).
    pub hamiltonian: Array2<f64>,
}

/// Cached eigendecomposition of one sector block (eigenvectors in rows).
#[derive(Debug, Clone)]
pub struct SectorEigen {
    pub values: Vec<f64>,
    pub vec_rows: Array2<f64>,
}

/// The sector-partitioned chain: basis bookkeeping plus per-sector blocks.
#[derive(Debug)]
pub struct SectorSystem {
    qubit_count: usize,
    coupling: f64,
    max_excitation: usize,
    sectors: Vec<Sector>,
    /// Global index -> (sector, position); usize::MAX marks a dropped state.
    lookup: Vec<(u32, u32)>,
    eigen: OnceCell<Vec<SectorEigen>>,
}

const DROPPED: (u32, u32) = (u32::MAX, u32::MAX);

impl SectorSystem {
    /// Builds all N+1 sectors. Requires `2 <= N <= DENSE_QUBIT_CAP`.
    pub fn new(qubit_count: usize, coupling: f64) -> Result<Self> {
        if qubit_count > DENSE_QUBIT_CAP {
            return Err(Error::Capacity {
                qubits: qubit_count,
                cap: DENSE_QUBIT_CAP,
            });
        }
        Self::build(qubit_count, coupling, qubit_count)
    }

    /// Builds only the sectors with excitation count `<= max_excitation`,
    /// for chains too large to treat dense.
    pub fn truncated(qubit_count: usize, coupling: f64, max_excitation: usize) -> Result<Self> {
        Self::build(qubit_count, coupling, max_excitation.min(qubit_count))
    }

    fn build(qubit_count: usize, coupling: f64, max_excitation: usize) -> Result<Self> {
        if qubit_count < 2 {
            return Err(Error::Precondition("chain needs at least 2 qubits".into()));
        }
        if qubit_count >= usize::BITS as usize - 1 {
            return Err(Error::Precondition(format!(
                "{qubit_count} qubits unsupported"
            )));
        }
        if coupling == 0.0 || !coupling.is_finite() {
            return Err(Error::Precondition(
                "coupling constant must be finite and nonzero".into(),
            ));
        }
        let dim = 1usize << qubit_count;
        let mut labels_by_sector: Vec<Vec<usize>> = vec![Vec::new(); max_excitation + 1];
        let mut lookup = vec![DROPPED; dim];
        for (s, slot) in lookup.iter_mut().enumerate() {
            let e = s.count_ones() as usize;
            if e <= max_excitation {
                let pos = labels_by_sector[e].len();
                *slot = (e as u32, pos as u32);
                labels_by_sector[e].push(s);
            }
        }
        let half = coupling / 2.0;
        let sectors = labels_by_sector
            .into_iter()
            .enumerate()
            .map(|(e, labels)| {
                let d = labels.len();
                let mut h = Array2::<f64>::zeros((d, d));
                for (row, &s) in labels.iter().enumerate() {
                    for bond in 0..qubit_count - 1 {
                        let pair = (s >> bond) & 3;
                        if pair == 1 || pair == 2 {
                            let (_, col) = lookup[s ^ (3 << bond)];
                            h[[row, col as usize]] = half;
                        }
                    }
                }
                Sector {
                    excitation: e,
                    labels,
                    hamiltonian: h,
                }
            })
            .collect();
        Ok(Self {
            qubit_count,
            coupling,
            max_excitation,
            sectors,
            lookup,
            eigen: OnceCell::new(),
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Highest excitation sector that was built (N when not truncated).
    pub fn max_excitation(&self) -> usize {
        self.max_excitation
    }

    pub fn is_truncated(&self) -> bool {
        self.max_excitation < self.qubit_count
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector(&self, excitation: usize) -> &Sector {
        &self.sectors[excitation]
    }

    /// (sector, position in sector) of a global basis index, if kept.
    pub fn locate(&self, global: usize) -> Option<(usize, usize)> {
        let (e, p) = self.lookup[global];
        if (e, p) == DROPPED {
            None
        } else {
            Some((e as usize, p as usize))
        }
    }

    /// Per-sector eigendecompositions, computed once and cached.
    pub fn eigen(&self) -> Result<&[SectorEigen]> {
        self.eigen
            .get_or_try_init(|| {
                self.sectors
                    .iter()
                    .map(|s| {
                        let (values, vec_rows) = linalg::eigh_real(&s.hamiltonian)?;
                        Ok(SectorEigen { values, vec_rows })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .map(Vec::as_slice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::basis;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_qubit_single_bond() {
        let d = 0.8;
        let sys = SectorSystem::new(2, d).unwrap();
        let s1 = sys.sector(1);
        assert_eq!(s1.labels, vec![1, 2]);
        assert_abs_diff_eq!(s1.hamiltonian[[0, 1]], d / 2.0);
        assert_abs_diff_eq!(s1.hamiltonian[[1, 0]], d / 2.0);
        assert_abs_diff_eq!(s1.hamiltonian[[0, 0]], 0.0);
    }

    #[test]
    fn three_qubit_one_excitation_is_tridiagonal() {
        let sys = SectorSystem::new(3, 1.0).unwrap();
        let s1 = sys.sector(1);
        assert_eq!(s1.labels, vec![1, 2, 4]);
        let h = &s1.hamiltonian;
        assert_abs_diff_eq!(h[[0, 1]], 0.5);
        assert_abs_diff_eq!(h[[1, 2]], 0.5);
        assert_abs_diff_eq!(h[[0, 2]], 0.0);
        assert_abs_diff_eq!(h[[0, 0]], 0.0);
    }

    #[test]
    fn edge_sectors_are_scalar_zero() {
        for n in 2..=6 {
            let sys = SectorSystem::new(n, 1.0).unwrap();
            for e in [0, n] {
                let s = sys.sector(e);
                assert_eq!(s.hamiltonian.nrows(), 1);
                assert_abs_diff_eq!(s.hamiltonian[[0, 0]], 0.0);
            }
        }
    }

    #[test]
    fn sector_dims_sum_to_full_space_and_blocks_are_symmetric() {
        let sys = SectorSystem::new(6, 1.3).unwrap();
        let total: usize = sys.sectors().iter().map(|s| s.labels.len()).sum();
        assert_eq!(total, 64);
        for s in sys.sectors() {
            let h = &s.hamiltonian;
            for i in 0..h.nrows() {
                for j in 0..h.ncols() {
                    assert_eq!(h[[i, j]], h[[j, i]]);
                }
            }
        }
    }

    #[test]
    fn reassembled_hamiltonian_commutes_with_iz() {
        // equivalently: every matrix element sits at coherence order zero,
        // and off-diagonal entries appear exactly on adjacent flip-flops
        let n = 5;
        let d = 0.7;
        let sys = SectorSystem::new(n, d).unwrap();
        let dim = 1usize << n;
        let mut full = Array2::<f64>::zeros((dim, dim));
        for s in sys.sectors() {
            for (i, &gi) in s.labels.iter().enumerate() {
                for (j, &gj) in s.labels.iter().enumerate() {
                    full[[gi, gj]] = s.hamiltonian[[i, j]];
                }
            }
        }
        for gi in 0..dim {
            for gj in 0..dim {
                let v = full[[gi, gj]];
                if basis::coherence_order(gi, gj) != 0 {
                    assert_eq!(v, 0.0);
                } else if gi != gj {
                    let x = gi ^ gj;
                    let adjacent_flip =
                        x.count_ones() == 2 && (x & (x >> 1)) != 0 && (gi & x).count_ones() == 1;
                    if adjacent_flip {
                        assert_abs_diff_eq!(v, d / 2.0);
                    } else {
                        assert_eq!(v, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn capacity_and_precondition_errors() {
        assert!(matches!(
            SectorSystem::new(15, 1.0),
            Err(Error::Capacity {
                qubits: 15,
                cap: DENSE_QUBIT_CAP
            })
        ));
        assert!(SectorSystem::new(1, 1.0).is_err());
        assert!(SectorSystem::new(4, 0.0).is_err());
        // truncated mode accepts the large chain
        let sys = SectorSystem::truncated(16, 1.0, 2).unwrap();
        assert_eq!(sys.sectors().len(), 3);
        assert_eq!(sys.sector(2).labels.len(), 120);
        assert!(sys.locate(0b11).is_some());
        assert!(sys.locate(0b111).is_none());
    }
}
