//! Exact sector propagators and coherence-preserving evolution.
//!
//! `V^(l)(t) = exp(-i H^(l) t)` comes from the real-symmetric
//! eigendecomposition of each sector block — no time stepping. Evolution
//! conjugates each (row-sector, column-sector) block independently,
//! `rho^{(l,m)}(t) = V^(l) rho^{(l,m)}(0) V^(m)^dagger`, which keeps every
//! coherence order to itself.

use ndarray::prelude::*;
use num_complex::Complex64;

use crate::analysis::binomial;
use crate::error::{Error, Result};
use crate::linalg;
use crate::state::coherence::OrderComponent;
use crate::state::density::HERMITICITY_TOL;
use crate::state::density::{tensor, thermal_excited_probability, thermal_state, DensityMatrix};

use super::sectors::SectorSystem;

/// Per-sector unitaries at a fixed time, tied to the system that built them.
pub struct Propagators<'a> {
    system: &'a SectorSystem,
    t: f64,
    blocks: Vec<Array2<Complex64>>,
}

impl SectorSystem {
    /// Materializes `V^(l)(t)` for every built sector.
    pub fn propagators(&self, t: f64) -> Result<Propagators<'_>> {
        if !t.is_finite() {
            return Err(Error::Precondition("time must be finite".into()));
        }
        let eigen = self.eigen()?;
        let blocks = eigen
            .iter()
            .map(|e| linalg::expi_from_eigen(&e.values, &e.vec_rows, t))
            .collect();
        Ok(Propagators {
            system: self,
            t,
            blocks,
        })
    }
}

impl<'a> Propagators<'a> {
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn system(&self) -> &'a SectorSystem {
        self.system
    }

    pub fn block(&self, excitation: usize) -> &Array2<Complex64> {
        &self.blocks[excitation]
    }

    /// Worst unitarity defect over all blocks.
    pub fn unitarity_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::unitarity_residual)
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.qubit_count() != self.system.qubit_count() {
            return Err(Error::QubitMismatch {
                left: rho.qubit_count(),
                right: self.system.qubit_count(),
            });
        }
        Ok(())
    }

    /// Conjugates one (l, m) block of a dense matrix:
    /// gathers it, applies `V^(l) B V^(m)^dagger`, scatters into `out`.
    fn conjugate_block(
        &self,
        data: &Array2<Complex64>,
        l: usize,
        m: usize,
        out: &mut Array2<Complex64>,
    ) {
        let rows = &self.system.sector(l).labels;
        let cols = &self.system.sector(m).labels;
        let mut block = Array2::<Complex64>::zeros((rows.len(), cols.len()));
        for (bi, &gi) in rows.iter().enumerate() {
            for (bj, &gj) in cols.iter().enumerate() {
                block[[bi, bj]] = data[[gi, gj]];
            }
        }
        let vl = &self.blocks[l];
        let vm_dag = self.blocks[m].mapv(|z| z.conj());
        let evolved = vl.dot(&block).dot(&vm_dag.t());
        for (bi, &gi) in rows.iter().enumerate() {
            for (bj, &gj) in cols.iter().enumerate() {
                out[[gi, gj]] = evolved[[bi, bj]];
            }
        }
    }

    /// Applies the per-order evolution map to a single order component:
    /// `sum_l V^(l) C^{(l,l+n)} (V^(l+n))^dagger`, returned dense.
    pub fn apply_to_component(&self, component: &OrderComponent) -> Result<Array2<Complex64>> {
        if component.qubit_count != self.system.qubit_count() {
            return Err(Error::QubitMismatch {
                left: component.qubit_count,
                right: self.system.qubit_count(),
            });
        }
        let dense = component.to_dense();
        let mut out = Array2::zeros(dense.raw_dim());
        let lmax = self.system.max_excitation() as i32;
        let n = component.order;
        for l in 0..=lmax {
            let m = l + n;
            if (0..=lmax).contains(&m) {
                self.conjugate_block(&dense, l as usize, m as usize, &mut out);
            }
        }
        Ok(out)
    }
}

/// Evolves a dense state by conjugating every sector block. Requires a
/// system built over all sectors. Hermiticity, trace and every coherence
/// intensity are preserved.
pub fn evolve(rho: &DensityMatrix, props: &Propagators<'_>) -> Result<DensityMatrix> {
    props.check_dim(rho)?;
    if props.system.is_truncated() {
        return Err(Error::Precondition(
            "dense evolve needs all sectors; use evolve_truncated or the transfer pipeline".into(),
        ));
    }
    let nsec = props.system.sectors().len();
    let mut out = Array2::zeros(rho.data().raw_dim());
    for l in 0..nsec {
        for m in 0..nsec {
            props.conjugate_block(rho.data(), l, m, &mut out);
        }
    }
    Ok(DensityMatrix::from_parts(
        rho.qubit_count(),
        out,
        rho.is_physical(),
    ))
}

/// Exact thermal-tail probability of more than `keep` excitations among
/// `tail_qubits` thermal qubits at inverse temperature `b`.
pub fn thermal_tail_weight(b: f64, tail_qubits: usize, keep: usize) -> f64 {
    let p = thermal_excited_probability(b);
    let mut acc = 0.0;
    for e in (keep + 1)..=tail_qubits {
        acc += binomial(tail_qubits, e as i64) as f64
            * p.powi(e as i32)
            * (1.0 - p).powi((tail_qubits - e) as i32);
    }
    acc
}

/// Evolves `thermal(b) (x) sender` (sender on the last chain sites) keeping
/// only the components whose bra and ket excitation counts both stay at or
/// below `l_max`. Returns the evolved dense state and the exact discarded
/// diagonal weight, computed from the sender populations and the binomial
/// thermal tail. Increasing `l_max` converges monotonically to the full
/// evolution.
pub fn evolve_truncated(
    sender: &DensityMatrix,
    b: f64,
    props: &Propagators<'_>,
    l_max: usize,
) -> Result<(DensityMatrix, f64)> {
    let n = props.system.qubit_count();
    let m = sender.qubit_count();
    if m >= n {
        return Err(Error::QubitMismatch { left: m, right: n });
    }
    let sender_max_exc = (0..sender.dim())
        .filter(|&i| sender.data()[[i, i]].norm() > HERMITICITY_TOL)
        .map(|i| i.count_ones() as usize)
        .max()
        .unwrap_or(0);
    if l_max < sender_max_exc {
        return Err(Error::Precondition(format!(
            "l_max = {l_max} is below the sender's maximal excitation {sender_max_exc}"
        )));
    }
    if props.system.max_excitation() < l_max.min(n) {
        return Err(Error::Precondition(format!(
            "system only carries sectors up to {}, need {l_max}",
            props.system.max_excitation()
        )));
    }

    let tail_qubits = n - m;
    let full0 = tensor(&thermal_state(b, tail_qubits)?, sender);

    // exact discarded diagonal weight: sender sector populations convolved
    // with the binomial thermal tail
    let p = thermal_excited_probability(b);
    let mut sender_pop = vec![0.0f64; m + 1];
    for i in 0..sender.dim() {
        sender_pop[i.count_ones() as usize] += sender.data()[[i, i]].re;
    }
    let mut neglected = 0.0;
    for (k, &sk) in sender_pop.iter().enumerate() {
        for e in 0..=tail_qubits {
            if k + e > l_max {
                neglected += sk
                    * binomial(tail_qubits, e as i64) as f64
                    * p.powi(e as i32)
                    * (1.0 - p).powi((tail_qubits - e) as i32);
            }
        }
    }

    let mut out = Array2::zeros(full0.data().raw_dim());
    for l in 0..=l_max.min(n) {
        for mm in 0..=l_max.min(n) {
            props.conjugate_block(full0.data(), l, mm, &mut out);
        }
    }
    Ok((DensityMatrix::from_parts(n, out, false), neglected))
}
