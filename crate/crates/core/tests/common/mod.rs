//! Shared brute-force oracles for the integration suites. Everything here
//! deliberately avoids the sector machinery it is used to check: the
//! Hamiltonian comes from explicit two-site operator embedding and evolution
//! from the full-matrix exponential.

// not every test target uses every oracle
#![allow(dead_code)]

use mqcoh::linalg;
use mqcoh::DensityMatrix;
use ndarray::prelude::*;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Full 2^N x 2^N nearest-neighbor XX Hamiltonian built by embedding
/// `D (Ix Ix + Iy Iy)` on every adjacent pair.
pub fn dense_hamiltonian(n: usize, d: f64) -> Array2<f64> {
    let ix = [
        [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)],
    ];
    let iy = [
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, -0.5)],
        [Complex64::new(0.0, 0.5), Complex64::new(0.0, 0.0)],
    ];
    // two-site block in the (low spin, high spin) local ordering
    let mut pair = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (a, row) in pair.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let (a0, a1) = (a & 1, a >> 1);
            let (b0, b1) = (b & 1, b >> 1);
            *entry = ix[a0][b0] * ix[a1][b1] + iy[a0][b0] * iy[a1][b1];
        }
    }
    let dim = 1usize << n;
    let mut h = Array2::<f64>::zeros((dim, dim));
    for bond in 0..n - 1 {
        for s in 0..dim {
            let a = (s >> bond) & 3;
            let rest = s & !(3 << bond);
            for ap in 0..4usize {
                let v = pair[ap][a] * d;
                if v != Complex64::new(0.0, 0.0) {
                    assert!(v.im.abs() < 1e-15);
                    h[[rest | (ap << bond), s]] += v.re;
                }
            }
        }
    }
    h
}

/// `exp(-i H t) rho exp(i H t)` through the dense eigendecomposition of H.
pub fn dense_evolve(rho: &DensityMatrix, h: &Array2<f64>, t: f64) -> DensityMatrix {
    let (w, q) = linalg::eigh_real(h).unwrap();
    let u = linalg::expi_from_eigen(&w, &q, t);
    let u_dag = u.mapv(|z| z.conj()).t().to_owned();
    let data = u.dot(rho.data()).dot(&u_dag);
    DensityMatrix::probe(rho.qubit_count(), data).unwrap()
}

/// Random full-rank physical state `A A^dagger / Tr`.
pub fn random_physical<R: Rng>(n: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1usize << n;
    let mut a = Array2::<Complex64>::zeros((dim, dim));
    for v in a.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *v = Complex64::new(re, im);
    }
    let a_dag = a.mapv(|z| z.conj()).t().to_owned();
    let mut rho = a.dot(&a_dag);
    let tr: Complex64 = rho.diag().sum();
    rho.mapv_inplace(|z| z / tr.re);
    DensityMatrix::physical(n, rho).expect("constructed state is physical")
}

/// Relabels qubits by the site mirror (spin k -> spin N+1-k).
pub fn mirror_state(rho: &DensityMatrix) -> DensityMatrix {
    permuted(rho, |s, n| {
        let mut out = 0usize;
        for k in 0..n {
            out |= ((s >> k) & 1) << (n - 1 - k);
        }
        out
    })
}

/// Relabels basis states by flipping every bit (0 <-> 1 convention swap).
pub fn bitflip_state(rho: &DensityMatrix) -> DensityMatrix {
    permuted(rho, |s, n| !s & ((1 << n) - 1))
}

fn permuted(rho: &DensityMatrix, map: impl Fn(usize, usize) -> usize) -> DensityMatrix {
    let n = rho.qubit_count();
    let dim = rho.dim();
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            out[[map(i, n), map(j, n)]] = rho.data()[[i, j]];
        }
    }
    DensityMatrix::probe(n, out).unwrap()
}

/// Largest elementwise difference between two matrices.
pub fn max_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
