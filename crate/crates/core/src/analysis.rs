//! Closed-form extremal and rank results for single-order coherence matrices,
//! with their numerical verification hooks.
//!
//! For a traceless Hermitian matrix carrying only the +/-n order coherences,
//! the nonzero eigenvalues appear in +/- pairs, the rank is bounded by
//! `N_n = sum_k min(C(N,k), C(N,k+n) + C(N,k-n))`, and the maximal intensity
//! satisfies `2 I_n^max = N_n / 2^{2N}`.

use ndarray::prelude::*;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::basis;

/// Relative singular-value threshold for numeric rank.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Exact non-negative rational with power-of-two denominator, kept reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        let g = gcd(num.max(1), den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// C(n, k) with out-of-range k giving 0.
pub fn binomial(n: usize, k: i64) -> u64 {
    if k < 0 || k as usize > n {
        return 0;
    }
    let k = (k as usize).min(n - k as usize);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Rank bound `N_n` for the order-n matrix on N qubits:
/// `sum_{k=0}^{N} min(C(N,k), C(N,k+n) + C(N,k-n))`.
pub fn rank_bound(qubits: usize, order: usize) -> Result<u64> {
    check_order(qubits, order)?;
    let mut acc = 0u64;
    for k in 0..=qubits as i64 {
        let lhs = binomial(qubits, k);
        let rhs = binomial(qubits, k + order as i64) + binomial(qubits, k - order as i64);
        acc += lhs.min(rhs);
    }
    Ok(acc)
}

/// `2 I_n^max = N_n / 2^{2N}` as an exact reduced fraction.
pub fn max_intensity(qubits: usize, order: usize) -> Result<Fraction> {
    let nn = rank_bound(qubits, order)?;
    Ok(Fraction::new(nn, 1u64 << (2 * qubits)))
}

/// Extremal zero-order intensities `(1/2^N, 1)`; the minimizer is the
/// maximally mixed state, the maximizer any pure basis state.
pub fn zero_order_bounds(qubits: usize) -> (f64, f64) {
    (1.0 / (1u64 << qubits) as f64, 1.0)
}

fn check_order(qubits: usize, order: usize) -> Result<()> {
    if qubits > 31 {
        return Err(Error::Precondition(format!(
            "{qubits} qubits exceed the exact-rational range of these formulas"
        )));
    }
    if order < 1 || order > qubits {
        return Err(Error::OrderOutOfRange {
            order: order as i32,
            qubits,
        });
    }
    Ok(())
}

/// One row of the rank/intensity table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankReport {
    pub qubits: usize,
    pub order: usize,
    pub rank_bound: u64,
    pub max_intensity: Fraction,
}

/// All (N, n) rows for N = 2..=5 — fourteen in total, in ascending (N, n).
pub fn table1() -> Vec<RankReport> {
    let mut rows = Vec::new();
    for qubits in 2..=5usize {
        for order in 1..=qubits {
            rows.push(RankReport {
                qubits,
                order,
                rank_bound: rank_bound(qubits, order).unwrap(),
                max_intensity: max_intensity(qubits, order).unwrap(),
            });
        }
    }
    rows
}

/// CSV rendering of [`table1`] with header `N,n,N_n,two_I_max_num,two_I_max_den`.
pub fn table1_csv() -> String {
    let mut out = String::from("N,n,N_n,two_I_max_num,two_I_max_den\n");
    for r in table1() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.qubits, r.order, r.rank_bound, r.max_intensity.num, r.max_intensity.den
        ));
    }
    out
}

/// Checks that `m` is Hermitian and supported only on the +/-n orders.
fn check_single_order(m: &Array2<Complex64>, qubits: usize, order: usize) -> Result<()> {
    let dim = 1usize << qubits;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.nrows(),
        });
    }
    for i in 0..dim {
        for j in 0..dim {
            let v = m[[i, j]];
            if v != Complex64::new(0.0, 0.0)
                && basis::coherence_order(i, j).unsigned_abs() as usize != order
            {
                return Err(Error::Precondition(format!(
                    "entry ({i},{j}) has order {} but only +/-{order} is allowed",
                    basis::coherence_order(i, j)
                )));
            }
            if (v - m[[j, i]].conj()).norm() > 1e-12 {
                return Err(Error::Precondition("matrix is not Hermitian".into()));
            }
        }
    }
    Ok(())
}

/// Pairing residual of a single-order Hermitian matrix: after sorting the
/// eigenvalues, the k-th smallest must cancel the k-th largest. Returns
/// `max_k |lambda_k + lambda_{d-1-k}|`; valid inputs stay below 1e-10.
pub fn verify_eigen_pairing(m: &Array2<Complex64>, qubits: usize, order: usize) -> Result<f64> {
    check_order(qubits, order)?;
    check_single_order(m, qubits, order)?;
    let w = linalg::eigvalsh(m)?;
    let d = w.len();
    let mut residual = 0.0f64;
    for k in 0..d / 2 {
        residual = residual.max((w[k] + w[d - 1 - k]).abs());
    }
    if d % 2 == 1 {
        residual = residual.max(w[d / 2].abs());
    }
    Ok(residual)
}

/// Numeric rank: eigenvalue magnitudes above `RANK_REL_TOL` times the largest.
pub fn numeric_rank(m: &Array2<Complex64>) -> Result<usize> {
    let w = linalg::eigvalsh(m)?;
    let largest = w.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(w.iter()
        .filter(|&&x| x.abs() > RANK_REL_TOL * largest)
        .count())
}

/// Random Hermitian matrix supported exactly on the +/-n orders: complex
/// Gaussian entries on the order-(+n) positions, Hermitized.
pub fn random_single_order<R: Rng>(qubits: usize, order: usize, rng: &mut R) -> Array2<Complex64> {
    let dim = 1usize << qubits;
    let mut m = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            if basis::coherence_order(i, j) == order as i32 {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                m[[i, j]] = Complex64::new(re, im);
                m[[j, i]] = Complex64::new(re, -im);
            }
        }
    }
    m
}

/// Rebuilds the matrix with every nonzero eigenvalue replaced by
/// `sign(lambda)/2^N`. Generic single-order inputs turn into the intensity
/// maximizer: the nonzero spectrum is +/-1/2^N in pairs, so the squared sum
/// is `N_n / 2^{2N}` and `Identity/2^N` plus the result stays PSD.
pub fn saturate_eigenvalues(m: &Array2<Complex64>, qubits: usize) -> Result<Array2<Complex64>> {
    let (w, v_rows) = linalg::eigh_hermitian(m)?;
    let dim = m.nrows();
    let largest = w.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let scale = 1.0 / (1u64 << qubits) as f64;
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for (k, &wk) in w.iter().enumerate() {
        if largest == 0.0 || wk.abs() <= RANK_REL_TOL * largest {
            continue;
        }
        let lambda = wk.signum() * scale;
        let row = v_rows.row(k);
        for i in 0..dim {
            for j in 0..dim {
                out[[i, j]] += Complex64::new(lambda, 0.0) * row[i] * row[j].conj();
            }
        }
    }
    Ok(out)
}
