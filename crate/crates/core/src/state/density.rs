//! Dense density matrices over the 2^N multiplicative basis.

use ndarray::prelude::*;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Hermiticity and unit-trace tolerance for physical states.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalue floor for positive-semidefiniteness checks; absorbs rounding
/// accumulated in propagator products.
pub const PSD_FLOOR: f64 = -1e-10;

/// A complex matrix over the 2^N multiplicative basis.
///
/// A `physical` matrix is Hermitian with unit trace and non-negative spectrum
/// (to tolerance). Non-physical instances are used as linear-map probes
/// (matrix units) and skip those checks.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    qubit_count: usize,
    data: Array2<Complex64>,
    physical: bool,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positive semidefiniteness and
    /// returns a matrix flagged physical.
    pub fn physical(qubit_count: usize, data: Array2<Complex64>) -> Result<Self> {
        let m = Self::probe(qubit_count, data)?;
        let h = m.hermiticity_residual();
        if h > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian: residual {h:.3e}"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > HERMITICITY_TOL || tr.im.abs() > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let lambda_min = m.min_eigenvalue()?;
        if lambda_min < PSD_FLOOR {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lambda_min:.3e}"
            )));
        }
        Ok(Self {
            physical: true,
            ..m
        })
    }

    /// Wraps an arbitrary square matrix of the right dimension without
    /// physicality checks (`physical = false`).
    pub fn probe(qubit_count: usize, data: Array2<Complex64>) -> Result<Self> {
        let dim = 1usize << qubit_count;
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: data.nrows(),
            });
        }
        Ok(Self {
            qubit_count,
            data,
            physical: false,
        })
    }

    /// Internal constructor for operations that preserve physicality.
    pub(crate) fn from_parts(qubit_count: usize, data: Array2<Complex64>, physical: bool) -> Self {
        Self {
            qubit_count,
            data,
            physical,
        }
    }

    /// The maximally mixed state `Identity / 2^N`.
    pub fn maximally_mixed(qubit_count: usize) -> Self {
        let dim = 1usize << qubit_count;
        let mut data = Array2::zeros((dim, dim));
        let p = Complex64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            data[[i, i]] = p;
        }
        Self {
            qubit_count,
            data,
            physical: true,
        }
    }

    /// The pure state `|index><index|`.
    pub fn basis_state(qubit_count: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubit_count;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut data = Array2::zeros((dim, dim));
        data[[index, index]] = Complex64::new(1.0, 0.0);
        Ok(Self {
            qubit_count,
            data,
            physical: true,
        })
    }

    /// The matrix unit `|i><j|`, flagged non-physical unless i = j.
    pub fn matrix_unit(qubit_count: usize, i: usize, j: usize) -> Result<Self> {
        let dim = 1usize << qubit_count;
        if i >= dim || j >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: i.max(j),
            });
        }
        let mut data = Array2::zeros((dim, dim));
        data[[i, j]] = Complex64::new(1.0, 0.0);
        Ok(Self {
            qubit_count,
            data,
            physical: false,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubit_count
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<Complex64> {
        self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().sum()
    }

    /// Tr(rho^2), real part (exact for Hermitian inputs).
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += (self.data[[i, j]] * self.data[[j, i]]).re;
            }
        }
        acc
    }

    /// Largest absolute entry of `rho - rho^dagger`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                worst = worst.max((self.data[[i, j]] - self.data[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let w = linalg::eigvalsh(&self.data)?;
        Ok(w.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// Kronecker product; A's qubits become spins 1..N_A of the result (the low
/// bits of the combined index), B's follow. Trace is multiplicative.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let (da, db) = (a.dim(), b.dim());
    let n = a.qubit_count() + b.qubit_count();
    let mut data = Array2::zeros((da * db, da * db));
    for ib in 0..db {
        for jb in 0..db {
            let w = b.data()[[ib, jb]];
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for ia in 0..da {
                for ja in 0..da {
                    data[[ia + (ib << a.qubit_count()), ja + (jb << a.qubit_count())]] =
                        a.data()[[ia, ja]] * w;
                }
            }
        }
    }
    DensityMatrix::from_parts(n, data, a.is_physical() && b.is_physical())
}

/// Reduced density matrix over the kept spins (1-based spin numbers).
///
/// Kept spins keep their relative order: ascending kept spin k becomes spin k
/// of the reduced register. Trace is preserved; coherence orders are not
/// mixed, and orders beyond the kept size vanish.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.qubit_count();
    if keep.is_empty() {
        return Err(Error::Precondition("empty keep set".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(Error::Precondition("duplicate spin in keep set".into()));
    }
    if sorted[0] < 1 || *sorted.last().unwrap() > n {
        return Err(Error::Precondition(format!("keep set outside 1..{n}")));
    }
    let k = sorted.len();
    let traced: Vec<usize> = (1..=n)
        .filter(|s| !sorted.contains(s))
        .map(|s| s - 1)
        .collect();
    let kept_bits: Vec<usize> = sorted.iter().map(|s| s - 1).collect();

    // spread local index `a` over the kept bit positions
    let compose = |a: usize, x: usize| -> usize {
        let mut g = 0usize;
        for (loc, &bit) in kept_bits.iter().enumerate() {
            g |= ((a >> loc) & 1) << bit;
        }
        for (loc, &bit) in traced.iter().enumerate() {
            g |= ((x >> loc) & 1) << bit;
        }
        g
    };

    let dk = 1usize << k;
    let dt = 1usize << traced.len();
    let mut out = Array2::zeros((dk, dk));
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..dt {
                acc += rho.data()[[compose(a, x), compose(b, x)]];
            }
            out[[a, b]] = acc;
        }
    }
    Ok(DensityMatrix::from_parts(k, out, rho.is_physical()))
}

/// Thermal equilibrium state `e^{b I_z} / Z` with `Z = (2 cosh(b/2))^N`:
/// the N-fold tensor power of `diag(e^{b/2}, e^{-b/2}) / (2 cosh(b/2))`.
/// Diagonal, so it carries only the zero-order coherence.
pub fn thermal_state(b: f64, qubit_count: usize) -> Result<DensityMatrix> {
    if qubit_count == 0 {
        return Err(Error::Precondition("qubit count must be at least 1".into()));
    }
    if !b.is_finite() {
        return Err(Error::Precondition(
            "inverse temperature must be finite".into(),
        ));
    }
    // per-qubit populations, factorized to avoid overflow at large |b| N
    let z1 = 2.0 * (b / 2.0).cosh();
    let p_ground = (b / 2.0).exp() / z1;
    let p_excited = (-b / 2.0).exp() / z1;
    let dim = 1usize << qubit_count;
    let mut data = Array2::zeros((dim, dim));
    for s in 0..dim {
        let e = s.count_ones() as i32;
        let w = p_ground.powi(qubit_count as i32 - e) * p_excited.powi(e);
        data[[s, s]] = Complex64::new(w, 0.0);
    }
    Ok(DensityMatrix::from_parts(qubit_count, data, true))
}

/// Probability that a single thermal qubit is excited: `1 / (1 + e^b)`.
pub fn thermal_excited_probability(b: f64) -> f64 {
    1.0 / (1.0 + b.exp())
}

// --- JSON wire format -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct Wire {
    n_qubits: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self.data.iter().map(|z| [z.re, z.im]).collect();
        Wire {
            n_qubits: self.qubit_count,
            entries,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = Wire::deserialize(de)?;
        let dim = if wire.n_qubits < 24 {
            1usize << wire.n_qubits
        } else {
            return Err(serde::de::Error::custom(
                "n_qubits too large for a dense state file",
            ));
        };
        if wire.entries.len() != dim * dim {
            return Err(serde::de::Error::custom(format!(
                "expected {} entries for {} qubits, got {}",
                dim * dim,
                wire.n_qubits,
                wire.entries.len()
            )));
        }
        let data = Array2::from_shape_vec(
            (dim, dim),
            wire.entries
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
        .map_err(serde::de::Error::custom)?;
        let mut m = DensityMatrix::probe(wire.n_qubits, data).map_err(serde::de::Error::custom)?;
        // flag physicality without failing the load; callers decide
        if m.hermiticity_residual() <= HERMITICITY_TOL
            && (m.trace().re - 1.0).abs() <= HERMITICITY_TOL
            && m.trace().im.abs() <= HERMITICITY_TOL
            && m.min_eigenvalue().map(|l| l >= PSD_FLOOR).unwrap_or(false)
        {
            m.physical = true;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tensor_places_first_factor_on_low_bits() {
        let a = DensityMatrix::basis_state(1, 0).unwrap(); // spin 1 ground
        let b = DensityMatrix::basis_state(1, 1).unwrap(); // spin 2 excited
        let t = tensor(&a, &b);
        // combined index = 0*2^0 + 1*2^1 = 2
        for i in 0..4 {
            let expect = if i == 2 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(t.data()[[i, i]].re, expect);
        }
        assert!(t.is_physical());
    }

    #[test]
    fn tensor_trace_is_multiplicative() {
        let mut a = Array2::zeros((2, 2));
        a[[0, 0]] = Complex64::new(0.3, 0.0);
        a[[1, 1]] = Complex64::new(0.4, 0.0);
        let mut b = Array2::zeros((2, 2));
        b[[0, 0]] = Complex64::new(2.0, 0.0);
        let a = DensityMatrix::probe(1, a).unwrap();
        let b = DensityMatrix::probe(1, b).unwrap();
        let t = tensor(&a, &b);
        assert_abs_diff_eq!(t.trace().re, 0.7 * 2.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = DensityMatrix::physical(
            1,
            ndarray::array![
                [Complex64::new(0.75, 0.0), Complex64::new(0.1, 0.2)],
                [Complex64::new(0.1, -0.2), Complex64::new(0.25, 0.0)]
            ],
        )
        .unwrap();
        let b = thermal_state(2.0, 2).unwrap();
        let full = tensor(&a, &b);
        let back = partial_trace(&full, &[1]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(
                    (back.data()[[i, j]] - a.data()[[i, j]]).norm(),
                    0.0,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[0]).is_err());
        assert!(partial_trace(&rho, &[4]).is_err());
        assert!(partial_trace(&rho, &[2, 2]).is_err());
    }

    #[test]
    fn thermal_examples() {
        // b = 0 is maximally mixed
        let t = thermal_state(0.0, 2).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(t.data()[[i, i]].re, 0.25, epsilon = 1e-15);
        }
        // b = 10, N = 1: diag(e^5, e^-5)/(2 cosh 5)
        let t = thermal_state(10.0, 1).unwrap();
        let z = 2.0 * 5.0f64.cosh();
        assert_abs_diff_eq!(t.data()[[0, 0]].re, 5.0f64.exp() / z, epsilon = 1e-15);
        assert_abs_diff_eq!(t.data()[[1, 1]].re, (-5.0f64).exp() / z, epsilon = 1e-18);
        assert_abs_diff_eq!(
            t.data()[[0, 0]].re,
            0.999_954_602_131_297_6,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            t.data()[[1, 1]].re,
            4.539_786_870_243_439e-5,
            epsilon = 1e-18
        );
        assert_abs_diff_eq!(t.trace().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn thermal_states_carry_only_zero_order_coherence() {
        for &(b, n) in &[(0.0, 3usize), (2.5, 2), (-4.0, 3), (10.0, 4)] {
            let t = thermal_state(b, n).unwrap();
            let d = crate::state::coherence::decompose(&t);
            for order in -(n as i32)..=n as i32 {
                if order != 0 {
                    assert_eq!(d.intensity(order).unwrap(), 0.0);
                }
            }
            assert!(d.intensity(0).unwrap() > 0.0);
        }
    }

    #[test]
    fn physical_rejects_non_hermitian_and_bad_trace() {
        let mut m = Array2::<Complex64>::zeros((2, 2));
        m[[0, 0]] = Complex64::new(1.0, 0.0);
        m[[0, 1]] = Complex64::new(0.5, 0.0);
        assert!(DensityMatrix::physical(1, m.clone()).is_err());
        m[[1, 0]] = Complex64::new(0.5, 0.0);
        m[[0, 0]] = Complex64::new(2.0, 0.0);
        assert!(DensityMatrix::physical(1, m).is_err());
        // negative eigenvalue
        let mut m = Array2::<Complex64>::zeros((2, 2));
        m[[0, 0]] = Complex64::new(1.5, 0.0);
        m[[1, 1]] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::physical(1, m).is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let rho = thermal_state(3.7, 2).unwrap();
        let s = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back.qubit_count(), 2);
        assert!(back.is_physical());
        for (a, b) in rho.data().iter().zip(back.data().iter()) {
            assert_eq!(a, b);
        }
    }
}
