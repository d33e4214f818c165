//! Sender-to-receiver coherence transfer through a thermal transmission line.
//!
//! The chain carries the receiver on spins 1..M (low index bits), the
//! transmission line in the middle, and the sender on the last M spins (high
//! bits); the paper's printed transfer coefficients correspond to this
//! placement. The initial state is `thermal(b) (x) rho^S`, the thermal part
//! covering receiver and transmission line. Because that part is diagonal,
//! the evolved state is a thermally weighted sum over tail basis states `q`
//! of outer products of evolved columns, and the receiver matrix is linear in
//! the sender elements: `rho^R_{ab}(t) = sum alpha_{ab;ij}(t) rho^S_{ij}`.
//! The sum never mixes coherence orders.

mod spectral;

pub use spectral::MaxOrderAlpha;

use ndarray::prelude::*;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::propagator::thermal_tail_weight;
use crate::dynamics::SectorSystem;
use crate::error::{Error, Result};
use crate::state::basis;
use crate::state::density::{tensor, thermal_excited_probability, thermal_state, DensityMatrix};

/// Sender/receiver placement and the tail temperature.
#[derive(Debug, Clone, Copy)]
pub struct ChainLayout {
    qubit_count: usize,
    block_size: usize,
    inverse_temperature: f64,
}

impl ChainLayout {
    pub fn new(qubit_count: usize, block_size: usize, inverse_temperature: f64) -> Result<Self> {
        if block_size == 0 || 2 * block_size > qubit_count {
            return Err(Error::Precondition(format!(
                "need 2M <= N, got M = {block_size}, N = {qubit_count}"
            )));
        }
        if !inverse_temperature.is_finite() {
            return Err(Error::Precondition(
                "inverse temperature must be finite".into(),
            ));
        }
        Ok(Self {
            qubit_count,
            block_size,
            inverse_temperature,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Sender and receiver size M.
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn inverse_temperature(&self) -> f64 {
        self.inverse_temperature
    }

    /// Number of thermal qubits (receiver plus transmission line).
    pub fn tail_qubits(&self) -> usize {
        self.qubit_count - self.block_size
    }

    /// Receiver local dimension 2^M.
    pub fn block_dim(&self) -> usize {
        1 << self.block_size
    }

    /// Global index of sender-local state `i` on tail state `q`.
    pub fn global_index(&self, sender_local: usize, tail: usize) -> usize {
        tail | (sender_local << self.tail_qubits())
    }

    /// Smallest kept excitation `l_max` whose worst-case discarded thermal
    /// weight stays below `tol`.
    pub fn auto_l_max(&self, tol: f64) -> usize {
        let m = self.block_size;
        for l in m..self.qubit_count {
            if thermal_tail_weight(self.inverse_temperature, self.tail_qubits(), l - m) < tol {
                return l;
            }
        }
        self.qubit_count
    }

    /// Certified worst-case discarded weight at a given `l_max` (sender
    /// populations concentrated at maximal excitation).
    pub fn tail_bound(&self, l_max: usize) -> f64 {
        if l_max < self.block_size {
            return 1.0;
        }
        thermal_tail_weight(
            self.inverse_temperature,
            self.tail_qubits(),
            l_max - self.block_size,
        )
    }
}

/// Iterates the masks of `bits` bits with exactly `ones` bits set, ascending.
pub(crate) struct ExcitationMasks {
    next: Option<usize>,
    limit: usize,
}

impl ExcitationMasks {
    pub fn new(bits: usize, ones: usize) -> Self {
        let limit = 1usize << bits;
        let start = if ones > bits {
            None
        } else {
            Some((1usize << ones) - 1)
        };
        Self { next: start, limit }
    }
}

impl Iterator for ExcitationMasks {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let v = self.next?;
        if v >= self.limit {
            self.next = None;
            return None;
        }
        self.next = if v == 0 {
            None
        } else {
            // Gosper's hack: next mask with the same popcount
            let t = v | (v - 1);
            Some((t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1)))
        };
        Some(v)
    }
}

/// The linear map from sender matrix elements to receiver matrix elements at
/// a fixed time: `responses[i*dim+j]` is the receiver matrix produced by the
/// sender matrix unit `|i><j|`.
#[derive(Debug, Clone)]
pub struct TransferMap {
    t: f64,
    layout: ChainLayout,
    l_max: usize,
    neglected_weight: f64,
    responses: Vec<Array2<Complex64>>,
}

impl TransferMap {
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn layout(&self) -> &ChainLayout {
        &self.layout
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// Worst-case discarded thermal weight of the truncation.
    pub fn neglected_weight(&self) -> f64 {
        self.neglected_weight
    }

    /// Receiver response to the sender matrix unit `|i><j|`.
    pub fn response(&self, i: usize, j: usize) -> &Array2<Complex64> {
        &self.responses[i * self.layout.block_dim() + j]
    }

    /// `alpha_{ab;ij}`: receiver element (a, b) produced by sender element (i, j).
    pub fn coefficient(&self, a: usize, b: usize, i: usize, j: usize) -> Complex64 {
        self.response(i, j)[[a, b]]
    }

    /// Applies the map to a sender state.
    pub fn apply(&self, sender: &DensityMatrix) -> Result<DensityMatrix> {
        let dim = self.layout.block_dim();
        if sender.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: sender.dim(),
            });
        }
        let mut out = Array2::<Complex64>::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                let w = sender.data()[[i, j]];
                if w != Complex64::new(0.0, 0.0) {
                    out.scaled_add(w, self.response(i, j));
                }
            }
        }
        Ok(DensityMatrix::from_parts(
            self.layout.block_size,
            out,
            sender.is_physical(),
        ))
    }

    /// Conjugates every response by a receiver-local unitary, the map-level
    /// form of applying a restoring unitary after the transfer.
    pub fn conjugated(&self, u: &Array2<Complex64>) -> Result<TransferMap> {
        let dim = self.layout.block_dim();
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: u.nrows(),
            });
        }
        let u_dag = u.mapv(|z| z.conj()).t().to_owned();
        let responses = self
            .responses
            .iter()
            .map(|r| u.dot(r).dot(&u_dag))
            .collect();
        Ok(TransferMap {
            responses,
            ..self.clone()
        })
    }

    /// Combined order-1 response for the special sender family with equal
    /// elements at (1,2), (1,3), (2,4): the matrix whose (i,j) entry is
    /// `alpha_{ij} = alpha_{ij;12} + alpha_{ij;13} + alpha_{ij;24}`.
    /// Two-qubit blocks only.
    pub fn combined_order1(&self) -> Result<Array2<Complex64>> {
        if self.layout.block_size != 2 {
            return Err(Error::Precondition(
                "combined alphas are defined for M = 2".into(),
            ));
        }
        let mut m = self.response(0, 1).clone();
        m += self.response(0, 2);
        m += self.response(1, 3);
        Ok(m)
    }

    /// Largest coefficient linking different coherence orders; structurally
    /// zero for a thermal (zero-order) tail.
    pub fn cross_order_max(&self) -> f64 {
        let dim = self.layout.block_dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let sender_order = basis::coherence_order(i, j);
                for a in 0..dim {
                    for b in 0..dim {
                        if basis::coherence_order(a, b) != sender_order {
                            worst = worst.max(self.coefficient(a, b, i, j).norm());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Largest violation of the Hermitian pairing
    /// `alpha_{ba;ji} = conj(alpha_{ab;ij})`.
    pub fn conjugation_residual(&self) -> f64 {
        let dim = self.layout.block_dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                for a in 0..dim {
                    for b in 0..dim {
                        let lhs = self.coefficient(b, a, j, i);
                        let rhs = self.coefficient(a, b, i, j).conj();
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        worst
    }

    /// JSON rendering with the coefficients grouped and labeled by order
    /// (`a_<receiver>_<sender>` with 1-based element labels). Blocks other
    /// than M = 2 fall back to plain nested response arrays.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Map, Value};
        let pair = |z: Complex64| json!([z.re, z.im]);
        if self.layout.block_size != 2 {
            let dim = self.layout.block_dim();
            let responses: Vec<Value> = (0..dim)
                .flat_map(|i| (0..dim).map(move |j| (i, j)))
                .map(|(i, j)| {
                    json!({
                        "sender_element": [i + 1, j + 1],
                        "response": self
                            .response(i, j)
                            .rows()
                            .into_iter()
                            .map(|row| row.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>())
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            return json!({
                "t": self.t,
                "n_qubits": self.layout.qubit_count,
                "block_size": self.layout.block_size,
                "l_max": self.l_max,
                "neglected_weight": self.neglected_weight,
                "responses": responses,
            });
        }
        let mut order0 = Map::new();
        for &(a, b) in &[(0usize, 0usize), (1, 1), (2, 2), (1, 2)] {
            for &(i, j) in &[(0usize, 0usize), (1, 1), (2, 2), (3, 3), (1, 2), (2, 1)] {
                order0.insert(
                    format!("a_{}{}_{}{}", a + 1, b + 1, i + 1, j + 1),
                    pair(self.coefficient(a, b, i, j)),
                );
            }
        }
        let order1_elems = [(0usize, 1usize), (0, 2), (1, 3), (2, 3)];
        let mut order1 = Map::new();
        for &(a, b) in &order1_elems {
            for &(i, j) in &order1_elems {
                order1.insert(
                    format!("a_{}{}_{}{}", a + 1, b + 1, i + 1, j + 1),
                    pair(self.coefficient(a, b, i, j)),
                );
            }
        }
        let mut order2 = Map::new();
        order2.insert("a_14_14".to_string(), pair(self.coefficient(0, 3, 0, 3)));
        Value::Object(Map::from_iter([
            ("t".to_string(), json!(self.t)),
            ("n_qubits".to_string(), json!(self.layout.qubit_count)),
            ("l_max".to_string(), json!(self.l_max)),
            ("neglected_weight".to_string(), json!(self.neglected_weight)),
            ("order0".to_string(), Value::Object(order0)),
            ("order1".to_string(), Value::Object(order1)),
            ("order2".to_string(), Value::Object(order2)),
        ]))
    }
}

/// Two-qubit sender whose order-(+/-1) part is the special family with equal
/// elements `a` at (1,2), (1,3), (2,4) and zero at (3,4), on top of the
/// maximally mixed diagonal; `c14` fills the second-order element. Physical
/// for |a| up to ~0.15 and small |c14|.
pub fn special_sender(a: f64, c14: Complex64) -> Result<DensityMatrix> {
    let quarter = Complex64::new(0.25, 0.0);
    let aa = Complex64::new(a, 0.0);
    let mut m = Array2::<Complex64>::zeros((4, 4));
    for i in 0..4 {
        m[[i, i]] = quarter;
    }
    m[[0, 1]] = aa;
    m[[0, 2]] = aa;
    m[[1, 3]] = aa;
    m[[1, 0]] = aa.conj();
    m[[2, 0]] = aa.conj();
    m[[3, 1]] = aa.conj();
    m[[0, 3]] = c14;
    m[[3, 0]] = c14.conj();
    DensityMatrix::physical(2, m)
}

/// Full-chain initial state `thermal(b) (x) rho^S` (sender on the last M
/// spins). Dense, so only available below the dense cap.
pub fn initial_state(sender: &DensityMatrix, layout: &ChainLayout) -> Result<DensityMatrix> {
    if sender.qubit_count() != layout.block_size {
        return Err(Error::QubitMismatch {
            left: sender.qubit_count(),
            right: layout.block_size,
        });
    }
    if layout.qubit_count > crate::dynamics::DENSE_QUBIT_CAP {
        return Err(Error::Capacity {
            qubits: layout.qubit_count,
            cap: crate::dynamics::DENSE_QUBIT_CAP,
        });
    }
    let tail = thermal_state(layout.inverse_temperature, layout.tail_qubits())?;
    Ok(tensor(&tail, sender))
}

/// Extracts the transfer map at time `t`, keeping components whose bra and
/// ket excitations stay at or below `l_max`. The system must carry at least
/// the sectors up to `l_max`.
pub fn extract_transfer_map(
    sys: &SectorSystem,
    layout: &ChainLayout,
    t: f64,
    l_max: usize,
) -> Result<TransferMap> {
    let n = layout.qubit_count;
    let m = layout.block_size;
    if sys.qubit_count() != n {
        return Err(Error::QubitMismatch {
            left: sys.qubit_count(),
            right: n,
        });
    }
    if l_max < m {
        return Err(Error::Precondition(format!(
            "l_max = {l_max} is below the sender block excitation cap {m}"
        )));
    }
    let l_max = l_max.min(n);
    if sys.max_excitation() < l_max {
        return Err(Error::Precondition(format!(
            "system carries sectors up to {}, need {l_max}",
            sys.max_excitation()
        )));
    }
    let props = sys.propagators(t)?;
    let dim_r = layout.block_dim();
    let tail_bits = layout.tail_qubits();
    let p = thermal_excited_probability(layout.inverse_temperature);

    // positions of (x << M) | a within sector l, x ascending with fixed popcount
    let traced_positions = |l: usize, a: usize| -> Vec<u32> {
        let need = l as i64 - (a.count_ones() as i64);
        if need < 0 || need as usize > n - m {
            return Vec::new();
        }
        ExcitationMasks::new(n - m, need as usize)
            .map(|x| {
                sys.locate((x << m) | a)
                    .expect("state within kept sectors")
                    .1 as u32
            })
            .collect()
    };
    let mut traced: Vec<Vec<Vec<u32>>> = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        traced.push((0..dim_r).map(|a| traced_positions(l, a)).collect());
    }

    let exc_local: Vec<usize> = (0..dim_r).map(|i| i.count_ones() as usize).collect();

    // sum over tail states q, grouped by excitation; embarrassingly parallel
    let responses = (0..=l_max.min(tail_bits))
        .into_par_iter()
        .flat_map_iter(|e| {
            let weight = p.powi(e as i32) * (1.0 - p).powi((tail_bits - e) as i32);
            ExcitationMasks::new(tail_bits, e).map(move |q| (e, q, weight))
        })
        .fold(
            || vec![Array2::<Complex64>::zeros((dim_r, dim_r)); dim_r * dim_r],
            |mut acc, (e, q, weight)| {
                // evolved columns V |i, q> for each sender-local state that fits
                let cols: Vec<Option<(usize, Vec<Complex64>)>> = (0..dim_r)
                    .map(|i| {
                        let l = exc_local[i] + e;
                        if l > l_max {
                            return None;
                        }
                        let (_, pos) = sys.locate(layout.global_index(i, q)).unwrap();
                        let col = props.block(l).column(pos).to_vec();
                        Some((l, col))
                    })
                    .collect();
                for i in 0..dim_r {
                    let Some((li, ui)) = cols[i].as_ref() else {
                        continue;
                    };
                    for j in 0..dim_r {
                        let Some((lj, uj)) = cols[j].as_ref() else {
                            continue;
                        };
                        let out = &mut acc[i * dim_r + j];
                        for a in 0..dim_r {
                            let pa = &traced[*li][a];
                            if pa.is_empty() {
                                continue;
                            }
                            for b in 0..dim_r {
                                if lj.wrapping_sub(exc_local[b]) != li.wrapping_sub(exc_local[a]) {
                                    continue;
                                }
                                let pb = &traced[*lj][b];
                                let mut dot = Complex64::new(0.0, 0.0);
                                for (pi, pj) in pa.iter().zip(pb.iter()) {
                                    dot += ui[*pi as usize] * uj[*pj as usize].conj();
                                }
                                out[[a, b]] += weight * dot;
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![Array2::<Complex64>::zeros((dim_r, dim_r)); dim_r * dim_r],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += &y;
                }
                a
            },
        );

    Ok(TransferMap {
        t,
        layout: *layout,
        l_max,
        neglected_weight: layout.tail_bound(l_max),
        responses,
    })
}

/// Receiver state at time `t` for a concrete sender.
pub fn receiver_state(
    sender: &DensityMatrix,
    sys: &SectorSystem,
    layout: &ChainLayout,
    t: f64,
    l_max: usize,
) -> Result<DensityMatrix> {
    extract_transfer_map(sys, layout, t, l_max)?.apply(sender)
}

/// Grid scan of `|alpha(t)|` for the maximal-order coefficient followed by a
/// golden-section refinement; returns the maximizer and the value there.
/// Plateaus break toward the smallest time.
pub fn find_optimal_time(
    sys: &SectorSystem,
    layout: &ChainLayout,
    t_range: (f64, f64),
    grid_points: usize,
    l_max: usize,
) -> Result<(f64, f64)> {
    let (lo, hi) = t_range;
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Precondition(format!(
            "empty time range [{lo}, {hi}]"
        )));
    }
    if grid_points < 2 {
        return Err(Error::Precondition("need at least 2 grid points".into()));
    }
    let eval = MaxOrderAlpha::build(sys, layout, l_max)?;
    let step = (hi - lo) / (grid_points - 1) as f64;
    let values: Vec<f64> = (0..grid_points)
        .into_par_iter()
        .map(|k| eval.eval(lo + step * k as f64).norm())
        .collect();
    let mut best = 0usize;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = k;
        }
    }
    let a = lo + step * best.saturating_sub(1) as f64;
    let b = (lo + step * (best + 1) as f64).min(hi);
    let t_star = golden_max(|t| eval.eval(t).norm(), a, b, 1e-5);
    Ok((t_star, eval.eval(t_star).norm()))
}

/// Golden-section maximization to relative tolerance `rel` on [a, b].
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > rel * a.abs().max(1.0) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
