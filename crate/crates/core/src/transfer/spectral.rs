//! Cheap time dependence of the maximal-order transfer coefficient.
//!
//! For the maximal order M the receiver has a single element, so
//! `alpha(t) = sum_e sum_{mu,nu} K^e_{mu nu} e^{-i(lambda_mu - lambda_nu) t}`
//! with one frequency pair per eigenvector pair of the sectors (e, e+M).
//! The K matrices are built once from the sector eigenvectors; each
//! evaluation is then two real matrix-vector products, which makes dense
//! time grids affordable even at N = 20.

use ndarray::prelude::*;
use num_complex::Complex64;

use crate::dynamics::SectorSystem;
use crate::error::{Error, Result};
use crate::state::density::thermal_excited_probability;

use super::{ChainLayout, ExcitationMasks};

struct Term {
    freqs_row: Vec<f64>,
    freqs_col: Vec<f64>,
    k: Array2<f64>,
}

/// Evaluator of `alpha_{max;max}(t)`, the coefficient carrying the sender's
/// maximal-order element to the receiver's.
pub struct MaxOrderAlpha {
    terms: Vec<Term>,
}

impl MaxOrderAlpha {
    pub fn build(sys: &SectorSystem, layout: &ChainLayout, l_max: usize) -> Result<Self> {
        let n = layout.qubit_count();
        let m = layout.block_size();
        if sys.qubit_count() != n {
            return Err(Error::QubitMismatch {
                left: sys.qubit_count(),
                right: n,
            });
        }
        if l_max < m || sys.max_excitation() < l_max.min(n) {
            return Err(Error::Precondition(format!(
                "need sectors up to l_max >= {m}, got l_max = {l_max}, system max {}",
                sys.max_excitation()
            )));
        }
        let eigen = sys.eigen()?;
        let tail_bits = layout.tail_qubits();
        let p = thermal_excited_probability(layout.inverse_temperature());
        let sender_hi = layout.block_dim() - 1;
        let receiver_hi = layout.block_dim() - 1;

        let mut terms = Vec::new();
        for e in 0..=l_max.saturating_sub(m).min(tail_bits) {
            let (l1, l2) = (e, e + m);
            let e1 = &eigen[l1];
            let e2 = &eigen[l2];
            let (d1, d2) = (e1.values.len(), e2.values.len());
            let weight = p.powi(e as i32) * (1.0 - p).powi((tail_bits - e) as i32);

            // S_{mu nu} = w_e * sum_q Q1[mu, pos(0,q)] Q2[nu, pos(hi,q)]
            let qs: Vec<usize> = ExcitationMasks::new(tail_bits, e).collect();
            let mut g1 = Array2::<f64>::zeros((qs.len(), d1));
            let mut g2 = Array2::<f64>::zeros((qs.len(), d2));
            for (row, &q) in qs.iter().enumerate() {
                let p1 = sys.locate(layout.global_index(0, q)).unwrap().1;
                let p2 = sys.locate(layout.global_index(sender_hi, q)).unwrap().1;
                g1.row_mut(row).assign(&e1.vec_rows.column(p1));
                g2.row_mut(row).assign(&e2.vec_rows.column(p2));
            }
            let mut s = g1.t().dot(&g2);
            s.mapv_inplace(|x| x * weight);

            // T_{mu nu} = sum_x Q1[mu, pos(x, a=0)] Q2[nu, pos(x, b=hi)];
            // exc(x) = l1 because the receiver part contributes 0 resp. M
            let xs: Vec<usize> = ExcitationMasks::new(n - m, l1).collect();
            let mut h1 = Array2::<f64>::zeros((xs.len(), d1));
            let mut h2 = Array2::<f64>::zeros((xs.len(), d2));
            for (row, &x) in xs.iter().enumerate() {
                let p1 = sys.locate(x << m).unwrap().1;
                let p2 = sys.locate((x << m) | receiver_hi).unwrap().1;
                h1.row_mut(row).assign(&e1.vec_rows.column(p1));
                h2.row_mut(row).assign(&e2.vec_rows.column(p2));
            }
            let t_mat = h1.t().dot(&h2);

            terms.push(Term {
                freqs_row: e1.values.clone(),
                freqs_col: e2.values.clone(),
                k: &s * &t_mat,
            });
        }
        Ok(Self { terms })
    }

    /// `alpha(t) = sum_terms phi_row(t)^T K phi_col(t)^*`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let d2 = term.freqs_col.len();
            let mut psi_re = Array1::<f64>::zeros(d2);
            let mut psi_im = Array1::<f64>::zeros(d2);
            for (k, &w) in term.freqs_col.iter().enumerate() {
                let (s, c) = (w * t).sin_cos();
                psi_re[k] = c;
                psi_im[k] = s;
            }
            let y_re = term.k.dot(&psi_re);
            let y_im = term.k.dot(&psi_im);
            for (k, &w) in term.freqs_row.iter().enumerate() {
                let (s, c) = (-w * t).sin_cos();
                total += Complex64::new(c, s) * Complex64::new(y_re[k], y_im[k]);
            }
        }
        total
    }
}
