//! Thin LAPACK wrappers for the eigensolves the rest of the crate relies on.
//!
//! Matrices are `ndarray` row-major; LAPACK is column-major. For a real
//! symmetric input the two layouts coincide. For a complex Hermitian input we
//! pass the conjugated buffer, which column-major LAPACK reads as the original
//! matrix. In both cases the returned eigenvector array holds eigenvectors in
//! **rows** (row `k` pairs with `values[k]`), which is the zero-copy layout.

use ndarray::prelude::*;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigendecomposition of a real symmetric matrix (LAPACK `dsyevd`).
///
/// Returns ascending eigenvalues and the matching eigenvectors as rows.
pub fn eigh_real(a: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if n == 0 {
        return Ok((Vec::new(), Array2::zeros((0, 0))));
    }
    let mut buf = a.clone();
    let mut w = vec![0.0f64; n];
    let ni = n as i32;
    let mut info = 0i32;
    unsafe {
        let (mut lwork, mut liwork) = (-1i32, -1i32);
        let (mut wkopt, mut iwkopt) = (0.0f64, 0i32);
        lapack_sys::dsyevd_(
            &(b'V' as i8),
            &(b'U' as i8),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            &mut wkopt,
            &lwork,
            &mut iwkopt,
            &liwork,
            &mut info,
        );
        lwork = wkopt as i32;
        liwork = iwkopt;
        let mut work = vec![0.0f64; lwork.max(1) as usize];
        let mut iwork = vec![0i32; liwork.max(1) as usize];
        lapack_sys::dsyevd_(
            &(b'V' as i8),
            &(b'U' as i8),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    Ok((w, buf))
}

/// Eigendecomposition of a complex Hermitian matrix (LAPACK `zheevd`).
///
/// Returns ascending eigenvalues and eigenvectors as rows.
pub fn eigh_hermitian(a: &Array2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if n == 0 {
        return Ok((Vec::new(), Array2::zeros((0, 0))));
    }
    // Column-major LAPACK sees the conjugated row-major buffer as `a` itself,
    // so the eigenvectors land in rows without a transpose pass.
    let mut buf = a.mapv(|z| z.conj());
    let mut w = vec![0.0f64; n];
    let ni = n as i32;
    let mut info = 0i32;
    unsafe {
        let ptr = buf.as_mut_ptr() as *mut lapack_sys::c_double_complex;
        let (mut lwork, mut lrwork, mut liwork) = (-1i32, -1i32, -1i32);
        let mut wkopt = lapack_sys::c_double_complex { re: 0.0, im: 0.0 };
        let (mut rwkopt, mut iwkopt) = (0.0f64, 0i32);
        lapack_sys::zheevd_(
            &(b'V' as i8),
            &(b'U' as i8),
            &ni,
            ptr,
            &ni,
            w.as_mut_ptr(),
            &mut wkopt,
            &lwork,
            &mut rwkopt,
            &lrwork,
            &mut iwkopt,
            &liwork,
            &mut info,
        );
        lwork = wkopt.re as i32;
        lrwork = rwkopt as i32;
        liwork = iwkopt;
        let mut work =
            vec![lapack_sys::c_double_complex { re: 0.0, im: 0.0 }; lwork.max(1) as usize];
        let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
        let mut iwork = vec![0i32; liwork.max(1) as usize];
        lapack_sys::zheevd_(
            &(b'V' as i8),
            &(b'U' as i8),
            &ni,
            ptr,
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    Ok((w, buf))
}

/// Eigenvalues only, complex Hermitian input.
pub fn eigvalsh(a: &Array2<Complex64>) -> Result<Vec<f64>> {
    eigh_hermitian(a).map(|(w, _)| w)
}

/// `exp(-i H t)` for a real symmetric `H` given its eigendecomposition
/// (eigenvectors in rows). Two real GEMMs instead of one complex one.
pub fn expi_from_eigen(values: &[f64], vec_rows: &Array2<f64>, t: f64) -> Array2<Complex64> {
    let d = values.len();
    if d == 0 {
        return Array2::zeros((0, 0));
    }
    // P = diag(e^{-i w t}) * vec_rows, split into real and imaginary parts.
    let mut p_re = vec_rows.clone();
    let mut p_im = vec_rows.clone();
    for (k, &w) in values.iter().enumerate() {
        let (s, c) = (-w * t).sin_cos();
        p_re.row_mut(k).mapv_inplace(|x| x * c);
        p_im.row_mut(k).mapv_inplace(|x| x * s);
    }
    // V = vec_rows^T . P  (so V[r,s] = sum_k Q[k,r] e^{-i w_k t} Q[k,s]).
    let v_re = vec_rows.t().dot(&p_re);
    let v_im = vec_rows.t().dot(&p_im);
    let mut v = Array2::<Complex64>::zeros((d, d));
    ndarray::azip!((v in &mut v, &re in &v_re, &im in &v_im) *v = Complex64::new(re, im));
    v
}

/// Largest absolute entry of `U^dagger U - I`.
pub fn unitarity_residual(u: &Array2<Complex64>) -> f64 {
    let d = u.nrows();
    let g = u.mapv(|z| z.conj()).t().dot(u);
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let e = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((g[[i, j]] - e).norm());
        }
    }
    worst
}
