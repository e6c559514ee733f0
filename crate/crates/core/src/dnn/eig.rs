//! Dense symmetric eigendecomposition and the cone projections built on it.

use nalgebra::{DMatrix, DVector};

/// Eigenvalues (ascending) and matching eigenvector columns.
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

#[cfg(not(feature = "openblas"))]
pub fn sym_eigen(a: &DMatrix<f64>) -> Eigen {
    let e = a.clone().symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| e.eigenvalues[i]));
    let vectors = e.eigenvectors.select_columns(&order);
    Eigen { values, vectors }
}

#[cfg(feature = "openblas")]
mod lapack {
    use std::os::raw::{c_char, c_double, c_int};

    #[link(name = "openblas")]
    extern "C" {
        pub fn dsyevr_(
            jobz: *const c_char,
            range: *const c_char,
            uplo: *const c_char,
            n: *const c_int,
            a: *mut c_double,
            lda: *const c_int,
            vl: *const c_double,
            vu: *const c_double,
            il: *const c_int,
            iu: *const c_int,
            abstol: *const c_double,
            m: *mut c_int,
            w: *mut c_double,
            z: *mut c_double,
            ldz: *const c_int,
            isuppz: *mut c_int,
            work: *mut c_double,
            lwork: *const c_int,
            iwork: *mut c_int,
            liwork: *const c_int,
            info: *mut c_int,
        );
    }
}

#[cfg(feature = "openblas")]
pub fn sym_eigen(a: &DMatrix<f64>) -> Eigen {
    use std::os::raw::c_int;
    let n = a.nrows() as c_int;
    if n == 0 {
        return Eigen {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    let mut work_a = a.clone();
    let mut w = vec![0.0; n as usize];
    let mut z = DMatrix::<f64>::zeros(n as usize, n as usize);
    let mut isuppz = vec![0 as c_int; 2 * n as usize];
    let mut m: c_int = 0;
    let mut info: c_int = 0;
    let (jobz, range, uplo) = (b'V' as _, b'A' as _, b'L' as _);
    let (vl, vu, il, iu, abstol) = (0.0, 0.0, 0 as c_int, 0 as c_int, 0.0);
    let mut wq = [0.0f64];
    let mut iwq = [0 as c_int];
    let query: c_int = -1;
    // SAFETY: all buffers are sized per the LAPACK contract for dsyevr.
    unsafe {
        lapack::dsyevr_(
            &jobz,
            &range,
            &uplo,
            &n,
            work_a.as_mut_ptr(),
            &n,
            &vl,
            &vu,
            &il,
            &iu,
            &abstol,
            &mut m,
            w.as_mut_ptr(),
            z.as_mut_ptr(),
            &n,
            isuppz.as_mut_ptr(),
            wq.as_mut_ptr(),
            &query,
            iwq.as_mut_ptr(),
            &query,
            &mut info,
        );
    }
    let lwork = wq[0] as c_int;
    let liwork = iwq[0];
    let mut work = vec![0.0; lwork as usize];
    let mut iwork = vec![0 as c_int; liwork as usize];
    unsafe {
        lapack::dsyevr_(
            &jobz,
            &range,
            &uplo,
            &n,
            work_a.as_mut_ptr(),
            &n,
            &vl,
            &vu,
            &il,
            &iu,
            &abstol,
            &mut m,
            w.as_mut_ptr(),
            z.as_mut_ptr(),
            &n,
            isuppz.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "dsyevr failed with info = {info}");
    Eigen {
        values: DVector::from_vec(w),
        vectors: z,
    }
}

/// `Σ w_i v_i v_iᵀ` over the eigenpairs with index in `range`.
fn partial_sum(e: &Eigen, range: std::ops::Range<usize>) -> DMatrix<f64> {
    let n = e.vectors.nrows();
    if range.is_empty() {
        return DMatrix::zeros(n, n);
    }
    let v = e.vectors.columns(range.start, range.len());
    let mut scaled = v.clone_owned();
    for (c, k) in range.clone().enumerate() {
        scaled.column_mut(c).scale_mut(e.values[k]);
    }
    &scaled * v.transpose()
}

/// Splits `s` into its PSD and NSD projections, computing the smaller of the
/// two from eigenpairs and the other as the difference.
pub fn split(s: &DMatrix<f64>, e: &Eigen) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = s.nrows();
    let neg = e.values.iter().take_while(|&&w| w < 0.0).count();
    if neg <= n - neg {
        let nsd = partial_sum(e, 0..neg);
        (s - &nsd, nsd)
    } else {
        let psd = partial_sum(e, neg..n);
        let nsd = s - &psd;
        (psd, nsd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_reconstructs_and_signs() {
        let s = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 2.0, -1.0, 0.5, 0.0, 0.5, 3.0]);
        let e = sym_eigen(&s);
        assert!(e.values[0] <= e.values[1] && e.values[1] <= e.values[2]);
        let (p, q) = split(&s, &e);
        assert!((&p + &q - &s).norm() < 1e-12);
        assert!(sym_eigen(&p).values[0] > -1e-12);
        assert!(sym_eigen(&q).values[2] < 1e-12);
    }
}
