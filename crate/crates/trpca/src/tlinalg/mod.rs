//! The t-product algebra: multiplication, transpose, identity, inverse, and
//! entrywise shrinkage. Factorizations live in [`tsvd`].

mod tsvd;

pub use tsvd::{
    fdiag_from_spectrum, fourier_singular_values, multi_rank, top_r_approx, tsvd, tsvd_skinny,
    tsvt, tubal_rank, TsvdFactors, TsvdMode,
};

use crate::cost;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor3::{fft_mode3, half_slices, ifft_mode3, SpectralTensor, Tensor3};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

/// t-product: per-Fourier-slice matrix products, computed for the first
/// ⌈(I3+1)/2⌉ slices and conjugate-mirrored for the rest.
pub fn tprod<T: Scalar>(a: &Tensor3<T>, b: &Tensor3<T>) -> Result<Tensor3<T>> {
    let (i1, ka, i3) = a.dims();
    let (kb, j, i3b) = b.dims();
    if ka != kb || i3 != i3b {
        return Err(Error::DimMismatch {
            context: "tprod",
            left: a.dims(),
            right: b.dims(),
        });
    }
    let sa = fft_mode3(a);
    let sb = fft_mode3(b);
    let mut out = Vec::with_capacity(half_slices(i3));
    for k in 0..half_slices(i3) {
        out.push(sa.slice(k) * sb.slice(k));
        cost::record_matmul(i1, ka, j);
    }
    ifft_mode3(&SpectralTensor::from_computed_half((i1, j, i3), out))
}

/// Direct circular-convolution t-product; O(I1·K·J·I3²) oracle for small
/// inputs.
pub fn tprod_naive<T: Scalar>(a: &Tensor3<T>, b: &Tensor3<T>) -> Result<Tensor3<T>> {
    let (i1, ka, i3) = a.dims();
    let (kb, j, i3b) = b.dims();
    if ka != kb || i3 != i3b {
        return Err(Error::DimMismatch {
            context: "tprod_naive",
            left: a.dims(),
            right: b.dims(),
        });
    }
    let mut c = Tensor3::zeros((i1, j, i3));
    for t in 0..i3 {
        for s in 0..i3 {
            let w = (t + i3 - s) % i3;
            for col in 0..j {
                for k in 0..ka {
                    let bv = b[(k, col, w)];
                    for row in 0..i1 {
                        let v = c[(row, col, t)] + a[(row, k, s)] * bv;
                        c[(row, col, t)] = v;
                    }
                }
            }
        }
    }
    Ok(c)
}

/// Transpose every frontal slice, then reverse the order of slices 2..I3.
pub fn conj_transpose<T: Scalar>(a: &Tensor3<T>) -> Tensor3<T> {
    let (i1, i2, i3) = a.dims();
    let mut out = Tensor3::zeros((i2, i1, i3));
    for k in 0..i3 {
        let src = if k == 0 { 0 } else { i3 - k };
        out.set_frontal(k, &a.frontal(src).transpose());
    }
    out
}

/// First frontal slice identity, all others zero.
pub fn identity_tensor<T: Scalar>(n: usize, i3: usize) -> Tensor3<T> {
    let mut t = Tensor3::zeros((n, n, i3));
    for i in 0..n {
        t[(i, i, 0)] = T::one();
    }
    t
}

/// t-inverse at the default singularity tolerance.
pub fn tinv<T: Scalar>(a: &Tensor3<T>) -> Result<Tensor3<T>> {
    tinv_with_tol(a, 1e-12)
}

/// t-inverse via per-Fourier-slice SVD. A slice whose smallest singular
/// value is at most `tol`·(largest singular value over all slices) is
/// reported singular.
pub fn tinv_with_tol<T: Scalar>(a: &Tensor3<T>, tol: f64) -> Result<Tensor3<T>> {
    let (n, m, i3) = a.dims();
    if n != m {
        return Err(Error::NotSquare { rows: n, cols: m });
    }
    let spec = fft_mode3(a);
    let half = half_slices(i3);
    let mut svds = Vec::with_capacity(half);
    let mut sigma_max = T::zero();
    for j in 0..half {
        let svd = try_svd(spec.slice(j).clone(), true, true, j)?;
        cost::record_svd(n, n);
        sigma_max = sigma_max.max(svd.singular_values[0]);
        svds.push(svd);
    }
    if sigma_max.is_zero() {
        return Err(Error::SingularSlice { slice: 0, ratio: 0.0 });
    }
    let floor = T::of(tol) * sigma_max;
    let mut inv_slices = Vec::with_capacity(half);
    for (j, svd) in svds.into_iter().enumerate() {
        let smin = svd.singular_values[n - 1];
        if smin <= floor {
            return Err(Error::SingularSlice {
                slice: j,
                ratio: (smin / sigma_max).as_f64(),
            });
        }
        let inv_diag = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            svd.singular_values.iter().map(|&s| Complex::new(T::one() / s, T::zero())),
        ));
        let inv = svd.v_t.unwrap().adjoint() * inv_diag * svd.u.unwrap().adjoint();
        cost::record_matmul(n, n, n);
        inv_slices.push(inv);
    }
    ifft_mode3(&SpectralTensor::from_computed_half((n, n, i3), inv_slices))
}

/// Entrywise shrinkage sign(a)·max(0, |a|−ζ).
pub fn soft_threshold<T: Scalar>(a: &Tensor3<T>, zeta: T) -> Tensor3<T> {
    assert!(zeta >= T::zero(), "threshold must be nonnegative");
    a.map(|v| {
        let m = v.abs() - zeta;
        if m <= T::zero() {
            T::zero()
        } else if v > T::zero() {
            m
        } else {
            -m
        }
    })
}

type CSvd<T> = nalgebra::SVD<Complex<T>, nalgebra::Dyn, nalgebra::Dyn>;

/// SVD with a generous iteration cap so a non-converging slice reports an
/// error instead of spinning.
pub(crate) fn try_svd<T: Scalar>(
    m: DMatrix<Complex<T>>,
    want_u: bool,
    want_v: bool,
    slice: usize,
) -> Result<CSvd<T>> {
    let cap = 1000 * (m.nrows() + m.ncols());
    nalgebra::SVD::try_new(m, want_u, want_v, T::default_epsilon(), cap)
        .ok_or(Error::SvdNoConvergence { slice })
}
