//! t-SVD factorization family: full/skinny decompositions, tubal rank,
//! top-R factor splits, and singular-value shrinkage.

use super::{conj_transpose, tprod, try_svd};
use crate::cost;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor3::{fft_mode3, half_slices, ifft_mode3, Dims, SpectralTensor, Tensor3};
use nalgebra::DMatrix;
use num_complex::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsvdMode {
    /// k = min(I1, I2).
    Full,
    /// k = requested rank.
    Skinny,
}

/// A = u * sigma * vᵀ with orthonormal u, v and f-diagonal sigma.
#[derive(Clone, Debug)]
pub struct TsvdFactors<T: Scalar> {
    /// I1×k×I3.
    pub u: Tensor3<T>,
    /// k×k×I3, f-diagonal.
    pub sigma: Tensor3<T>,
    /// I2×k×I3.
    pub v: Tensor3<T>,
    pub mode: TsvdMode,
}

impl<T: Scalar> TsvdFactors<T> {
    pub fn reconstruct(&self) -> Result<Tensor3<T>> {
        tprod(&tprod(&self.u, &self.sigma)?, &conj_transpose(&self.v))
    }

    /// Diagonals of the Fourier slices of sigma, one sorted list per slice.
    pub fn fourier_sigmas(&self) -> Vec<Vec<T>> {
        let (k, _, i3) = self.sigma.dims();
        let spec = fft_mode3(&self.sigma);
        (0..i3)
            .map(|j| (0..k).map(|i| spec.slice(j)[(i, i)].re).collect())
            .collect()
    }

    /// Largest Fourier singular value.
    pub fn sigma_max(&self) -> T {
        self.fourier_sigmas()
            .iter()
            .flat_map(|d| d.iter())
            .fold(T::zero(), |m, &s| m.max(s))
    }

    /// Smallest Fourier singular value (over the k kept per slice).
    pub fn sigma_min(&self) -> T {
        self.fourier_sigmas()
            .iter()
            .flat_map(|d| d.iter())
            .fold(T::of(f64::INFINITY), |m, &s| m.min(s))
    }

    /// Condition number sigma_max / sigma_min.
    pub fn kappa(&self) -> T {
        self.sigma_max() / self.sigma_min()
    }
}

/// Per-slice factors for the computed half of the spectrum.
pub(crate) struct HalfSvd<T: Scalar> {
    pub dims: Dims,
    pub k: usize,
    pub u: Vec<DMatrix<Complex<T>>>,
    pub sigma: Vec<Vec<T>>,
    pub v: Vec<DMatrix<Complex<T>>>,
}

/// True for the slices of a real tensor's spectrum that are themselves real:
/// DC always, Nyquist when I3 is even.
#[inline]
pub(crate) fn is_real_slice(j: usize, i3: usize) -> bool {
    j == 0 || (i3 % 2 == 0 && j == i3 / 2)
}

/// Drops float-noise imaginary parts from a slice that must be real,
/// erroring if the residue is above 1e−9·scale (a real logic bug).
fn realify<T: Scalar>(m: &DMatrix<Complex<T>>, scale: T) -> Result<DMatrix<Complex<T>>> {
    let mut worst = T::zero();
    let clean = m.map(|c| {
        worst = worst.max(c.im.abs());
        Complex::new(c.re, T::zero())
    });
    let limit = T::of(1e-9) * scale;
    if worst > limit {
        return Err(Error::SymmetryViolation {
            residue: worst.as_f64(),
            limit: limit.as_f64(),
        });
    }
    Ok(clean)
}

/// Sorted SVD of each computed Fourier slice, truncated to `trunc` factors
/// when given. Real slices are realified first so the factor spectra stay
/// exactly conjugate-symmetric.
pub(crate) fn spectral_svd<T: Scalar>(
    a: &Tensor3<T>,
    trunc: Option<usize>,
) -> Result<HalfSvd<T>> {
    let (i1, i2, i3) = a.dims();
    let spec = fft_mode3(a);
    let scale = spec.abs_max();
    let kmax = i1.min(i2);
    let k = trunc.unwrap_or(kmax);
    debug_assert!(k >= 1 && k <= kmax);
    let half = half_slices(i3);
    let mut u = Vec::with_capacity(half);
    let mut sigma = Vec::with_capacity(half);
    let mut v = Vec::with_capacity(half);
    for j in 0..half {
        let slice = if is_real_slice(j, i3) {
            realify(spec.slice(j), scale)?
        } else {
            spec.slice(j).clone()
        };
        let svd = try_svd(slice, true, true, j)?;
        cost::record_svd(i1, i2);
        let su = svd.u.unwrap();
        let svt = svd.v_t.unwrap();
        let sv = svd.singular_values;
        debug_assert!(sv.iter().zip(sv.iter().skip(1)).all(|(a, b)| a >= b));
        u.push(su.columns(0, k).into_owned());
        sigma.push(sv.iter().take(k).copied().collect());
        v.push(svt.rows(0, k).adjoint());
    }
    Ok(HalfSvd {
        dims: (i1, i2, i3),
        k,
        u,
        sigma,
        v,
    })
}

fn assemble<T: Scalar>(dims: Dims, half: Vec<DMatrix<Complex<T>>>) -> Result<Tensor3<T>> {
    ifft_mode3(&SpectralTensor::from_computed_half(dims, half))
}

/// f-diagonal tensor whose Fourier slice j has the given real diagonal;
/// `diags` covers the computed half, the rest is mirrored.
pub fn fdiag_from_spectrum<T: Scalar>(diags: &[Vec<T>], i3: usize) -> Result<Tensor3<T>> {
    assert_eq!(diags.len(), half_slices(i3));
    let k = diags[0].len();
    let slices = diags
        .iter()
        .map(|d| {
            assert_eq!(d.len(), k);
            DMatrix::from_fn(k, k, |r, c| {
                if r == c {
                    Complex::new(d[r], T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
        })
        .collect();
    assemble((k, k, i3), slices)
}

fn factors_from<T: Scalar>(h: HalfSvd<T>, mode: TsvdMode) -> Result<TsvdFactors<T>> {
    let (i1, i2, i3) = h.dims;
    let k = h.k;
    let u = assemble((i1, k, i3), h.u)?;
    let v = assemble((i2, k, i3), h.v)?;
    let sigma = fdiag_from_spectrum(&h.sigma, i3)?;
    Ok(TsvdFactors { u, sigma, v, mode })
}

/// Full (economy) t-SVD: k = min(I1, I2).
pub fn tsvd<T: Scalar>(a: &Tensor3<T>) -> Result<TsvdFactors<T>> {
    factors_from(spectral_svd(a, None)?, TsvdMode::Full)
}

/// Rank-truncated t-SVD: k = r.
pub fn tsvd_skinny<T: Scalar>(a: &Tensor3<T>, r: usize) -> Result<TsvdFactors<T>> {
    let (i1, i2, _) = a.dims();
    let max = i1.min(i2);
    if r < 1 || r > max {
        return Err(Error::RankOutOfRange { rank: r, max });
    }
    factors_from(spectral_svd(a, Some(r))?, TsvdMode::Skinny)
}

/// Sorted singular values of every Fourier slice (mirrored slices share the
/// computed values).
pub fn fourier_singular_values<T: Scalar>(a: &Tensor3<T>) -> Result<Vec<Vec<T>>> {
    let (i1, i2, i3) = a.dims();
    let spec = fft_mode3(a);
    let half = half_slices(i3);
    let mut computed: Vec<Vec<T>> = Vec::with_capacity(half);
    for j in 0..half {
        let svd = try_svd(spec.slice(j).clone(), false, false, j)?;
        cost::record_svd(i1, i2);
        computed.push(svd.singular_values.iter().copied().collect());
    }
    Ok((0..i3)
        .map(|j| computed[if j < half { j } else { i3 - j }].clone())
        .collect())
}

/// Per-slice ranks at a relative tolerance: count of singular values above
/// tol·(largest singular value over all slices).
pub fn multi_rank<T: Scalar>(a: &Tensor3<T>, tol: T) -> Result<Vec<usize>> {
    assert!(tol >= T::zero(), "tolerance must be nonnegative");
    let svals = fourier_singular_values(a)?;
    let smax = svals
        .iter()
        .flat_map(|v| v.iter())
        .fold(T::zero(), |m, &s| m.max(s));
    let floor = tol * smax;
    Ok(svals
        .iter()
        .map(|v| v.iter().filter(|&&s| s > floor).count())
        .collect())
}

/// Largest per-slice rank.
pub fn tubal_rank<T: Scalar>(a: &Tensor3<T>, tol: T) -> Result<usize> {
    Ok(multi_rank(a, tol)?.into_iter().max().unwrap_or(0))
}

/// Balanced factor split of the best rank-R approximation:
/// l = u_R * sigma_R^{1/2}, r = v_R * sigma_R^{1/2}, so l * rᵀ is the
/// truncated reconstruction.
pub fn top_r_approx<T: Scalar>(a: &Tensor3<T>, r: usize) -> Result<(Tensor3<T>, Tensor3<T>)> {
    let (i1, i2, i3) = a.dims();
    let max = i1.min(i2);
    if r < 1 || r > max {
        return Err(Error::RankOutOfRange { rank: r, max });
    }
    let h = spectral_svd(a, Some(r))?;
    let mut l_slices = Vec::with_capacity(h.u.len());
    let mut r_slices = Vec::with_capacity(h.v.len());
    for ((us, vs), sg) in h.u.iter().zip(&h.v).zip(&h.sigma) {
        let mut lu = us.clone();
        let mut rv = vs.clone();
        for (c, &s) in sg.iter().enumerate() {
            let root = Complex::new(s.sqrt(), T::zero());
            lu.column_mut(c).apply(|x| *x *= root);
            rv.column_mut(c).apply(|x| *x *= root);
        }
        l_slices.push(lu);
        r_slices.push(rv);
    }
    Ok((
        assemble((i1, r, i3), l_slices)?,
        assemble((i2, r, i3), r_slices)?,
    ))
}

/// Shrinks every Fourier singular value by tau and rebuilds the tensor; the
/// proximity step used by the nuclear-norm solver. tau applies uniformly per
/// slice — callers own any scaling bookkeeping.
pub fn tsvt<T: Scalar>(a: &Tensor3<T>, tau: T) -> Result<Tensor3<T>> {
    assert!(tau >= T::zero(), "threshold must be nonnegative");
    let (i1, i2, i3) = a.dims();
    let h = spectral_svd(a, None)?;
    let mut slices = Vec::with_capacity(h.u.len());
    for ((us, vs), sg) in h.u.iter().zip(&h.v).zip(&h.sigma) {
        let mut scaled = us.clone();
        for (c, &s) in sg.iter().enumerate() {
            let shrunk = Complex::new((s - tau).max(T::zero()), T::zero());
            scaled.column_mut(c).apply(|x| *x *= shrunk);
        }
        slices.push(&scaled * vs.adjoint());
        cost::record_matmul(i1, h.k, i2);
    }
    assemble((i1, i2, i3), slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor3::NormKind;
    use crate::tlinalg::identity_tensor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn randn(dims: Dims, seed: u64) -> Tensor3<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Tensor3::random_normal(dims, &mut rng)
    }

    fn check_contract(a: &Tensor3<f64>, f: &TsvdFactors<f64>) {
        let (i1, i2, i3) = a.dims();
        let k = f.sigma.dims().0;
        assert_eq!(f.u.dims(), (i1, k, i3));
        assert_eq!(f.v.dims(), (i2, k, i3));
        // reconstruction
        assert!(f.reconstruct().unwrap().rel_err_fro(a) < 1e-8);
        // one-sided orthogonality
        let i = identity_tensor::<f64>(k, i3);
        let utu = tprod(&conj_transpose(&f.u), &f.u).unwrap();
        let vtv = tprod(&conj_transpose(&f.v), &f.v).unwrap();
        assert!(utu.sub(&i).norm(NormKind::Fro) < 1e-8);
        assert!(vtv.sub(&i).norm(NormKind::Fro) < 1e-8);
        // f-diagonal sigma with real, nonnegative, nonincreasing Fourier diagonals
        for j in 0..i3 {
            let spec = fft_mode3(&f.sigma);
            let s = spec.slice(j);
            for r in 0..k {
                for c in 0..k {
                    if r != c {
                        assert!(s[(r, c)].norm() < 1e-8, "off-diagonal at ({r},{c},{j})");
                    }
                }
                assert!(s[(r, r)].im.abs() < 1e-8);
                assert!(s[(r, r)].re > -1e-10);
                if r > 0 {
                    assert!(s[(r, r)].re <= s[(r - 1, r - 1)].re + 1e-10);
                }
            }
        }
    }

    #[test]
    fn tsvd_contract_odd_and_even_depth() {
        for (dims, seed) in [
            ((5, 4, 6), 61u64), // even: Nyquist slice exercised
            ((4, 5, 5), 62),
            ((3, 3, 1), 63),
        ] {
            let a = randn(dims, seed);
            let f = tsvd(&a).unwrap();
            assert_eq!(f.mode, TsvdMode::Full);
            check_contract(&a, &f);
        }
    }

    #[test]
    fn tsvd_of_identity_has_unit_sigma() {
        let i = identity_tensor::<f64>(3, 4);
        let f = tsvd(&i).unwrap();
        for d in f.fourier_sigmas() {
            for s in d {
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(f.sigma_max(), f.sigma_min());
    }

    #[test]
    fn fdiag_input_recovers_sorted_tubes() {
        // diagonal of delta tubes: Fourier diagonal is constant c_i per slice
        let tubes = [3.0, 1.0, 2.0];
        let mut a = Tensor3::<f64>::zeros((3, 3, 4));
        for (i, &c) in tubes.iter().enumerate() {
            a[(i, i, 0)] = c;
        }
        let f = tsvd(&a).unwrap();
        for d in f.fourier_sigmas() {
            assert!((d[0] - 3.0).abs() < 1e-10);
            assert!((d[1] - 2.0).abs() < 1e-10);
            assert!((d[2] - 1.0).abs() < 1e-10);
        }
        assert!(f.reconstruct().unwrap().rel_err_fro(&a) < 1e-10);
        assert!((f.kappa() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rank_one_outer_product() {
        let x = randn((4, 1, 5), 64);
        let y = randn((3, 1, 5), 65);
        let a = tprod(&x, &conj_transpose(&y)).unwrap();
        let f = tsvd(&a).unwrap();
        for d in f.fourier_sigmas() {
            for &s in &d[1..] {
                assert!(s <= 1e-10 * d[0]);
            }
        }
        assert_eq!(tubal_rank(&a, 1e-10).unwrap(), 1);
    }

    #[test]
    fn skinny_matches_truncation() {
        let a = randn((5, 4, 3), 66);
        let f = tsvd_skinny(&a, 2).unwrap();
        assert_eq!(f.mode, TsvdMode::Skinny);
        assert_eq!(f.u.dims(), (5, 2, 3));
        let full = tsvd(&a).unwrap();
        let skinny_sig = f.fourier_sigmas();
        let full_sig = full.fourier_sigmas();
        for j in 0..3 {
            for i in 0..2 {
                assert!((skinny_sig[j][i] - full_sig[j][i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rank_bounds_checked() {
        let a = randn((4, 3, 2), 67);
        assert!(matches!(
            tsvd_skinny(&a, 0),
            Err(Error::RankOutOfRange { rank: 0, max: 3 })
        ));
        assert!(matches!(
            tsvd_skinny(&a, 4),
            Err(Error::RankOutOfRange { rank: 4, max: 3 })
        ));
        assert!(top_r_approx(&a, 9).is_err());
    }

    #[test]
    fn tubal_rank_examples() {
        assert_eq!(tubal_rank(&Tensor3::<f64>::zeros((3, 3, 2)), 1e-10).unwrap(), 0);
        let i = identity_tensor::<f64>(3, 5);
        assert_eq!(tubal_rank(&i, 1e-10).unwrap(), 3);
        assert_eq!(multi_rank(&i, 1e-10).unwrap(), vec![3; 5]);
        // generic factors give exactly the factor rank
        let l = randn((20, 4, 6), 68);
        let r = randn((15, 4, 6), 69);
        let x = tprod(&l, &conj_transpose(&r)).unwrap();
        assert_eq!(tubal_rank(&x, 1e-10).unwrap(), 4);
        let sv = fourier_singular_values(&x).unwrap();
        for d in &sv {
            assert!(d[4] < 1e-10 * d[0]);
        }
    }

    #[test]
    fn top_r_exact_on_full_rank() {
        let a = randn((3, 4, 4), 70);
        let (l, r) = top_r_approx(&a, 3).unwrap();
        assert_eq!(l.dims(), (3, 3, 4));
        assert_eq!(r.dims(), (4, 3, 4));
        let back = tprod(&l, &conj_transpose(&r)).unwrap();
        assert!(back.rel_err_fro(&a) < 1e-8);
    }

    #[test]
    fn top_r_exact_on_low_rank() {
        let lf = randn((6, 2, 5), 71);
        let rf = randn((5, 2, 5), 72);
        let a = tprod(&lf, &conj_transpose(&rf)).unwrap();
        let (l, r) = top_r_approx(&a, 2).unwrap();
        let back = tprod(&l, &conj_transpose(&r)).unwrap();
        assert!(back.rel_err_fro(&a) < 1e-8);
    }

    #[test]
    fn top_r_residual_matches_discarded_spectrum() {
        let a = randn((6, 5, 4), 73);
        let (l, r) = top_r_approx(&a, 3).unwrap();
        let back = tprod(&l, &conj_transpose(&r)).unwrap();
        let resid = back.sub(&a).norm(NormKind::Fro);
        let sv = fourier_singular_values(&a).unwrap();
        let tail: f64 = sv
            .iter()
            .map(|d| d[3..].iter().map(|s| s * s).sum::<f64>())
            .sum::<f64>();
        let want = (tail / 4.0).sqrt();
        assert!((resid - want).abs() < 1e-10 * want.max(1.0));
    }

    #[test]
    fn tsvt_zero_threshold_is_identity() {
        let a = randn((4, 4, 3), 74);
        let out = tsvt(&a, 0.0).unwrap();
        assert!(out.rel_err_fro(&a) < 1e-12);
    }

    #[test]
    fn tsvt_large_threshold_zeroes() {
        let a = randn((4, 3, 4), 75);
        let out = tsvt(&a, a.norm(NormKind::Spectral) + 1e-9).unwrap();
        assert!(out.norm(NormKind::Fro) < 1e-10);
    }

    #[test]
    fn tsvt_shrinks_singular_tubes_exactly() {
        // f-diagonal with delta tubes: every Fourier sigma shrinks by tau
        let tubes = [4.0, 2.5];
        let mut a = Tensor3::<f64>::zeros((2, 2, 3));
        for (i, &c) in tubes.iter().enumerate() {
            a[(i, i, 0)] = c;
        }
        let tau = 1.0;
        let out = tsvt(&a, tau).unwrap();
        let sv = fourier_singular_values(&out).unwrap();
        for d in &sv {
            assert!((d[0] - 3.0).abs() < 1e-10);
            assert!((d[1] - 1.5).abs() < 1e-10);
        }
        // and for a time-constant tube, only the DC sigma is nonzero
        let mut b = Tensor3::<f64>::zeros((1, 1, 4));
        for k in 0..4 {
            b[(0, 0, k)] = 2.0;
        }
        let shrunk = tsvt(&b, 3.0).unwrap();
        let sb = fourier_singular_values(&shrunk).unwrap();
        assert!((sb[0][0] - 5.0).abs() < 1e-10); // 8 - 3
        for d in &sb[1..] {
            assert!(d[0] < 1e-12);
        }
    }
}
