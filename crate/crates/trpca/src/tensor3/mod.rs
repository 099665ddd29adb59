//! Dense order-3 real tensor: the universal value type.
//!
//! Storage is canonical "i1 fastest" order: entry (i1, i2, i3) lives at
//! linear index `i1 + I1*(i2 + I2*i3)`, so each frontal slice A(:,:,i3) is a
//! contiguous column-major I1×I2 matrix.

mod fft;
mod norms;
mod t3b;

pub use fft::{fft_mode3, ifft_mode3, half_slices, SpectralTensor};
pub use norms::{bcirc, NormKind};
pub use t3b::{load_t3b, read_t3b, save_t3b, write_t3b, T3B_MAGIC};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use nalgebra::{DMatrixView, DMatrixViewMut};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

pub type Dims = (usize, usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3<T> {
    dims: Dims,
    data: Vec<T>,
}

impl<T: Scalar> Tensor3<T> {
    /// Builds a tensor from data already in canonical order.
    pub fn new(dims: Dims, data: Vec<T>) -> Result<Self> {
        let (i1, i2, i3) = dims;
        if data.len() != i1 * i2 * i3 {
            return Err(Error::BadConfig(format!(
                "data length {} does not match dims {:?}",
                data.len(),
                dims
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Dims) -> Self {
        let (i1, i2, i3) = dims;
        Self {
            dims,
            data: vec![T::zero(); i1 * i2 * i3],
        }
    }

    /// Fills in canonical storage order, so the closure's call order is
    /// deterministic (relied on by the seeded random constructors).
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let (i1, i2, i3) = dims;
        let mut data = Vec::with_capacity(i1 * i2 * i3);
        for k in 0..i3 {
            for c in 0..i2 {
                for r in 0..i1 {
                    data.push(f(r, c, k));
                }
            }
        }
        Self { dims, data }
    }

    pub fn random_normal<R: Rng + ?Sized>(dims: Dims, rng: &mut R) -> Self {
        let (i1, i2, i3) = dims;
        let data = (0..i1 * i2 * i3)
            .map(|_| T::of(StandardNormal.sample(rng)))
            .collect();
        Self { dims, data }
    }

    pub fn random_uniform<R: Rng + ?Sized>(dims: Dims, lo: f64, hi: f64, rng: &mut R) -> Self {
        let dist = Uniform::new_inclusive(lo, hi);
        let (i1, i2, i3) = dims;
        let data = (0..i1 * i2 * i3).map(|_| T::of(dist.sample(rng))).collect();
        Self { dims, data }
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn numel(&self) -> usize {
        self.data.len()
    }

    #[inline]
    fn idx(&self, i1: usize, i2: usize, i3: usize) -> usize {
        debug_assert!(i1 < self.dims.0 && i2 < self.dims.1 && i3 < self.dims.2);
        i1 + self.dims.0 * (i2 + self.dims.1 * i3)
    }

    #[inline]
    pub fn get(&self, i1: usize, i2: usize, i3: usize) -> T {
        self.data[self.idx(i1, i2, i3)]
    }

    #[inline]
    pub fn set(&mut self, i1: usize, i2: usize, i3: usize, v: T) {
        let i = self.idx(i1, i2, i3);
        self.data[i] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Borrowed view of frontal slice A(:,:,i3) as a column-major matrix.
    pub fn frontal(&self, i3: usize) -> DMatrixView<'_, T> {
        let (r, c, _) = self.dims;
        let start = r * c * i3;
        DMatrixView::from_slice(&self.data[start..start + r * c], r, c)
    }

    pub fn frontal_mut(&mut self, i3: usize) -> DMatrixViewMut<'_, T> {
        let (r, c, _) = self.dims;
        let start = r * c * i3;
        DMatrixViewMut::from_slice(&mut self.data[start..start + r * c], r, c)
    }

    /// Copies frontal slice i3 out of a matrix of matching shape.
    pub fn set_frontal(&mut self, i3: usize, m: &nalgebra::DMatrix<T>) {
        assert_eq!((m.nrows(), m.ncols()), (self.dims.0, self.dims.1));
        let (r, c, _) = self.dims;
        let start = r * c * i3;
        self.data[start..start + r * c].copy_from_slice(m.as_slice());
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.dims, other.dims, "zip_map dims");
        Self {
            dims: self.dims,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    /// max |entry|; same value as `norm(NormKind::Inf)`.
    pub fn abs_max(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|v| !v.is_zero()).count()
    }

    /// ‖self − other‖_F / ‖other‖_F; absolute error when `other` is zero.
    pub fn rel_err_fro(&self, other: &Self) -> T {
        let num = self.sub(other).norm(NormKind::Fro);
        let den = other.norm(NormKind::Fro);
        if den > T::zero() {
            num / den
        } else {
            num
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize, usize)> for Tensor3<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i1, i2, i3): (usize, usize, usize)) -> &T {
        &self.data[i1 + self.dims.0 * (i2 + self.dims.1 * i3)]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize, usize)> for Tensor3<T> {
    #[inline]
    fn index_mut(&mut self, (i1, i2, i3): (usize, usize, usize)) -> &mut T {
        &mut self.data[i1 + self.dims.0 * (i2 + self.dims.1 * i3)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn storage_is_i1_fastest() {
        let t = Tensor3::<f64>::from_fn((2, 3, 2), |i1, i2, i3| {
            (i1 + 10 * i2 + 100 * i3) as f64
        });
        assert_eq!(t.data()[0], 0.0);
        assert_eq!(t.data()[1], 1.0); // i1 advances first
        assert_eq!(t.data()[2], 10.0); // then i2
        assert_eq!(t.data()[6], 100.0); // then i3
        assert_eq!(t[(1, 2, 1)], 121.0);
    }

    #[test]
    fn frontal_views_are_contiguous() {
        let t = Tensor3::<f64>::from_fn((3, 2, 2), |i1, i2, i3| (i1 + 3 * i2 + 6 * i3) as f64);
        let s1 = t.frontal(1);
        assert_eq!(s1[(0, 0)], 6.0);
        assert_eq!(s1[(2, 1)], 11.0);
    }

    #[test]
    fn elementwise_ops() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Tensor3::<f64>::random_normal((4, 3, 5), &mut rng);
        let b = Tensor3::<f64>::random_normal((4, 3, 5), &mut rng);
        let c = a.add(&b).sub(&b);
        assert!(c.rel_err_fro(&a) < 1e-15);
        assert_eq!(a.scale(0.0).abs_max(), 0.0);
    }

    #[test]
    fn random_fill_deterministic_per_seed() {
        let a = Tensor3::<f64>::random_normal((3, 3, 3), &mut ChaCha8Rng::seed_from_u64(9));
        let b = Tensor3::<f64>::random_normal((3, 3, 3), &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a.data(), b.data());
        let u = Tensor3::<f64>::random_uniform((3, 3, 3), -0.5, 0.5, &mut ChaCha8Rng::seed_from_u64(9));
        assert!(u.abs_max() <= 0.5);
    }
}
