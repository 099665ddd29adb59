//! Mode-3 DFT of a tensor and its conjugate-symmetric spectral form.
//!
//! Convention: the forward transform is unnormalized, the inverse carries the
//! 1/I3 factor, so ‖A‖_F = (1/√I3)·‖Â‖_F.

use crate::cost;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor3::{Dims, Tensor3};
use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;
use rustfft::FftPlanner;

/// Number of Fourier slices that must actually be computed for a real input:
/// ⌈(I3+1)/2⌉. Slices beyond it are conjugate mirrors (slice j = conj of
/// slice I3−j, 0-based).
#[inline]
pub fn half_slices(i3: usize) -> usize {
    i3 / 2 + 1
}

/// Mode-3 DFT of a real tensor: I3 complex frontal slices.
#[derive(Clone, Debug)]
pub struct SpectralTensor<T: Scalar> {
    dims: Dims,
    slices: Vec<DMatrix<Complex<T>>>,
}

impl<T: Scalar> SpectralTensor<T> {
    /// Assembles a spectrum from the computed half, mirroring the rest with
    /// complex conjugates. `computed` must hold ⌈(I3+1)/2⌉ slices of shape
    /// I1×I2 belonging to the transform of a real tensor; under that contract
    /// the self-conjugate slices (index 0, and I3/2 when I3 is even) are real
    /// in exact arithmetic, so their imaginary rounding residue is dropped
    /// here to make the assembled spectrum exactly symmetric.
    pub fn from_computed_half(dims: Dims, computed: Vec<DMatrix<Complex<T>>>) -> Self {
        let (i1, i2, i3) = dims;
        let half = half_slices(i3);
        assert_eq!(computed.len(), half, "expected {half} computed slices");
        let mut slices = computed;
        realize_slice(&mut slices[0]);
        if i3 % 2 == 0 && i3 > 1 {
            realize_slice(&mut slices[i3 / 2]);
        }
        for j in half..i3 {
            let src = i3 - j;
            let m = slices[src].map(|c| c.conj());
            slices.push(m);
        }
        debug_assert!(slices.iter().all(|m| m.nrows() == i1 && m.ncols() == i2));
        Self { dims, slices }
    }

    /// Builds a spectrum from all I3 slices as given, with no symmetry fixup.
    pub fn from_slices(dims: Dims, slices: Vec<DMatrix<Complex<T>>>) -> Self {
        assert_eq!(slices.len(), dims.2);
        Self { dims, slices }
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn slices(&self) -> &[DMatrix<Complex<T>>] {
        &self.slices
    }

    pub fn slice(&self, j: usize) -> &DMatrix<Complex<T>> {
        &self.slices[j]
    }

    pub fn into_slices(self) -> Vec<DMatrix<Complex<T>>> {
        self.slices
    }

    /// Largest entry modulus over all slices; the scale used by residue
    /// thresholds.
    pub fn abs_max(&self) -> T {
        self.slices.iter().fold(T::zero(), |m, s| {
            s.iter().fold(m, |m, c| m.max(c.modulus()))
        })
    }

    /// Worst deviation from conjugate symmetry relative to `abs_max`
    /// (0 for spectra of real tensors, up to float noise).
    pub fn symmetry_residue(&self) -> T {
        let (_, _, i3) = self.dims;
        let scale = self.abs_max();
        if scale.is_zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for j in half_slices(i3)..i3 {
            let mirror = &self.slices[i3 - j];
            for (a, b) in self.slices[j].iter().zip(mirror.iter()) {
                worst = worst.max((*a - b.conj()).modulus());
            }
        }
        worst / scale
    }
}

/// Unnormalized DFT along each tube fiber.
fn realize_slice<T: Scalar>(m: &mut DMatrix<Complex<T>>) {
    for c in m.iter_mut() {
        c.im = T::zero();
    }
}

pub fn fft_mode3<T: Scalar>(a: &Tensor3<T>) -> SpectralTensor<T> {
    let (i1, i2, i3) = a.dims();
    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(i3);
    let mut slices = vec![DMatrix::<Complex<T>>::zeros(i1, i2); i3];
    let mut tube = vec![Complex::new(T::zero(), T::zero()); i3];
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    for c in 0..i2 {
        for r in 0..i1 {
            for (k, t) in tube.iter_mut().enumerate() {
                *t = Complex::new(a[(r, c, k)], T::zero());
            }
            fft.process_with_scratch(&mut tube, &mut scratch);
            cost::record_fft(i3);
            for (k, t) in tube.iter().enumerate() {
                slices[k][(r, c)] = *t;
            }
        }
    }
    SpectralTensor {
        dims: (i1, i2, i3),
        slices,
    }
}

/// Inverse mode-3 DFT with 1/I3 scaling.
///
/// The input must be conjugate-symmetric (slice j the conjugate of slice
/// I3−j) to within 1e−8 of its largest entry modulus; deviations beyond that
/// report a symmetry violation. The check runs on the spectrum itself rather
/// than on the output's imaginary residue: a product that cancels to float
/// noise still has an exactly symmetric spectrum, and must invert cleanly to
/// a near-zero tensor instead of erroring. Imaginary parts of the output are
/// pure rounding under the input contract and are dropped.
pub fn ifft_mode3<T: Scalar>(s: &SpectralTensor<T>) -> Result<Tensor3<T>> {
    let (i1, i2, i3) = s.dims;
    let mut planner = FftPlanner::<T>::new();
    let ifft = planner.plan_fft_inverse(i3);
    let inv_n = T::one() / T::of(i3 as f64);

    let mut out = Tensor3::zeros((i1, i2, i3));
    let mut tube = vec![Complex::new(T::zero(), T::zero()); i3];
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); ifft.get_inplace_scratch_len()];
    let mut worst_asym = T::zero();
    let mut scale = T::zero();
    for c in 0..i2 {
        for r in 0..i1 {
            for (k, t) in tube.iter_mut().enumerate() {
                *t = s.slices[k][(r, c)];
                scale = scale.max(t.modulus());
            }
            for k in 0..=i3 / 2 {
                let mirror = (i3 - k) % i3;
                worst_asym = worst_asym.max((tube[k] - tube[mirror].conj()).modulus());
            }
            ifft.process_with_scratch(&mut tube, &mut scratch);
            cost::record_fft(i3);
            for (k, t) in tube.iter().enumerate() {
                out[(r, c, k)] = (*t * inv_n).re;
            }
        }
    }
    let limit = T::of(1e-8) * scale;
    if worst_asym > limit {
        return Err(Error::SymmetryViolation {
            residue: worst_asym.as_f64(),
            limit: limit.as_f64(),
        });
    }
    Ok(out)
}
