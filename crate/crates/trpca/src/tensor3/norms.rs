//! Tensor norms and the block-circulant test oracle.

use crate::cost;
use crate::scalar::Scalar;
use crate::tensor3::fft::{fft_mode3, half_slices};
use crate::tensor3::Tensor3;
use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// Entrywise ℓ2.
    Fro,
    /// Largest |entry|.
    Inf,
    /// Largest ℓ2 norm over horizontal slices A(i1,:,:).
    L2Inf,
    /// Largest ℓ1 norm over horizontal slices A(i1,:,:).
    L1Inf,
    /// Largest singular value over Fourier slices; equals ‖bcirc(A)‖₂.
    Spectral,
    /// (1/I3) · Σ of matrix nuclear norms over Fourier slices.
    Nuclear,
}

impl<T: Scalar> Tensor3<T> {
    pub fn norm(&self, kind: NormKind) -> T {
        match kind {
            NormKind::Fro => {
                let mut acc = T::zero();
                for &v in self.data() {
                    acc += v * v;
                }
                acc.sqrt()
            }
            NormKind::Inf => self.abs_max(),
            NormKind::L2Inf => self.horizontal_reduce(|acc, v| acc + v * v, T::sqrt),
            NormKind::L1Inf => self.horizontal_reduce(|acc, v| acc + v.abs(), |x| x),
            NormKind::Spectral | NormKind::Nuclear => self.fourier_norm(kind),
        }
    }

    /// max over i1 of finish(fold over A(i1,:,:)).
    fn horizontal_reduce(
        &self,
        fold: impl Fn(T, T) -> T,
        finish: impl Fn(T) -> T,
    ) -> T {
        let (i1, i2, i3) = self.dims();
        let mut best = T::zero();
        for r in 0..i1 {
            let mut acc = T::zero();
            for k in 0..i3 {
                for c in 0..i2 {
                    acc = fold(acc, self[(r, c, k)]);
                }
            }
            best = best.max(finish(acc));
        }
        best
    }

    /// Spectral and nuclear norms share the per-Fourier-slice SVD sweep.
    /// Conjugate slices have the same singular values, so only the first
    /// ⌈(I3+1)/2⌉ are decomposed; interior slices count twice in the sum.
    fn fourier_norm(&self, kind: NormKind) -> T {
        let (i1, i2, i3) = self.dims();
        let spec = fft_mode3(self);
        let half = half_slices(i3);
        let mut sigma_max = T::zero();
        let mut nuc_sum = T::zero();
        for j in 0..half {
            let sv = spec.slice(j).clone().singular_values();
            cost::record_svd(i1, i2);
            let weight = if j == 0 || (i3 % 2 == 0 && j == i3 / 2) {
                T::one()
            } else {
                T::of(2.0)
            };
            for &s in sv.iter() {
                sigma_max = sigma_max.max(s);
                nuc_sum += weight * s;
            }
        }
        match kind {
            NormKind::Spectral => sigma_max,
            NormKind::Nuclear => nuc_sum / T::of(i3 as f64),
            _ => unreachable!(),
        }
    }
}

/// Block-circulant expansion: block row i, block column j holds frontal slice
/// (i − j) mod I3. Quadratic in memory; a cross-check for the FFT route, not a
/// compute path.
pub fn bcirc<T: Scalar>(a: &Tensor3<T>) -> DMatrix<T> {
    let (i1, i2, i3) = a.dims();
    let mut m = DMatrix::<T>::zeros(i1 * i3, i2 * i3);
    for bi in 0..i3 {
        for bj in 0..i3 {
            let k = (bi + i3 - bj) % i3;
            m.view_mut((bi * i1, bj * i2), (i1, i2))
                .copy_from(&a.frontal(k));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_tensor_all_kinds() {
        let z = Tensor3::<f64>::zeros((3, 4, 2));
        for kind in [
            NormKind::Fro,
            NormKind::Inf,
            NormKind::L2Inf,
            NormKind::L1Inf,
            NormKind::Spectral,
            NormKind::Nuclear,
        ] {
            assert_eq!(z.norm(kind), 0.0);
        }
    }

    #[test]
    fn hand_checked_small_tensor() {
        // 1×2×1 tensor [3, -4]: fro 5, inf 4, l2inf 5, l1inf 7
        let mut a = Tensor3::<f64>::zeros((1, 2, 1));
        a[(0, 0, 0)] = 3.0;
        a[(0, 1, 0)] = -4.0;
        assert_eq!(a.norm(NormKind::Fro), 5.0);
        assert_eq!(a.norm(NormKind::Inf), 4.0);
        assert_eq!(a.norm(NormKind::L2Inf), 5.0);
        assert_eq!(a.norm(NormKind::L1Inf), 7.0);
    }

    #[test]
    fn l2inf_maximizes_over_rows() {
        let mut a = Tensor3::<f64>::zeros((2, 2, 2));
        // row 0 slice: [1 1; 1 1] flattened -> l2 = 2, l1 = 4
        for c in 0..2 {
            for k in 0..2 {
                a[(0, c, k)] = 1.0;
            }
        }
        // row 1 slice has a single big entry
        a[(1, 0, 0)] = 3.0;
        assert_eq!(a.norm(NormKind::L2Inf), 3.0);
        assert_eq!(a.norm(NormKind::L1Inf), 4.0);
    }

    #[test]
    fn spectral_matches_bcirc_two_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = Tensor3::<f64>::random_normal((5, 4, 3), &mut rng);
        let direct = bcirc(&a).singular_values()[0];
        let viafft = a.norm(NormKind::Spectral);
        assert!((direct - viafft).abs() < 1e-9 * direct.max(1.0));
    }

    #[test]
    fn inf_matches_bcirc_entry_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = Tensor3::<f64>::random_normal((4, 4, 5), &mut rng);
        let mx = bcirc(&a).iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert_eq!(a.norm(NormKind::Inf), mx);
    }

    #[test]
    fn nuclear_counts_mirrored_slices() {
        // against an unweighted full sweep
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for &i3 in &[3usize, 4] {
            let a = Tensor3::<f64>::random_normal((4, 3, i3), &mut rng);
            let spec = fft_mode3(&a);
            let full: f64 = (0..i3)
                .map(|j| spec.slice(j).clone().singular_values().iter().sum::<f64>())
                .sum::<f64>()
                / i3 as f64;
            let got = a.norm(NormKind::Nuclear);
            assert!((full - got).abs() < 1e-10 * full, "i3={i3}");
        }
    }

    #[test]
    fn bcirc_single_slice_is_the_slice() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = Tensor3::<f64>::random_normal((3, 2, 1), &mut rng);
        let m = bcirc(&a);
        assert_eq!(m, DMatrix::from(a.frontal(0)));
    }

    #[test]
    fn bcirc_layout() {
        // 1×1×3 tube [a, b, c]: circulant [a c b; b a c; c b a]
        let mut t = Tensor3::<f64>::zeros((1, 1, 3));
        t[(0, 0, 0)] = 1.0;
        t[(0, 0, 1)] = 2.0;
        t[(0, 0, 2)] = 3.0;
        let m = bcirc(&t);
        let want = DMatrix::from_row_slice(3, 3, &[1.0, 3.0, 2.0, 2.0, 1.0, 3.0, 3.0, 2.0, 1.0]);
        assert_eq!(m, want);
    }

    #[test]
    fn fro_rank_spectral_bound() {
        // ‖A‖_F ≤ √R ‖A‖₂ with R = full tubal rank bound min(I1,I2)
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..20 {
            let a = Tensor3::<f64>::random_normal((4, 3, 4), &mut rng);
            let f = a.norm(NormKind::Fro);
            let s = a.norm(NormKind::Spectral);
            assert!(f <= 3.0f64.sqrt() * s * (1.0 + 1e-12));
        }
    }
}
