//! Shared helpers for the integration suites: seeded tensor builders and an
//! independent block-circulant route to the t-product.

#![allow(dead_code)]

pub mod sect_a;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trpca::Tensor3f64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, dims: (usize, usize, usize)) -> Tensor3f64 {
    Tensor3f64::random_normal(dims, rng)
}

/// Random shape with every side in [lo, hi].
pub fn random_dims(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> (usize, usize, usize) {
    (
        rng.gen_range(lo..=hi),
        rng.gen_range(lo..=hi),
        rng.gen_range(lo..=hi),
    )
}

/// bcirc(A): the (I1·I3)×(I2·I3) block-circulant matrix whose (bi, bj) block
/// is the frontal slice (bi − bj) mod I3.
pub fn bcirc(a: &Tensor3f64) -> DMatrix<f64> {
    let (i1, i2, i3) = a.dims();
    let mut m = DMatrix::zeros(i1 * i3, i2 * i3);
    for bi in 0..i3 {
        for bj in 0..i3 {
            let src = (bi + i3 - bj) % i3;
            for c in 0..i2 {
                for r in 0..i1 {
                    m[(bi * i1 + r, bj * i2 + c)] = a.get(r, c, src);
                }
            }
        }
    }
    m
}

/// unfold(B): frontal slices stacked vertically, (I1·I3)×I2.
pub fn unfold(b: &Tensor3f64) -> DMatrix<f64> {
    let (i1, i2, i3) = b.dims();
    let mut m = DMatrix::zeros(i1 * i3, i2);
    for s in 0..i3 {
        for c in 0..i2 {
            for r in 0..i1 {
                m[(s * i1 + r, c)] = b.get(r, c, s);
            }
        }
    }
    m
}

/// A*B computed as fold(bcirc(A)·unfold(B)) — no FFT, no tube convolution.
pub fn bcirc_prod(a: &Tensor3f64, b: &Tensor3f64) -> Tensor3f64 {
    let (i1, _, i3) = a.dims();
    let (_, j2, _) = b.dims();
    let m = bcirc(a) * unfold(b);
    let mut out = Tensor3f64::zeros((i1, j2, i3));
    for s in 0..i3 {
        for c in 0..j2 {
            for r in 0..i1 {
                out.set(r, c, s, m[(s * i1 + r, c)]);
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &Tensor3f64, b: &Tensor3f64) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Relative gap between two tensors against the larger magnitude.
pub fn rel_diff(a: &Tensor3f64, b: &Tensor3f64) -> f64 {
    use trpca::NormKind;
    let scale = a.norm(NormKind::Fro).max(b.norm(NormKind::Fro)).max(1e-300);
    a.sub(b).norm(NormKind::Fro) / scale
}

/// Sum of the first frontal slice's diagonal; the trace compatible with the
/// 1/I3-scaled nuclear norm.
pub fn trace(a: &Tensor3f64) -> f64 {
    let (i1, i2, _) = a.dims();
    (0..i1.min(i2)).map(|i| a.get(i, i, 0)).sum()
}
