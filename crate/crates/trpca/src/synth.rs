//! Synthetic low-rank + sparse problem instances with controllable tubal
//! rank, condition number, and sparsity, plus the recovery metrics.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor3::{half_slices, save_t3b, NormKind, Tensor3};
use crate::tlinalg::{conj_transpose, fdiag_from_spectrum, tprod, tsvd_skinny};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Stream separation for the sparse component's RNG.
const SPARSE_SEED_GAMMA: u64 = 0x9E3779B97F4A7C15;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SynthSpec {
    pub dims: (usize, usize, usize),
    pub rank: usize,
    pub kappa: f64,
    pub alpha: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let (i1, i2, i3) = self.dims;
        if i1 == 0 || i2 == 0 || i3 == 0 {
            return Err(Error::BadConfig("dimensions must be positive".into()));
        }
        let max = i1.min(i2);
        if self.rank < 1 || self.rank > max {
            return Err(Error::RankOutOfRange {
                rank: self.rank,
                max,
            });
        }
        if !(self.kappa >= 1.0) {
            return Err(Error::BadConfig(format!(
                "condition number must be >= 1, got {}",
                self.kappa
            )));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::BadConfig(format!(
                "sparsity must lie in [0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LowrankParts<T: Scalar> {
    pub x_star: Tensor3<T>,
    pub u: Tensor3<T>,
    pub v: Tensor3<T>,
    pub sigma: Tensor3<T>,
}

/// `n` values descending from hi to lo; n = 1 keeps just hi.
pub fn linspace_desc<T: Scalar>(hi: f64, lo: f64, n: usize) -> Vec<T> {
    assert!(n >= 1);
    if n == 1 {
        return vec![T::of(hi)];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                T::of(lo)
            } else {
                T::of(hi + (lo - hi) * i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// Low-rank ground truth: random factor product for the singular subspaces,
/// then a prescribed Fourier-domain spectrum.
///
/// Slice j of the spectrum is linearly spaced from (1/2)^j down to 1/κ. The
/// upper endpoint is floored at 1/κ: taken literally it drops below 1/κ for
/// deep slices, which would silently blow the condition number past κ.
pub fn gen_lowrank<T: Scalar>(spec: &SynthSpec) -> Result<LowrankParts<T>> {
    spec.validate()?;
    let (i1, i2, i3) = spec.dims;
    let r = spec.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let left = Tensor3::<T>::random_normal((i1, r, i3), &mut rng);
    let right = Tensor3::<T>::random_normal((r, i2, i3), &mut rng);
    let x0 = tprod(&left, &right)?;
    let f = tsvd_skinny(&x0, r)?;

    let lo = 1.0 / spec.kappa;
    let diags: Vec<Vec<T>> = (0..half_slices(i3))
        .map(|j| linspace_desc(0.5f64.powi(j as i32).max(lo), lo, r))
        .collect();
    let sigma = fdiag_from_spectrum(&diags, i3)?;
    let x_star = tprod(&tprod(&f.u, &sigma)?, &conj_transpose(&f.v))?;
    Ok(LowrankParts {
        x_star,
        u: f.u,
        v: f.v,
        sigma,
    })
}

/// Sparse corruption: exactly ⌊α·N⌋ entries at positions sampled without
/// replacement, values uniform on [−θ, θ] with θ the mean absolute entry of
/// the low-rank part.
pub fn gen_sparse<T: Scalar>(x_star: &Tensor3<T>, alpha: f64, seed: u64) -> Tensor3<T> {
    assert!((0.0..1.0).contains(&alpha), "sparsity must lie in [0, 1)");
    let n = x_star.numel();
    let theta = x_star
        .data()
        .iter()
        .fold(0.0, |acc, &v| acc + v.as_f64().abs())
        / n as f64;
    let mut s = Tensor3::zeros(x_star.dims());
    let count = (alpha * n as f64).floor() as usize;
    if count == 0 || theta == 0.0 {
        return s;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = rand::seq::index::sample(&mut rng, n, count);
    let dist = Uniform::new_inclusive(-theta, theta);
    for p in positions.iter() {
        s.data_mut()[p] = T::of(dist.sample(&mut rng));
    }
    s
}

/// Smallest incoherence constant of a pair of column-orthogonal factors:
/// μ = max(I1/R·‖U‖²₂,∞, I2/R·‖V‖²₂,∞).
pub fn incoherence_mu<T: Scalar>(u: &Tensor3<T>, v: &Tensor3<T>, r: usize) -> f64 {
    let (i1, _, _) = u.dims();
    let (i2, _, _) = v.dims();
    let nu = u.norm(NormKind::L2Inf).as_f64();
    let nv = v.norm(NormKind::L2Inf).as_f64();
    let mu = (i1 as f64 / r as f64 * nu * nu).max(i2 as f64 / r as f64 * nv * nv);
    debug_assert!(mu >= 1.0 - 1e-9, "incoherence below 1: {mu}");
    mu
}

/// Worst fraction of nonzeros over the three slice families.
pub fn sparsity_alpha_t<T: Scalar>(s: &Tensor3<T>) -> f64 {
    let (i1, i2, i3) = s.dims();
    let mut by_i1 = vec![0usize; i1];
    let mut by_i2 = vec![0usize; i2];
    let mut by_i3 = vec![0usize; i3];
    for k in 0..i3 {
        for c in 0..i2 {
            for r in 0..i1 {
                if !s[(r, c, k)].is_zero() {
                    by_i1[r] += 1;
                    by_i2[c] += 1;
                    by_i3[k] += 1;
                }
            }
        }
    }
    let frac = |counts: &[usize], area: usize| {
        counts.iter().copied().max().unwrap_or(0) as f64 / area as f64
    };
    frac(&by_i1, i2 * i3)
        .max(frac(&by_i2, i1 * i3))
        .max(frac(&by_i3, i1 * i2))
}

/// ‖x − x★‖_F / ‖x★‖_F.
pub fn rse<T: Scalar>(x: &Tensor3<T>, x_star: &Tensor3<T>) -> T {
    let num = x.sub(x_star).norm(NormKind::Fro);
    let den = x_star.norm(NormKind::Fro);
    if den.is_zero() {
        if num.is_zero() {
            T::zero()
        } else {
            T::of(f64::INFINITY)
        }
    } else {
        num / den
    }
}

/// 10·log10(peak²·N/‖x−x★‖²), capped at 999 dB.
pub fn psnr<T: Scalar>(x: &Tensor3<T>, x_star: &Tensor3<T>, peak: f64) -> f64 {
    let diff = x.sub(x_star).norm(NormKind::Fro).as_f64();
    let mse = diff * diff / x.numel() as f64;
    if mse == 0.0 {
        return 999.0;
    }
    (10.0 * (peak * peak / mse).log10()).min(999.0)
}

/// Quantities measured on a generated instance (not targets).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Measured {
    pub mu: f64,
    pub alpha_t: f64,
    pub kappa: f64,
    pub sigma_min: f64,
    pub theta: f64,
    pub x_inf: f64,
}

#[derive(Clone, Debug)]
pub struct Instance<T: Scalar> {
    pub spec: SynthSpec,
    pub x_star: Tensor3<T>,
    pub s_star: Tensor3<T>,
    pub y: Tensor3<T>,
    pub measured: Measured,
}

/// Full observation y = x★ + s★ with measured statistics. κ and σ_min are
/// remeasured from a fresh decomposition of x★ rather than read off the
/// construction.
pub fn gen_instance<T: Scalar>(spec: &SynthSpec) -> Result<Instance<T>> {
    let parts = gen_lowrank::<T>(spec)?;
    let s_star = gen_sparse(&parts.x_star, spec.alpha, spec.seed.wrapping_add(SPARSE_SEED_GAMMA));
    let y = parts.x_star.add(&s_star);
    let f = tsvd_skinny(&parts.x_star, spec.rank)?;
    let theta = parts
        .x_star
        .data()
        .iter()
        .fold(0.0, |acc, &v| acc + v.as_f64().abs())
        / parts.x_star.numel() as f64;
    let measured = Measured {
        mu: incoherence_mu(&parts.u, &parts.v, spec.rank),
        alpha_t: sparsity_alpha_t(&s_star),
        kappa: f.kappa().as_f64(),
        sigma_min: f.sigma_min().as_f64(),
        theta,
        x_inf: parts.x_star.abs_max().as_f64(),
    };
    Ok(Instance {
        spec: *spec,
        x_star: parts.x_star,
        s_star,
        y,
        measured,
    })
}

#[derive(Serialize)]
struct Meta<'a> {
    spec: &'a SynthSpec,
    measured: &'a Measured,
}

/// Writes x_star.t3b, s_star.t3b, y.t3b and a meta.json sidecar.
pub fn write_instance<T: Scalar>(dir: impl AsRef<Path>, inst: &Instance<T>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    save_t3b(dir.join("x_star.t3b"), &inst.x_star)?;
    save_t3b(dir.join("s_star.t3b"), &inst.s_star)?;
    save_t3b(dir.join("y.t3b"), &inst.y)?;
    let meta = Meta {
        spec: &inst.spec,
        measured: &inst.measured,
    };
    let file = std::fs::File::create(dir.join("meta.json"))?;
    serde_json::to_writer_pretty(file, &meta).map_err(std::io::Error::from)?;
    Ok(())
}
