//! Robust tensor PCA solvers: the scaled-gradient method with thresholded
//! sparse updates, and a nuclear-norm ADMM baseline.
//!
//! The iteration, for observation y and factor rank R:
//!
//! ```text
//! zeta_{k+1} = tau^k * zeta1
//! S_{k+1}    = shrink(y - L_k*R_kT, zeta_{k+1})
//! W          = L_k*R_kT + S_{k+1} - y
//! L_{k+1}    = L_k - eta * W  * R_k * (R_kT*R_k)^-1
//! R_{k+1}    = R_k - eta * WT * L_k * (L_kT*L_k)^-1
//! ```
//!
//! Both factor updates read the pre-step factors. The Gram inverses make the
//! step scale-invariant: the rate does not degrade with the condition number
//! of the ground truth.

mod admm;
mod report;

pub use admm::{default_lambda, solve_tnn_admm, solve_tnn_admm_with_truth};
pub use report::{IterRecord, SgdTrace, TraceConfig, TraceResult};

use crate::cost;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synth::incoherence_mu;
use crate::tensor3::{fft_mode3, half_slices, ifft_mode3, Dims, NormKind, SpectralTensor, Tensor3};
use crate::tlinalg::{conj_transpose, soft_threshold, top_r_approx, tprod, try_svd, tsvd_skinny};
use nalgebra::DMatrix;
use num_complex::Complex;
use std::time::Instant;

/// Instrumentation-only reference solution.
#[derive(Clone, Debug)]
pub struct GroundTruth<T: Scalar> {
    pub x_star: Tensor3<T>,
    pub s_star: Tensor3<T>,
}

#[derive(Clone, Debug)]
pub struct SgdConfig<T: Scalar> {
    pub rank: usize,
    pub iters: usize,
    pub eta: f64,
    pub zeta0: f64,
    pub zeta1: f64,
    pub tau: f64,
    /// Relative floor under which a Gram slice counts as collapsed.
    pub rank_tol: f64,
    /// When present, traces carry rse / infinity-error / support columns.
    pub trace_ground_truth: Option<GroundTruth<T>>,
}

impl<T: Scalar> SgdConfig<T> {
    /// Plain config with the standard rank tolerance and no instrumentation.
    pub fn new(rank: usize, iters: usize, eta: f64, zeta0: f64, zeta1: f64, tau: f64) -> Self {
        Self {
            rank,
            iters,
            eta,
            zeta0,
            zeta1,
            tau,
            rank_tol: 1e-10,
            trace_ground_truth: None,
        }
    }

    /// Config on the guaranteed schedule derived from ground-truth statistics.
    pub fn theorem(rank: usize, iters: usize, eta: f64, stats: &XStarStats) -> Self {
        let sched = default_schedule(stats, eta);
        Self::new(rank, iters, eta, sched.zeta0, sched.zeta1, sched.tau)
    }

    pub fn with_truth(mut self, truth: GroundTruth<T>) -> Self {
        self.trace_ground_truth = Some(truth);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::BadConfig("rank must be positive".into()));
        }
        if self.iters == 0 {
            return Err(Error::BadConfig("iteration count must be positive".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::BadConfig(format!(
                "step size must lie in (0, 1], got {}",
                self.eta
            )));
        }
        if !(self.zeta0 > 0.0) || !(self.zeta1 > 0.0) {
            return Err(Error::BadConfig(format!(
                "thresholds must be positive, got zeta0={} zeta1={}",
                self.zeta0, self.zeta1
            )));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::BadConfig(format!(
                "decay rate must lie in (0, 1), got {}",
                self.tau
            )));
        }
        if !(self.rank_tol > 0.0) {
            return Err(Error::BadConfig("rank tolerance must be positive".into()));
        }
        Ok(())
    }

    /// True when eta sits in the guaranteed range and tau is tied to it.
    pub fn theorem_mode(&self) -> bool {
        (0.25..=2.0 / 3.0 + 1e-12).contains(&self.eta)
            && (self.tau - (1.0 - 0.6 * self.eta)).abs() <= 1e-9
    }

    fn trace_config(&self) -> TraceConfig {
        TraceConfig::Sgd {
            rank: self.rank,
            iters: self.iters,
            eta: self.eta,
            zeta0: self.zeta0,
            zeta1: self.zeta1,
            tau: self.tau,
            rank_tol: self.rank_tol,
            theorem_mode: self.theorem_mode(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SgdState<T: Scalar> {
    /// I1×R×I3.
    pub l: Tensor3<T>,
    /// I2×R×I3.
    pub r: Tensor3<T>,
    /// I1×I2×I3.
    pub s: Tensor3<T>,
    pub k: usize,
}

/// Ground-truth statistics feeding the guaranteed schedule.
#[derive(Clone, Copy, Debug)]
pub struct XStarStats {
    pub sigma_min: f64,
    pub mu: f64,
    pub rank: usize,
    pub dims: Dims,
    pub x_inf: f64,
}

impl XStarStats {
    /// Exact statistics from a known low-rank tensor.
    pub fn measure<T: Scalar>(x_star: &Tensor3<T>, rank: usize) -> Result<Self> {
        let f = tsvd_skinny(x_star, rank)?;
        Ok(Self {
            sigma_min: f.sigma_min().as_f64(),
            mu: incoherence_mu(&f.u, &f.v, rank),
            rank,
            dims: x_star.dims(),
            x_inf: x_star.abs_max().as_f64(),
        })
    }

    /// Heuristic statistics from the observation alone: a top-R pre-pass
    /// smooths away sparse spikes, a median+3·MAD scale stands in for the
    /// unobservable max magnitude, and the factors of the pre-cleaned
    /// observation estimate incoherence and the smallest singular value.
    pub fn estimate<T: Scalar>(y: &Tensor3<T>, rank: usize) -> Result<Self> {
        let (l0, r0) = top_r_approx(y, rank)?;
        let smooth = tprod(&l0, &conj_transpose(&r0))?;
        let x_inf = mad_scale(&smooth);
        let s0 = soft_threshold(y, T::of(1.5 * x_inf));
        let f = tsvd_skinny(&y.sub(&s0), rank)?;
        Ok(Self {
            sigma_min: f.sigma_min().as_f64(),
            mu: incoherence_mu(&f.u, &f.v, rank),
            rank,
            dims: y.dims(),
            x_inf,
        })
    }
}

/// Robust scale proxy for the largest entry magnitude: median + 3·MAD of
/// |entries|.
fn mad_scale<T: Scalar>(t: &Tensor3<T>) -> f64 {
    fn median(v: &mut [f64]) -> f64 {
        let mid = v.len() / 2;
        let (_, m, _) = v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
        *m
    }
    let mut mags: Vec<f64> = t.data().iter().map(|v| v.as_f64().abs()).collect();
    let med = median(&mut mags);
    for m in mags.iter_mut() {
        *m = (*m - med).abs();
    }
    let mad = median(&mut mags);
    med + 3.0 * mad
}

#[derive(Clone, Copy, Debug)]
pub struct Schedule {
    pub zeta0: f64,
    pub zeta1: f64,
    pub tau: f64,
    /// False flags an eta outside the guaranteed range; the schedule is
    /// still produced.
    pub eta_in_range: bool,
}

/// The guaranteed schedule: zeta0 = 1.5·‖x★‖∞ (midpoint of the admissible
/// band), zeta1 = 3/√(I1·I2)·μ·R·σ_min, tau = 1 − 0.6·eta.
pub fn default_schedule(stats: &XStarStats, eta: f64) -> Schedule {
    let (i1, i2, _) = stats.dims;
    Schedule {
        zeta0: 1.5 * stats.x_inf,
        zeta1: 3.0 / ((i1 * i2) as f64).sqrt() * stats.mu * stats.rank as f64 * stats.sigma_min,
        tau: 1.0 - 0.6 * eta,
        eta_in_range: (0.25..=2.0 / 3.0 + 1e-12).contains(&eta),
    }
}

/// S₀ = shrink(y, ζ₀), (L₀, R₀) = balanced top-R factors of y − S₀.
pub fn spectral_init<T: Scalar>(y: &Tensor3<T>, cfg: &SgdConfig<T>) -> Result<SgdState<T>> {
    let s = soft_threshold(y, T::of(cfg.zeta0));
    let (l, r) = top_r_approx(&y.sub(&s), cfg.rank)?;
    Ok(SgdState { l, r, s, k: 0 })
}

/// Factor spectra (computed half) plus the current product, carried across
/// iterations so each step runs one full-size transform pair.
struct FactorCache<T: Scalar> {
    dims: Dims,
    rank: usize,
    l_hat: Vec<DMatrix<Complex<T>>>,
    r_hat: Vec<DMatrix<Complex<T>>>,
    x: Tensor3<T>,
}

impl<T: Scalar> FactorCache<T> {
    fn from_factors(l: &Tensor3<T>, r: &Tensor3<T>) -> Result<Self> {
        let (i1, rank, i3) = l.dims();
        let (i2, _, _) = r.dims();
        let half = half_slices(i3);
        let mut l_hat = fft_mode3(l).into_slices();
        let mut r_hat = fft_mode3(r).into_slices();
        l_hat.truncate(half);
        r_hat.truncate(half);
        let x = product(&l_hat, &r_hat, (i1, i2, i3))?;
        Ok(Self {
            dims: (i1, i2, i3),
            rank,
            l_hat,
            r_hat,
            x,
        })
    }

    fn to_factors(&self) -> Result<(Tensor3<T>, Tensor3<T>)> {
        let (i1, i2, i3) = self.dims;
        let l = ifft_mode3(&SpectralTensor::from_computed_half(
            (i1, self.rank, i3),
            self.l_hat.clone(),
        ))?;
        let r = ifft_mode3(&SpectralTensor::from_computed_half(
            (i2, self.rank, i3),
            self.r_hat.clone(),
        ))?;
        Ok((l, r))
    }
}

/// x = l * rᵀ from half spectra.
fn product<T: Scalar>(
    l_hat: &[DMatrix<Complex<T>>],
    r_hat: &[DMatrix<Complex<T>>],
    dims: Dims,
) -> Result<Tensor3<T>> {
    let (i1, i2, _) = dims;
    let slices = l_hat
        .iter()
        .zip(r_hat)
        .map(|(l, r)| {
            cost::record_matmul(i1, l.ncols(), i2);
            l * r.adjoint()
        })
        .collect();
    ifft_mode3(&SpectralTensor::from_computed_half(dims, slices))
}

/// Inverses of the per-slice Gram matrices fᵀf, with the rank check applied
/// relative to the largest Gram singular value across slices.
fn gram_inverses<T: Scalar>(
    factors: &[DMatrix<Complex<T>>],
    rank_tol: f64,
) -> Result<Vec<DMatrix<Complex<T>>>> {
    let r = factors[0].ncols();
    let mut svds = Vec::with_capacity(factors.len());
    let mut sigma_max = T::zero();
    for (j, f) in factors.iter().enumerate() {
        cost::record_matmul(r, f.nrows(), r);
        let svd = try_svd(f.adjoint() * f, true, true, j)?;
        cost::record_svd(r, r);
        sigma_max = sigma_max.max(svd.singular_values[0]);
        svds.push(svd);
    }
    if sigma_max.is_zero() {
        return Err(Error::RankCollapse { slice: 0 });
    }
    let floor = T::of(rank_tol) * sigma_max;
    svds.into_iter()
        .enumerate()
        .map(|(j, svd)| {
            if svd.singular_values[r - 1] <= floor {
                return Err(Error::RankCollapse { slice: j });
            }
            let inv_diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                r,
                svd.singular_values
                    .iter()
                    .map(|&s| Complex::new(T::one() / s, T::zero())),
            ));
            cost::record_matmul(r, r, r);
            Ok(svd.v_t.unwrap().adjoint() * inv_diag * svd.u.unwrap().adjoint())
        })
        .collect()
}

/// One iteration against the cache; returns the new sparse component and the
/// threshold used. The cache's factors and product advance to k+1.
fn spectral_step<T: Scalar>(
    cache: &mut FactorCache<T>,
    y: &Tensor3<T>,
    cfg: &SgdConfig<T>,
    k: usize,
) -> Result<(Tensor3<T>, f64)> {
    let (i1, i2, i3) = cache.dims;
    let rank = cache.rank;
    let zeta = cfg.zeta1 * cfg.tau.powi(k as i32);
    let s = soft_threshold(&y.sub(&cache.x), T::of(zeta));
    let w = cache.x.add(&s).sub(y);

    let inv_r = gram_inverses(&cache.r_hat, cfg.rank_tol)?;
    let inv_l = gram_inverses(&cache.l_hat, cfg.rank_tol)?;

    let mut w_hat = fft_mode3(&w).into_slices();
    w_hat.truncate(half_slices(i3));

    let eta = Complex::new(T::of(cfg.eta), T::zero());
    let mut x_slices = Vec::with_capacity(w_hat.len());
    for j in 0..w_hat.len() {
        let wj = &w_hat[j];
        cost::record_matmul(i1, i2, rank);
        cost::record_matmul(i1, rank, rank);
        let l_next = &cache.l_hat[j] - (wj * &cache.r_hat[j]) * &inv_r[j] * eta;
        cost::record_matmul(i2, i1, rank);
        cost::record_matmul(i2, rank, rank);
        let r_next = &cache.r_hat[j] - (wj.adjoint() * &cache.l_hat[j]) * &inv_l[j] * eta;
        cost::record_matmul(i1, rank, i2);
        x_slices.push(&l_next * r_next.adjoint());
        cache.l_hat[j] = l_next;
        cache.r_hat[j] = r_next;
    }
    cache.x = ifft_mode3(&SpectralTensor::from_computed_half((i1, i2, i3), x_slices))?;
    Ok((s, zeta))
}

/// One iteration as a standalone state transition. `solve_sgd` is the loop
/// form (it keeps factor spectra cached between steps); results agree to
/// float noise.
pub fn sgd_step<T: Scalar>(
    state: &SgdState<T>,
    y: &Tensor3<T>,
    cfg: &SgdConfig<T>,
) -> Result<SgdState<T>> {
    let mut cache = FactorCache::from_factors(&state.l, &state.r)?;
    let (s, _zeta) = spectral_step(&mut cache, y, cfg, state.k)?;
    let (l, r) = cache.to_factors()?;
    Ok(SgdState {
        l,
        r,
        s,
        k: state.k + 1,
    })
}

fn instrument<T: Scalar>(
    x: &Tensor3<T>,
    s: &Tensor3<T>,
    truth: Option<&GroundTruth<T>>,
) -> (Option<f64>, Option<f64>, Option<f64>, Option<usize>) {
    match truth {
        None => (None, None, None, None),
        Some(t) => {
            let rse = crate::synth::rse(x, &t.x_star).as_f64();
            let eix = x.sub(&t.x_star).abs_max().as_f64();
            let eis = s.sub(&t.s_star).abs_max().as_f64();
            let viol = s
                .data()
                .iter()
                .zip(t.s_star.data())
                .filter(|(&sv, &tv)| !sv.is_zero() && tv.is_zero())
                .count();
            (Some(rse), Some(eix), Some(eis), Some(viol))
        }
    }
}

/// Full solve: spectral initialization, then up to `cfg.iters` steps with an
/// early stop once the observable residual ‖y − x − s‖_F/‖y‖_F drops below
/// 1e−14. Returns the low-rank estimate, the sparse estimate, and the trace.
pub fn solve_sgd<T: Scalar>(
    y: &Tensor3<T>,
    cfg: &SgdConfig<T>,
) -> Result<(Tensor3<T>, Tensor3<T>, SgdTrace)> {
    cfg.validate()?;
    let truth = cfg.trace_ground_truth.as_ref();
    let t_total = Instant::now();
    let mut t_iter = Instant::now();
    let mut cost_mark = cost::snapshot();

    let state0 = spectral_init(y, cfg)?;
    let mut cache = FactorCache::from_factors(&state0.l, &state0.r)?;
    let mut s = state0.s;

    let mut iterations = Vec::with_capacity(cfg.iters + 1);
    let push_row = |k: usize,
                        zeta: f64,
                        x: &Tensor3<T>,
                        s: &Tensor3<T>,
                        t_iter: &mut Instant,
                        cost_mark: &mut cost::CostSnapshot,
                        rows: &mut Vec<IterRecord>| {
        let (rse, err_inf_x, err_inf_s, support_violations) = instrument(x, s, truth);
        rows.push(IterRecord {
            k,
            rse,
            err_inf_x,
            err_inf_s,
            zeta,
            ms: t_iter.elapsed().as_secs_f64() * 1e3,
            cost: cost::delta_since(*cost_mark),
            support_violations,
        });
        *t_iter = Instant::now();
        *cost_mark = cost::snapshot();
    };
    push_row(0, cfg.zeta0, &cache.x, &s, &mut t_iter, &mut cost_mark, &mut iterations);

    let y_norm = y.norm(NormKind::Fro);
    let mut steps = 0;
    for k in 0..cfg.iters {
        if y_norm.is_zero() {
            break;
        }
        let resid = y.sub(&cache.x).sub(&s).norm(NormKind::Fro) / y_norm;
        if resid.as_f64() < 1e-14 {
            break;
        }
        let (s_next, zeta) = spectral_step(&mut cache, y, cfg, k)?;
        s = s_next;
        steps = k + 1;
        push_row(steps, zeta, &cache.x, &s, &mut t_iter, &mut cost_mark, &mut iterations);
    }

    let x = cache.x.clone();
    let rse_final = truth.map(|t| crate::synth::rse(&x, &t.x_star).as_f64());
    let trace = SgdTrace {
        config: cfg.trace_config(),
        iterations,
        result: TraceResult {
            rse_final,
            iters: steps,
            wall_ms: t_total.elapsed().as_secs_f64() * 1e3,
        },
    };
    Ok((x, s, trace))
}
