//! Self-supervised tuning of the four solver scalars.
//!
//! Each raw parameter lives in an unconstrained space and is mapped to its
//! feasible region on use: softplus for `zeta0`, `zeta1`, `eta` (positive),
//! sigmoid for `tau` (unit interval). Training is plain gradient descent with
//! central finite differences through the unrolled solver; the loss never
//! sees ground truth.

use crate::error::{Error, Result};
use crate::rtpca::{sgd_step, spectral_init, SgdConfig};
use crate::scalar::Scalar;
use crate::tensor3::{NormKind, Tensor3};
use crate::tlinalg::{conj_transpose, tprod};
use serde::{Deserialize, Serialize};

/// Constrained solver parameters produced by [`constrain`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub zeta0: f64,
    pub zeta1: f64,
    pub tau: f64,
    pub eta: f64,
}

/// Training configuration. `raw` holds the unconstrained parameters in the
/// order (zeta0, zeta1, tau, eta).
#[derive(Debug, Clone)]
pub struct LearnConfig<T: Scalar> {
    pub raw: [f64; 4],
    pub epochs: usize,
    pub learn_rate: f64,
    pub fd_step: f64,
    pub k_unroll: usize,
    pub rank: usize,
    pub train_set: Vec<Tensor3<T>>,
}

impl<T: Scalar> LearnConfig<T> {
    pub fn new(rank: usize, train_set: Vec<Tensor3<T>>) -> Self {
        LearnConfig {
            raw: [0.0; 4],
            epochs: 100,
            learn_rate: 0.1,
            fd_step: 1e-4,
            k_unroll: 30,
            rank,
            train_set,
        }
    }

    /// Start from concrete solver parameters via the inverse maps.
    pub fn from_params(params: SolverParams, rank: usize, train_set: Vec<Tensor3<T>>) -> Self {
        let mut cfg = Self::new(rank, train_set);
        cfg.raw = [
            softplus_inv(params.zeta0),
            softplus_inv(params.zeta1),
            logit(params.tau),
            softplus_inv(params.eta),
        ];
        cfg
    }
}

/// Result of a training run. `loss_history` is the running best, so it is
/// nonincreasing; `raw` and the constrained fields describe the best iterate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnOutcome {
    pub zeta0: f64,
    pub zeta1: f64,
    pub tau: f64,
    pub eta: f64,
    pub raw: [f64; 4],
    pub loss_history: Vec<f64>,
}

impl LearnOutcome {
    pub fn params(&self) -> SolverParams {
        SolverParams {
            zeta0: self.zeta0,
            zeta1: self.zeta1,
            tau: self.tau,
            eta: self.eta,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome serializes")
    }
}

/// ln(1 + e^x), linear for large x and e^x for very negative x.
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Inverse of [`softplus`] on (0, inf).
pub fn softplus_inv(y: f64) -> f64 {
    debug_assert!(y > 0.0);
    if y > 30.0 {
        y
    } else {
        y.exp_m1().ln()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`sigmoid`] on (0, 1).
pub fn logit(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    (p / (1.0 - p)).ln()
}

/// Map raw parameters to the feasible region.
pub fn constrain(raw: &[f64; 4]) -> SolverParams {
    SolverParams {
        zeta0: softplus(raw[0]),
        zeta1: softplus(raw[1]),
        tau: sigmoid(raw[2]),
        eta: softplus(raw[3]),
    }
}

/// Self-supervised loss: ‖Y − L*Rᵀ‖₁ / ‖Y‖²_F.
pub fn sll_loss<T: Scalar>(y: &Tensor3<T>, l: &Tensor3<T>, r: &Tensor3<T>) -> Result<f64> {
    let ynorm = y.norm(NormKind::Fro);
    if ynorm == T::zero() {
        return Err(Error::ZeroObservation);
    }
    let x = tprod(l, &conj_transpose(r))?;
    let l1: f64 = y
        .data()
        .iter()
        .zip(x.data().iter())
        .map(|(a, b)| (*a - *b).abs().as_f64())
        .sum();
    Ok(l1 / ynorm.as_f64().powi(2))
}

/// Run the solver `k_unroll` steps with the constrained parameters and score
/// the terminal factors on one observation.
fn forward_loss<T: Scalar>(cfg: &LearnConfig<T>, raw: &[f64; 4], y: &Tensor3<T>) -> Result<f64> {
    let p = constrain(raw);
    let solver = SgdConfig::new(cfg.rank, cfg.k_unroll, p.eta, p.zeta0, p.zeta1, p.tau);
    let mut st = spectral_init(y, &solver)?;
    for _ in 0..cfg.k_unroll {
        st = sgd_step(&st, y, &solver)?;
    }
    sll_loss(y, &st.l, &st.r)
}

/// Central difference of an arbitrary scalar function of the raw parameters.
fn central_diff(
    f: &mut dyn FnMut(&[f64; 4]) -> Result<f64>,
    raw: &[f64; 4],
    h: f64,
) -> Result<[f64; 4]> {
    let mut g = [0.0; 4];
    for i in 0..4 {
        let mut hi = *raw;
        let mut lo = *raw;
        hi[i] += h;
        lo[i] -= h;
        g[i] = (f(&hi)? - f(&lo)?) / (2.0 * h);
    }
    Ok(g)
}

/// Finite-difference gradient of the unrolled-solver loss on one observation.
pub fn fd_grad<T: Scalar>(cfg: &LearnConfig<T>, y: &Tensor3<T>) -> Result<[f64; 4]> {
    assert!(cfg.fd_step > 0.0, "fd_step must be positive");
    central_diff(&mut |raw| forward_loss(cfg, raw, y), &cfg.raw, cfg.fd_step)
}

fn mean_loss<T: Scalar>(cfg: &LearnConfig<T>, raw: &[f64; 4]) -> Result<f64> {
    let mut total = 0.0;
    for y in &cfg.train_set {
        total += forward_loss(cfg, raw, y)?;
    }
    Ok(total / cfg.train_set.len() as f64)
}

/// Gradient descent on the raw parameters. Returns the best iterate seen;
/// aborts if the loss exceeds ten times its initial value.
pub fn train<T: Scalar>(cfg: &LearnConfig<T>) -> Result<LearnOutcome> {
    if cfg.train_set.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    let initial = mean_loss(cfg, &cfg.raw)?;
    let mut best_raw = cfg.raw;
    let mut best_loss = initial;
    let mut history = vec![initial];

    let mut raw = cfg.raw;
    for epoch in 0..cfg.epochs {
        let mut grad = [0.0; 4];
        for y in &cfg.train_set {
            let probe = LearnConfig {
                raw,
                train_set: Vec::new(),
                ..cfg.clone()
            };
            let g = fd_grad(&probe, y)?;
            for i in 0..4 {
                grad[i] += g[i] / cfg.train_set.len() as f64;
            }
        }
        for i in 0..4 {
            raw[i] -= cfg.learn_rate * grad[i];
        }
        let loss = mean_loss(cfg, &raw)?;
        if !loss.is_finite() || loss > 10.0 * initial {
            return Err(Error::Diverged {
                epoch,
                loss,
                initial,
                history,
            });
        }
        if loss < best_loss {
            best_loss = loss;
            best_raw = raw;
        }
        history.push(best_loss);
    }

    let p = constrain(&best_raw);
    Ok(LearnOutcome {
        zeta0: p.zeta0,
        zeta1: p.zeta1,
        tau: p.tau,
        eta: p.eta,
        raw: best_raw,
        loss_history: history,
    })
}
