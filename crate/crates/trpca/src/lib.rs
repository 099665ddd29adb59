//! Tensor robust PCA over the t-product algebra.
//!
//! A dense order-3 tensor type with its mode-3 Fourier transform, the t-SVD
//! factorization family, a scaled-gradient solver for the low-rank plus
//! sparse decomposition problem, a nuclear-norm ADMM baseline, synthetic
//! problem generators, and a finite-difference hyperparameter learner.
//!
//! Everything is generic over the scalar type; `f64` is the working
//! precision for all shipped tools.
//!
//! ```
//! use trpca::{NormKind, Tensor3f64};
//!
//! let mut t = Tensor3f64::zeros((2, 2, 3));
//! t[(0, 1, 2)] = -4.0;
//! assert_eq!(t.norm(NormKind::Inf), 4.0);
//! ```

pub mod cost;
pub mod error;
pub mod learn;
pub mod phase;
pub mod rtpca;
pub mod scalar;
pub mod synth;
pub mod tensor3;
pub mod tlinalg;

pub use cost::{delta_since, snapshot, CostSnapshot};
pub use error::{Error, Result};
pub use learn::{
    constrain, fd_grad, sll_loss, train, LearnConfig, LearnOutcome, SolverParams,
};
pub use rtpca::{
    default_lambda, default_schedule, sgd_step, solve_sgd, solve_tnn_admm,
    solve_tnn_admm_with_truth, spectral_init, GroundTruth, IterRecord, Schedule, SgdConfig,
    SgdState, SgdTrace, TraceConfig, TraceResult, XStarStats,
};
pub use phase::{run_grid, write_csv, Algo, PhaseCell, PhaseGrid};
pub use scalar::Scalar;
pub use tensor3::{
    bcirc, fft_mode3, half_slices, ifft_mode3, load_t3b, read_t3b, save_t3b, write_t3b, Dims,
    NormKind, SpectralTensor, Tensor3, T3B_MAGIC,
};
pub use synth::{
    gen_instance, gen_lowrank, gen_sparse, incoherence_mu, psnr, rse, sparsity_alpha_t,
    write_instance, Instance, LowrankParts, Measured, SynthSpec,
};
pub use tlinalg::{
    conj_transpose, fourier_singular_values, identity_tensor, multi_rank, soft_threshold,
    tinv, tinv_with_tol, top_r_approx, tprod, tprod_naive, tsvd, tsvd_skinny, tsvt, tubal_rank,
    TsvdFactors, TsvdMode,
};

pub type Tensor3f32 = Tensor3<f32>;
pub type Tensor3f64 = Tensor3<f64>;
