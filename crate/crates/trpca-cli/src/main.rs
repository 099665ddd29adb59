mod config;
mod grid;
mod pgm;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Tensor robust PCA from the command line.
///
/// Generates synthetic benchmark instances, runs the factored solver or the
/// nuclear-norm baseline on .t3b tensors, sweeps phase-transition grids,
/// fits solver schedules to training data, and denoises PGM frame stacks.
#[derive(Parser)]
#[command(name = "trpca", version, about, long_about = None)]
struct Cli {
    /// TOML file supplying values for flags left unset (flags win)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic low-rank + sparse instance
    Synth(SynthArgs),
    /// Recover low-rank and sparse parts of an observed tensor
    Solve(SolveArgs),
    /// Sweep a (rank, corruption) grid and write a success-map CSV
    Phase(PhaseArgs),
    /// Fit solver parameters to training tensors by finite differences
    Learn(LearnArgs),
    /// Low-rank denoising of a directory of PGM frames
    Denoise(DenoiseArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoFlag {
    Sgd,
    Tnn,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Tensor shape as I1xI2xI3, e.g. 100x100x50
    #[arg(long)]
    pub dims: Option<String>,
    /// Tubal rank of the low-rank part
    #[arg(long)]
    pub rank: Option<usize>,
    /// Condition number of the low-rank part [default: 5]
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Per-slice corruption fraction [default: 0.1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// RNG seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for y.t3b, x_star.t3b, s_star.t3b, meta.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Observed tensor (.t3b)
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Factor rank (sgd only; estimated schedule needs it)
    #[arg(long)]
    pub rank: Option<usize>,
    /// Step size [default: 0.5]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Threshold decay [default: from estimated schedule]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Initial threshold [default: from estimated schedule]
    #[arg(long)]
    pub zeta0: Option<f64>,
    /// First-iteration threshold [default: from estimated schedule]
    #[arg(long)]
    pub zeta1: Option<f64>,
    /// Iteration cap [default: 100]
    #[arg(long)]
    pub iters: Option<usize>,
    /// Ground-truth low-rank tensor; enables rse columns in the trace
    #[arg(long, value_name = "FILE")]
    pub truth: Option<PathBuf>,
    /// Solver [default: sgd]
    #[arg(long, value_enum)]
    pub algo: Option<AlgoFlag>,
    /// Sparsity weight (tnn only) [default: 1/sqrt(max(I1,I2)*I3)]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Penalty growth factor (tnn only) [default: 1.1]
    #[arg(long)]
    pub rho: Option<f64>,
    /// Output directory for x.t3b and s.t3b [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trace JSON path [default: <out>/trace.json]
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct PhaseArgs {
    /// Tensor shape as I1xI2xI3
    #[arg(long)]
    pub dims: Option<String>,
    /// Ranks to sweep: "2..20:2" or "2,4,8"
    #[arg(long)]
    pub r_grid: Option<String>,
    /// Corruption fractions to sweep: "0.05..0.45:0.05" or a comma list
    #[arg(long)]
    pub alpha_grid: Option<String>,
    /// Condition number of generated instances [default: 5]
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Instances per cell [default: 10]
    #[arg(long)]
    pub trials: Option<usize>,
    /// RSE at or below this counts as recovered [default: 1e-3]
    #[arg(long)]
    pub success_rse: Option<f64>,
    /// Iteration cap per solve [default: 100]
    #[arg(long)]
    pub iters: Option<usize>,
    /// Step size (sgd) [default: 0.5]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Threshold decay (sgd) [default: 0.8]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Grid seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Solver [default: sgd]
    #[arg(long, value_enum)]
    pub algo: Option<AlgoFlag>,
    /// CSV output path
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct LearnArgs {
    /// Glob patterns for training tensors (.t3b), repeatable
    #[arg(long, value_name = "GLOB")]
    pub train: Vec<String>,
    /// Factor rank
    #[arg(long)]
    pub rank: Option<usize>,
    /// Gradient epochs [default: 100]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Learning rate on the raw parameters [default: 0.1]
    #[arg(long)]
    pub lr: Option<f64>,
    /// Iterations unrolled inside the loss [default: 30]
    #[arg(long)]
    pub k_unroll: Option<usize>,
    /// Learned-parameter JSON path
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DenoiseArgs {
    /// Directory of 8-bit binary PGM frames
    #[arg(long, value_name = "DIR")]
    pub frames: Option<PathBuf>,
    /// Factor rank [default: 3]
    #[arg(long)]
    pub rank: Option<usize>,
    /// Iteration cap [default: 50]
    #[arg(long)]
    pub iters: Option<usize>,
    /// Threshold decay [default: 0.8]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Step size [default: 0.5]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Initial threshold [default: 1]
    #[arg(long)]
    pub zeta0: Option<f64>,
    /// First-iteration threshold [default: 1]
    #[arg(long)]
    pub zeta1: Option<f64>,
    /// Clean reference frames; enables the PSNR report
    #[arg(long, value_name = "DIR")]
    pub clean: Option<PathBuf>,
    /// Output directory for recovered frames
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("trpca: {e:#}");
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.cmd {
        Cmd::Synth(a) => run::synth(&a, &cfg).map(|()| ExitCode::SUCCESS),
        Cmd::Solve(a) => run::solve(&a, &cfg),
        Cmd::Phase(a) => run::phase(&a, &cfg).map(|()| ExitCode::SUCCESS),
        Cmd::Learn(a) => run::learn(&a, &cfg).map(|()| ExitCode::SUCCESS),
        Cmd::Denoise(a) => run::denoise(&a, &cfg).map(|()| ExitCode::SUCCESS),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("trpca: {e:#}");
            ExitCode::from(1)
        }
    }
}
