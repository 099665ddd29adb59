//! Phase-transition grids: success maps over (rank, corruption) pairs.
//!
//! Every cell draws `trials` fresh instances, solves each one, and keeps the
//! median recovery error together with the fraction of trials at or below the
//! success cutoff. (cell, trial) pairs are independent work items fed to a
//! small thread pool; each solve itself stays single-threaded.

use std::io::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::error::{Error, Result};
use crate::rtpca::{
    default_lambda, default_schedule, solve_sgd, solve_tnn_admm, SgdConfig, XStarStats,
};
use crate::scalar::Scalar;
use crate::synth::{gen_instance, rse, SynthSpec};

/// Which solver fills the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    /// Scaled gradient descent with the guaranteed schedule.
    Sgd,
    /// Nuclear-norm ADMM baseline.
    Tnn,
}

#[derive(Clone, Debug)]
pub struct PhaseGrid {
    pub dims: (usize, usize, usize),
    pub r_values: Vec<usize>,
    pub alpha_values: Vec<f64>,
    pub kappa: f64,
    /// Instances per cell.
    pub trials: usize,
    /// A trial counts as recovered when its RSE is at or below this.
    pub success_rse: f64,
    pub iters: usize,
    /// Step size for [`Algo::Sgd`]; ignored by the baseline.
    pub eta: f64,
    /// Threshold decay for [`Algo::Sgd`]; ignored by the baseline.
    pub tau: f64,
    pub seed: u64,
    pub algo: Algo,
}

impl PhaseGrid {
    pub fn new(
        dims: (usize, usize, usize),
        r_values: Vec<usize>,
        alpha_values: Vec<f64>,
    ) -> Self {
        Self {
            dims,
            r_values,
            alpha_values,
            kappa: 5.0,
            trials: 10,
            success_rse: 1e-3,
            iters: 100,
            eta: 0.5,
            tau: 0.8,
            seed: 0,
            algo: Algo::Sgd,
        }
    }
}

/// One grid cell, in row-major (rank, then alpha) order.
#[derive(Clone, Copy, Debug)]
pub struct PhaseCell {
    pub rank: usize,
    pub alpha: f64,
    pub median_rse: f64,
    pub success_fraction: f64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Trial seed for grid position (ri, ai, trial). Depends on the grid seed and
/// the indices only, so both solvers see identical instances.
pub fn cell_seed(seed: u64, ri: usize, ai: usize, trial: usize) -> u64 {
    let mut z = splitmix(seed);
    z = splitmix(z ^ ri as u64);
    z = splitmix(z ^ ai as u64);
    splitmix(z ^ trial as u64)
}

/// Generates and solves one instance; any solver failure or non-finite error
/// counts as an unrecovered trial.
fn trial_rse<T: Scalar>(grid: &PhaseGrid, rank: usize, alpha: f64, seed: u64) -> f64 {
    let run = || -> Result<f64> {
        let spec = SynthSpec {
            dims: grid.dims,
            rank,
            kappa: grid.kappa,
            alpha,
            seed,
        };
        let inst = gen_instance::<T>(&spec)?;
        let x = match grid.algo {
            Algo::Sgd => {
                let stats = XStarStats::measure(&inst.x_star, rank)?;
                let sched = default_schedule(&stats, grid.eta);
                let cfg = SgdConfig::new(
                    rank,
                    grid.iters,
                    grid.eta,
                    sched.zeta0,
                    sched.zeta1,
                    grid.tau,
                );
                solve_sgd(&inst.y, &cfg)?.0
            }
            Algo::Tnn => {
                let lambda = default_lambda(grid.dims);
                solve_tnn_admm(&inst.y, lambda, 1.1, grid.iters)?.0
            }
        };
        Ok(rse(&x, &inst.x_star).as_f64())
    };
    match run() {
        Ok(v) if v.is_finite() => v,
        _ => f64::INFINITY,
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Runs the whole grid. Cells come back in row-major order (rank outer,
/// alpha inner). An empty rank or alpha list yields an empty result.
pub fn run_grid<T: Scalar>(grid: &PhaseGrid) -> Result<Vec<PhaseCell>> {
    if grid.trials == 0 {
        return Err(Error::BadConfig("trials must be positive".into()));
    }
    if grid.iters == 0 {
        return Err(Error::BadConfig("iters must be positive".into()));
    }
    let n_cells = grid.r_values.len() * grid.alpha_values.len();
    if n_cells == 0 {
        return Ok(Vec::new());
    }

    let mut items = Vec::with_capacity(n_cells * grid.trials);
    for ri in 0..grid.r_values.len() {
        for ai in 0..grid.alpha_values.len() {
            for t in 0..grid.trials {
                items.push((ri, ai, t));
            }
        }
    }

    let slots = Mutex::new(vec![f64::INFINITY; items.len()]);
    let next = AtomicUsize::new(0);
    let workers = thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(items.len());
    thread::scope(|sc| {
        for _ in 0..workers {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let (ri, ai, t) = items[i];
                let err = trial_rse::<T>(
                    grid,
                    grid.r_values[ri],
                    grid.alpha_values[ai],
                    cell_seed(grid.seed, ri, ai, t),
                );
                slots.lock().unwrap()[i] = err;
            });
        }
    });
    let all = slots.into_inner().unwrap();

    let mut cells = Vec::with_capacity(n_cells);
    for (ci, chunk) in all.chunks(grid.trials).enumerate() {
        let mut errs = chunk.to_vec();
        errs.sort_by(f64::total_cmp);
        let hits = errs.iter().filter(|&&e| e <= grid.success_rse).count();
        let ri = ci / grid.alpha_values.len();
        let ai = ci % grid.alpha_values.len();
        cells.push(PhaseCell {
            rank: grid.r_values[ri],
            alpha: grid.alpha_values[ai],
            median_rse: median(&errs),
            success_fraction: hits as f64 / grid.trials as f64,
        });
    }
    Ok(cells)
}

/// Writes the grid as CSV. The header line is emitted even for zero cells.
pub fn write_csv<W: Write>(cells: &[PhaseCell], w: &mut W) -> io::Result<()> {
    writeln!(w, "R,alpha,median_rse,success_fraction")?;
    for c in cells {
        writeln!(
            w,
            "{},{},{:.6e},{}",
            c.rank, c.alpha, c.median_rse, c.success_fraction
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_seed_is_stable_and_spread() {
        assert_eq!(cell_seed(7, 1, 2, 3), cell_seed(7, 1, 2, 3));
        let base = cell_seed(7, 1, 2, 3);
        for (ri, ai, t) in [(0, 2, 3), (1, 0, 3), (1, 2, 0), (2, 1, 3)] {
            assert_ne!(cell_seed(7, ri, ai, t), base);
        }
        assert_ne!(cell_seed(8, 1, 2, 3), base);
    }

    #[test]
    fn empty_grid_yields_header_only_csv() {
        let grid = PhaseGrid::new((16, 16, 4), vec![], vec![0.1]);
        let cells = run_grid::<f64>(&grid).unwrap();
        assert!(cells.is_empty());
        let mut buf = Vec::new();
        write_csv(&cells, &mut buf).unwrap();
        assert_eq!(buf, b"R,alpha,median_rse,success_fraction\n");
    }

    #[test]
    fn zero_trials_is_rejected() {
        let mut grid = PhaseGrid::new((16, 16, 4), vec![2], vec![0.1]);
        grid.trials = 0;
        assert!(matches!(
            run_grid::<f64>(&grid),
            Err(Error::BadConfig(_))
        ));
    }

    #[test]
    fn csv_rows_match_layout() {
        let cells = [PhaseCell {
            rank: 4,
            alpha: 0.25,
            median_rse: 5e-7,
            success_fraction: 0.8,
        }];
        let mut buf = Vec::new();
        write_csv(&cells, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "R,alpha,median_rse,success_fraction\n4,0.25,5.000000e-7,0.8\n"
        );
    }

    #[test]
    fn easy_cell_recovers_every_trial() {
        let mut grid = PhaseGrid::new((16, 16, 4), vec![2], vec![0.05]);
        grid.trials = 2;
        grid.kappa = 3.0;
        grid.seed = 5;
        let cells = run_grid::<f64>(&grid).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].rank, 2);
        assert_eq!(cells[0].success_fraction, 1.0);
        assert!(cells[0].median_rse < 1e-3, "median {:e}", cells[0].median_rse);
    }

    #[test]
    fn grid_runs_are_deterministic() {
        let mut grid = PhaseGrid::new((12, 12, 4), vec![1, 2], vec![0.05]);
        grid.trials = 2;
        grid.iters = 40;
        grid.seed = 9;
        let a = run_grid::<f64>(&grid).unwrap();
        let b = run_grid::<f64>(&grid).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.median_rse.to_bits(), y.median_rse.to_bits());
            assert_eq!(x.success_fraction, y.success_fraction);
        }
    }

    #[test]
    fn infeasible_rank_counts_as_failure() {
        let mut grid = PhaseGrid::new((16, 16, 4), vec![40], vec![0.1]);
        grid.trials = 2;
        let cells = run_grid::<f64>(&grid).unwrap();
        assert_eq!(cells[0].success_fraction, 0.0);
        assert!(cells[0].median_rse.is_infinite());
    }

    #[test]
    fn baseline_fills_the_same_grid() {
        let mut grid = PhaseGrid::new((16, 16, 4), vec![2], vec![0.05]);
        grid.trials = 1;
        grid.iters = 300;
        grid.kappa = 3.0;
        grid.seed = 5;
        grid.algo = Algo::Tnn;
        let cells = run_grid::<f64>(&grid).unwrap();
        assert_eq!(cells.len(), 1);
        assert!(cells[0].median_rse.is_finite());
        assert!(cells[0].median_rse < 0.5, "median {:e}", cells[0].median_rse);
    }
}
