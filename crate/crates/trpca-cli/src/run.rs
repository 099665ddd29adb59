//! Command implementations. Every option resolves as flag, then config file,
//! then built-in default; missing required values error out by name.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use trpca::{
    default_lambda, default_schedule, gen_instance, load_t3b, run_grid, save_t3b, solve_sgd,
    solve_tnn_admm_with_truth, train, write_csv, write_instance, Algo, GroundTruth, LearnConfig,
    PhaseGrid, SgdConfig, SolverParams, SynthSpec, Tensor3f64, XStarStats,
};

use crate::config::FileConfig;
use crate::grid::{parse_dims, parse_f64_grid, parse_usize_grid};
use crate::pgm::{read_pgm, write_pgm, Gray};
use crate::{AlgoFlag, DenoiseArgs, LearnArgs, PhaseArgs, SolveArgs, SynthArgs};

fn path_opt(flag: &Option<PathBuf>, file: &Option<String>) -> Option<PathBuf> {
    flag.clone().or_else(|| file.as_ref().map(PathBuf::from))
}

fn parse_algo(s: &str) -> Result<AlgoFlag> {
    match s.to_ascii_lowercase().as_str() {
        "sgd" => Ok(AlgoFlag::Sgd),
        "tnn" => Ok(AlgoFlag::Tnn),
        _ => bail!("unknown algo {s:?} (expected sgd or tnn)"),
    }
}

fn resolve_algo(flag: Option<AlgoFlag>, file: &Option<String>) -> Result<AlgoFlag> {
    match flag {
        Some(a) => Ok(a),
        None => match file.as_deref() {
            Some(s) => parse_algo(s),
            None => Ok(AlgoFlag::Sgd),
        },
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .with_context(|| format!("creating directory {}", dir.display()))?;
        }
    }
    Ok(())
}

pub fn synth(a: &SynthArgs, cfg: &FileConfig) -> Result<()> {
    let sec = &cfg.synth;
    let dims_s = a
        .dims
        .clone()
        .or_else(|| sec.dims.clone())
        .context("--dims is required")?;
    let spec = SynthSpec {
        dims: parse_dims(&dims_s)?,
        rank: a.rank.or(sec.rank).context("--rank is required")?,
        kappa: a.kappa.or(sec.kappa).unwrap_or(5.0),
        alpha: a.alpha.or(sec.alpha).unwrap_or(0.1),
        seed: a.seed.or(sec.seed).unwrap_or(0),
    };
    let out = path_opt(&a.out, &sec.out).context("--out is required")?;
    let inst = gen_instance::<f64>(&spec)?;
    write_instance(&out, &inst)?;
    let m = &inst.measured;
    println!(
        "synth: {} rank {} -> {} (mu {:.2}, alpha_t {:.3}, kappa {:.2})",
        dims_s,
        spec.rank,
        out.display(),
        m.mu,
        m.alpha_t,
        m.kappa
    );
    Ok(())
}

pub fn solve(a: &SolveArgs, cfg: &FileConfig) -> Result<ExitCode> {
    let sec = &cfg.solve;
    let input = path_opt(&a.input, &sec.input).context("--in is required")?;
    let algo = resolve_algo(a.algo, &sec.algo)?;
    let iters = a.iters.or(sec.iters).unwrap_or(100);
    let out = path_opt(&a.out, &sec.out).unwrap_or_else(|| PathBuf::from("."));
    let report = path_opt(&a.report, &sec.report).unwrap_or_else(|| out.join("trace.json"));

    let y: Tensor3f64 =
        load_t3b(&input).with_context(|| format!("reading {}", input.display()))?;
    let truth = match path_opt(&a.truth, &sec.truth) {
        Some(p) => {
            let x_star: Tensor3f64 =
                load_t3b(&p).with_context(|| format!("reading {}", p.display()))?;
            ensure!(
                x_star.dims() == y.dims(),
                "truth shape {:?} does not match input {:?}",
                x_star.dims(),
                y.dims()
            );
            let s_star = y.sub(&x_star);
            Some(GroundTruth { x_star, s_star })
        }
        None => None,
    };

    let solved = match algo {
        AlgoFlag::Sgd => {
            let rank = a
                .rank
                .or(sec.rank)
                .context("--rank is required for the sgd solver")?;
            let eta = a.eta.or(sec.eta).unwrap_or(0.5);
            let z0 = a.zeta0.or(sec.zeta0);
            let z1 = a.zeta1.or(sec.zeta1);
            let tv = a.tau.or(sec.tau);
            // Unset threshold knobs fall back to the schedule estimated from
            // the observation itself.
            let (zeta0, zeta1, tau) = if let (Some(z0), Some(z1), Some(tv)) = (z0, z1, tv) {
                (z0, z1, tv)
            } else {
                match XStarStats::estimate(&y, rank) {
                    Ok(stats) => {
                        let sched = default_schedule(&stats, eta);
                        (
                            z0.unwrap_or(sched.zeta0),
                            z1.unwrap_or(sched.zeta1),
                            tv.unwrap_or(sched.tau),
                        )
                    }
                    Err(e) => {
                        eprintln!("trpca: solver: {e}");
                        return Ok(ExitCode::from(2));
                    }
                }
            };
            let mut scfg = SgdConfig::new(rank, iters, eta, zeta0, zeta1, tau);
            if let Some(t) = truth {
                scfg = scfg.with_truth(t);
            }
            solve_sgd(&y, &scfg)
        }
        AlgoFlag::Tnn => {
            let lambda = a.lambda.or(sec.lambda).unwrap_or_else(|| default_lambda(y.dims()));
            let rho = a.rho.or(sec.rho).unwrap_or(1.1);
            solve_tnn_admm_with_truth(&y, lambda, rho, iters, truth.as_ref())
        }
    };
    let (x, s, trace) = match solved {
        Ok(v) => v,
        Err(e) => {
            eprintln!("trpca: solver: {e}");
            return Ok(ExitCode::from(2));
        }
    };

    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    save_t3b(out.join("x.t3b"), &x)?;
    save_t3b(out.join("s.t3b"), &s)?;
    ensure_parent(&report)?;
    fs::write(&report, trace.to_json_pretty())
        .with_context(|| format!("writing {}", report.display()))?;
    match trace.result.rse_final {
        Some(r) => println!(
            "solve: {} iterations, rse {:.3e} -> {}",
            trace.result.iters,
            r,
            out.display()
        ),
        None => println!(
            "solve: {} iterations -> {}",
            trace.result.iters,
            out.display()
        ),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn phase(a: &PhaseArgs, cfg: &FileConfig) -> Result<()> {
    let sec = &cfg.phase;
    let dims_s = a
        .dims
        .clone()
        .or_else(|| sec.dims.clone())
        .context("--dims is required")?;
    let r_s = a
        .r_grid
        .clone()
        .or_else(|| sec.r_grid.clone())
        .context("--r-grid is required")?;
    let alpha_s = a
        .alpha_grid
        .clone()
        .or_else(|| sec.alpha_grid.clone())
        .context("--alpha-grid is required")?;
    let out = path_opt(&a.out, &sec.out).context("--out is required")?;

    let mut grid = PhaseGrid::new(
        parse_dims(&dims_s)?,
        parse_usize_grid(&r_s)?,
        parse_f64_grid(&alpha_s)?,
    );
    if let Some(v) = a.kappa.or(sec.kappa) {
        grid.kappa = v;
    }
    if let Some(v) = a.trials.or(sec.trials) {
        grid.trials = v;
    }
    if let Some(v) = a.success_rse.or(sec.success_rse) {
        grid.success_rse = v;
    }
    if let Some(v) = a.iters.or(sec.iters) {
        grid.iters = v;
    }
    if let Some(v) = a.eta.or(sec.eta) {
        grid.eta = v;
    }
    if let Some(v) = a.tau.or(sec.tau) {
        grid.tau = v;
    }
    if let Some(v) = a.seed.or(sec.seed) {
        grid.seed = v;
    }
    grid.algo = match resolve_algo(a.algo, &sec.algo)? {
        AlgoFlag::Sgd => Algo::Sgd,
        AlgoFlag::Tnn => Algo::Tnn,
    };

    let cells = run_grid::<f64>(&grid)?;
    let mut buf = Vec::new();
    write_csv(&cells, &mut buf)?;
    ensure_parent(&out)?;
    fs::write(&out, buf).with_context(|| format!("writing {}", out.display()))?;
    println!("phase: {} cells -> {}", cells.len(), out.display());
    Ok(())
}

pub fn learn(a: &LearnArgs, cfg: &FileConfig) -> Result<()> {
    let sec = &cfg.learn;
    let patterns = if a.train.is_empty() {
        sec.train.clone().unwrap_or_default()
    } else {
        a.train.clone()
    };
    ensure!(!patterns.is_empty(), "--train is required");
    let rank = a.rank.or(sec.rank).context("--rank is required")?;
    let out = path_opt(&a.out, &sec.out).context("--out is required")?;

    let mut paths: Vec<PathBuf> = Vec::new();
    for pat in &patterns {
        for entry in glob::glob(pat).with_context(|| format!("bad glob {pat:?}"))? {
            paths.push(entry?);
        }
    }
    paths.sort();
    paths.dedup();
    ensure!(!paths.is_empty(), "no training tensors matched --train");
    let tensors = paths
        .iter()
        .map(|p| load_t3b::<f64>(p).with_context(|| format!("reading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;

    // Start from the schedule the solver would estimate on the first tensor.
    let stats = XStarStats::estimate(&tensors[0], rank)?;
    let sched = default_schedule(&stats, 0.5);
    let init = SolverParams {
        zeta0: sched.zeta0,
        zeta1: sched.zeta1,
        tau: sched.tau,
        eta: 0.5,
    };
    let mut lc = LearnConfig::from_params(init, rank, tensors);
    lc.epochs = a.epochs.or(sec.epochs).unwrap_or(100);
    lc.learn_rate = a.lr.or(sec.lr).unwrap_or(0.1);
    lc.k_unroll = a.k_unroll.or(sec.k_unroll).unwrap_or(30);

    let outcome = train(&lc)?;
    ensure_parent(&out)?;
    fs::write(&out, outcome.to_json_pretty())
        .with_context(|| format!("writing {}", out.display()))?;
    let first = outcome.loss_history.first().copied().unwrap_or(f64::NAN);
    let last = outcome.loss_history.last().copied().unwrap_or(f64::NAN);
    println!(
        "learn: {} tensors, loss {:.4e} -> {:.4e}, params (zeta0 {:.3e}, zeta1 {:.3e}, tau {:.3}, eta {:.3}) -> {}",
        paths.len(),
        first,
        last,
        outcome.zeta0,
        outcome.zeta1,
        outcome.tau,
        outcome.eta,
        out.display()
    );
    Ok(())
}

fn list_pgm_frames(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut frames = Vec::new();
    let entries =
        fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))?;
    for entry in entries {
        let path = entry?.path();
        let is_pgm = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
        if path.is_file() && is_pgm {
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .with_context(|| format!("non-utf8 file name in {}", dir.display()))?
                .to_string();
            frames.push((name, path));
        }
    }
    frames.sort();
    Ok(frames)
}

pub fn denoise(a: &DenoiseArgs, cfg: &FileConfig) -> Result<()> {
    let sec = &cfg.denoise;
    let frames_dir = path_opt(&a.frames, &sec.frames).context("--frames is required")?;
    let out = path_opt(&a.out, &sec.out).context("--out is required")?;
    let rank = a.rank.or(sec.rank).unwrap_or(3);
    let iters = a.iters.or(sec.iters).unwrap_or(50);
    let tau = a.tau.or(sec.tau).unwrap_or(0.8);
    let eta = a.eta.or(sec.eta).unwrap_or(0.5);
    let zeta0 = a.zeta0.or(sec.zeta0).unwrap_or(1.0);
    let zeta1 = a.zeta1.or(sec.zeta1).unwrap_or(1.0);

    let frames = list_pgm_frames(&frames_dir)?;
    ensure!(
        !frames.is_empty(),
        "no .pgm frames in {}",
        frames_dir.display()
    );
    let grays = frames
        .iter()
        .map(|(_, p)| read_pgm(p))
        .collect::<Result<Vec<_>>>()?;
    let (h, w) = (grays[0].height, grays[0].width);
    for ((name, _), g) in frames.iter().zip(&grays) {
        ensure!(
            g.width == w && g.height == h,
            "frame {name} is {}x{}, expected {}x{}",
            g.width,
            g.height,
            w,
            h
        );
    }

    let n = grays.len();
    let mut y = Tensor3f64::zeros((h, w, n));
    for (k, g) in grays.iter().enumerate() {
        for r in 0..h {
            for c in 0..w {
                y[(r, c, k)] = g.pixels[r * w + c] as f64 / 255.0;
            }
        }
    }

    let scfg = SgdConfig::new(rank, iters, eta, zeta0, zeta1, tau);
    let (x, _s, trace) = match solve_sgd(&y, &scfg) {
        Ok(v) => v,
        Err(e) => bail!("solver: {e}"),
    };

    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    for (k, (name, _)) in frames.iter().enumerate() {
        let mut pixels = vec![0u8; w * h];
        for r in 0..h {
            for c in 0..w {
                pixels[r * w + c] = (x[(r, c, k)].clamp(0.0, 1.0) * 255.0).round() as u8;
            }
        }
        let g = Gray {
            width: w,
            height: h,
            pixels,
        };
        write_pgm(out.join(name), &g)?;
    }

    let clean_dir = path_opt(&a.clean, &sec.clean);
    if let Some(clean_dir) = &clean_dir {
        let mut per_frame = Vec::new();
        let mut clean = Tensor3f64::zeros((h, w, n));
        for (k, (name, _)) in frames.iter().enumerate() {
            let g = read_pgm(clean_dir.join(name))
                .with_context(|| format!("clean frame for {name}"))?;
            ensure!(
                g.width == w && g.height == h,
                "clean frame {name} is {}x{}, expected {}x{}",
                g.width,
                g.height,
                w,
                h
            );
            let mut mse = 0.0;
            for r in 0..h {
                for c in 0..w {
                    let cv = g.pixels[r * w + c] as f64 / 255.0;
                    clean[(r, c, k)] = cv;
                    let d = x[(r, c, k)] - cv;
                    mse += d * d;
                }
            }
            mse /= (w * h) as f64;
            let psnr = if mse == 0.0 {
                999.0
            } else {
                (10.0 * (1.0 / mse).log10()).min(999.0)
            };
            per_frame.push(serde_json::json!({ "frame": name, "psnr_db": psnr }));
        }
        let overall = trpca::psnr(&x, &clean, 1.0);
        let report = serde_json::json!({
            "frames": per_frame,
            "overall_psnr_db": overall,
        });
        let report_path = out.join("psnr.json");
        fs::write(&report_path, serde_json::to_string_pretty(&report)?)
            .with_context(|| format!("writing {}", report_path.display()))?;
        println!(
            "denoise: {n} frames ({w}x{h}), {} iterations, psnr {overall:.2} dB -> {}",
            trace.result.iters,
            out.display()
        );
    } else {
        println!(
            "denoise: {n} frames ({w}x{h}), {} iterations -> {}",
            trace.result.iters,
            out.display()
        );
    }
    Ok(())
}
