//! Grid and shape parsers shared by the subcommands.
//!
//! Grids come either as a comma list ("2,4,8") or an inclusive stepped range
//! ("2..20:2"). Range floats are rounded to 1e-10 so the emitted CSV carries
//! the intended values rather than accumulation junk.

use anyhow::{bail, Context, Result};

pub fn parse_dims(s: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = s.split('x').collect();
    if parts.len() != 3 {
        bail!("dims must look like I1xI2xI3, got {s:?}");
    }
    let mut v = [0usize; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .with_context(|| format!("bad dimension {part:?} in {s:?}"))?;
    }
    if v.contains(&0) {
        bail!("dims must be positive, got {s:?}");
    }
    Ok((v[0], v[1], v[2]))
}

fn split_range(s: &str) -> Option<(&str, &str, &str)> {
    let (start, rest) = s.split_once("..")?;
    let (end, step) = rest.split_once(':')?;
    Some((start, end, step))
}

pub fn parse_usize_grid(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b, h)) = split_range(s) {
        let start: usize = a.trim().parse().with_context(|| format!("bad start in {s:?}"))?;
        let end: usize = b.trim().parse().with_context(|| format!("bad end in {s:?}"))?;
        let step: usize = h.trim().parse().with_context(|| format!("bad step in {s:?}"))?;
        if step == 0 {
            bail!("step must be positive in {s:?}");
        }
        if end < start {
            bail!("empty range {s:?}");
        }
        return Ok((start..=end).step_by(step).collect());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .with_context(|| format!("bad value {p:?} in {s:?}"))
        })
        .collect()
}

fn round10(x: f64) -> f64 {
    (x * 1e10).round() / 1e10
}

pub fn parse_f64_grid(s: &str) -> Result<Vec<f64>> {
    if let Some((a, b, h)) = split_range(s) {
        let start: f64 = a.trim().parse().with_context(|| format!("bad start in {s:?}"))?;
        let end: f64 = b.trim().parse().with_context(|| format!("bad end in {s:?}"))?;
        let step: f64 = h.trim().parse().with_context(|| format!("bad step in {s:?}"))?;
        if !(step > 0.0) {
            bail!("step must be positive in {s:?}");
        }
        if end < start {
            bail!("empty range {s:?}");
        }
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let x = round10(start + k as f64 * step);
            if x > end + 1e-12 {
                break;
            }
            out.push(x);
            k += 1;
        }
        return Ok(out);
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .with_context(|| format!("bad value {p:?} in {s:?}"))
        })
        .collect()
}
