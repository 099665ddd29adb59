//! Minimal binary PGM (P5, 8-bit) reader and writer.

use anyhow::{bail, Context, Result};
use std::path::Path;

pub struct Gray {
    pub width: usize,
    pub height: usize,
    /// Row-major, one byte per pixel.
    pub pixels: Vec<u8>,
}

/// Header integers are whitespace-separated; `#` starts a comment running to
/// end of line. Exactly one whitespace byte separates the maxval from the
/// raster.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<Gray> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        bail!("{}: not a binary PGM (P5)", path.display());
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        if pos == start {
            bail!("{}: malformed header", path.display());
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .with_context(|| format!("{}: header field", path.display()))?;
    }
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        bail!("{}: only 8-bit PGM supported, maxval {maxval}", path.display());
    }
    if !bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
        bail!("{}: missing raster separator", path.display());
    }
    pos += 1;
    let need = width * height;
    let raster = &bytes[pos..];
    if raster.len() < need {
        bail!(
            "{}: raster truncated, need {need} bytes, found {}",
            path.display(),
            raster.len()
        );
    }
    Ok(Gray {
        width,
        height,
        pixels: raster[..need].to_vec(),
    })
}

pub fn write_pgm(path: impl AsRef<Path>, g: &Gray) -> Result<()> {
    let path = path.as_ref();
    if g.pixels.len() != g.width * g.height {
        bail!("pixel buffer does not match {}x{}", g.width, g.height);
    }
    let mut out = format!("P5\n{} {}\n255\n", g.width, g.height).into_bytes();
    out.extend_from_slice(&g.pixels);
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}
