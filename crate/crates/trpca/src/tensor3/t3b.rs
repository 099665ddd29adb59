//! T3B: a minimal binary container for one dense order-3 tensor.
//!
//! Layout: magic `54 33 42 01`, three LE u64 dims (I1, I2, I3), then
//! I1·I2·I3 LE f64 values in canonical (i1-fastest) order.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor3::Tensor3;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const T3B_MAGIC: [u8; 4] = [0x54, 0x33, 0x42, 0x01];

pub fn write_t3b<T: Scalar, W: Write>(mut w: W, t: &Tensor3<T>) -> Result<()> {
    w.write_all(&T3B_MAGIC)?;
    let (i1, i2, i3) = t.dims();
    for d in [i1, i2, i3] {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for &v in t.data() {
        w.write_all(&v.as_f64().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_t3b<T: Scalar, R: Read>(mut r: R) -> Result<Tensor3<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| Error::T3bBadMagic)?;
    if magic != T3B_MAGIC {
        return Err(Error::T3bBadMagic);
    }
    let mut dims = [0usize; 3];
    for d in dims.iter_mut() {
        let mut b = [0u8; 8];
        r.read_exact(&mut b).map_err(|_| Error::T3bTruncated { wanted: 8 })?;
        *d = usize::try_from(u64::from_le_bytes(b)).map_err(|_| Error::T3bOverflow)?;
    }
    if dims.contains(&0) {
        return Err(Error::T3bZeroDim);
    }
    let numel = dims[0]
        .checked_mul(dims[1])
        .and_then(|p| p.checked_mul(dims[2]))
        .ok_or(Error::T3bOverflow)?;
    let wanted = numel.checked_mul(8).ok_or(Error::T3bOverflow)?;

    // Bounded read_to_end so a lying header cannot force a huge upfront
    // allocation before the truncation is noticed.
    let mut payload = Vec::new();
    r.take(wanted as u64)
        .read_to_end(&mut payload)
        .map_err(Error::Io)?;
    if payload.len() < wanted {
        return Err(Error::T3bTruncated { wanted });
    }

    let mut data = Vec::with_capacity(numel);
    for (i, chunk) in payload.chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::T3bNonFinite { index: i });
        }
        data.push(T::of(v));
    }
    Tensor3::new((dims[0], dims[1], dims[2]), data)
}

pub fn save_t3b<T: Scalar>(path: impl AsRef<Path>, t: &Tensor3<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_t3b(&mut w, t)?;
    w.flush()?;
    Ok(())
}

pub fn load_t3b<T: Scalar>(path: impl AsRef<Path>) -> Result<Tensor3<T>> {
    read_t3b(BufReader::new(File::open(path)?))
}
