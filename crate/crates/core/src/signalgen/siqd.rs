//! `SIQD` v1 dataset files.
//!
//! Layout (little-endian): magic `SIQD`, `u16` version, `u32` frame count,
//! `u32` complex samples per frame `N`, `u32` feature length `2N`, `f64`
//! SNR in dB, `f64` channel variance, `u32` tap count, `u64` seed, then per
//! frame a `u8` label followed by `2N` `f32` interleaved I/Q values.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{ChannelEnv, IqFrame, LabeledDataset, OfdmConfig};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SIQD";
pub const VERSION: u16 = 1;

pub fn write_siqd<W: Write>(ds: &LabeledDataset, mut w: W) -> Result<()> {
    let n = ds.frame_len();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(ds.len() as u32).to_le_bytes())?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&(2 * n as u32).to_le_bytes())?;
    w.write_all(&ds.env.snr_db.to_le_bytes())?;
    w.write_all(&ds.env.variance.to_le_bytes())?;
    w.write_all(&(ds.env.n_taps as u32).to_le_bytes())?;
    w.write_all(&ds.seed.to_le_bytes())?;
    for (frame, &label) in ds.frames.iter().zip(&ds.labels) {
        w.write_all(&[label])?;
        for s in &frame.samples {
            w.write_all(&(s.re as f32).to_le_bytes())?;
            w.write_all(&(s.im as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn to_bytes(ds: &LabeledDataset) -> Vec<u8> {
    let mut out = Vec::with_capacity(40 + ds.len() * (1 + 8 * ds.frame_len()));
    write_siqd(ds, &mut out).expect("writing to a Vec cannot fail");
    out
}

fn take<const K: usize, R: Read>(r: &mut R) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated SIQD data".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

/// Reads a dataset. The OFDM layout is not stored in the file, so
/// [`LabeledDataset::ofdm`] is `None` on the result.
pub fn read_siqd<R: Read>(mut r: R) -> Result<LabeledDataset> {
    let magic = take::<4, _>(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}, expected SIQD")));
    }
    let version = u16::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported SIQD version {version}")));
    }
    let count = u32::from_le_bytes(take(&mut r)?) as usize;
    let n = u32::from_le_bytes(take(&mut r)?) as usize;
    let feat = u32::from_le_bytes(take(&mut r)?) as usize;
    if feat != 2 * n {
        return Err(Error::Format(format!("feature length {feat} is not 2 x {n}")));
    }
    let snr_db = f64::from_le_bytes(take(&mut r)?);
    let variance = f64::from_le_bytes(take(&mut r)?);
    let n_taps = u32::from_le_bytes(take(&mut r)?) as usize;
    let seed = u64::from_le_bytes(take(&mut r)?);

    let mut frames = Vec::with_capacity(count.min(1 << 20));
    let mut labels = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let [label] = take::<1, _>(&mut r)?;
        if label > 1 {
            return Err(Error::Format(format!("label byte {label} is not 0 or 1")));
        }
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            let re = f32::from_le_bytes(take(&mut r)?) as f64;
            let im = f32::from_le_bytes(take(&mut r)?) as f64;
            samples.push(Complex64::new(re, im));
        }
        frames.push(IqFrame::new(samples));
        labels.push(label);
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after last frame".into()));
    }
    let env = ChannelEnv { n_taps, variance, snr_db, ..ChannelEnv::default() };
    let ofdm: Option<OfdmConfig> = None;
    LabeledDataset::new(frames, labels, env, ofdm, seed)
        .map_err(|e| Error::Format(e.to_string()))
}

pub fn read_siqd_file(path: &Path) -> Result<LabeledDataset> {
    let bytes = std::fs::read(path)?;
    read_siqd(bytes.as_slice())
}

pub fn write_siqd_file(ds: &LabeledDataset, path: &Path) -> Result<()> {
    crate::io::write_atomic(path, &to_bytes(ds))
}
