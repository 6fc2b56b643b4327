//! `SNET` v1 network checkpoints.
//!
//! Layout (little-endian): magic `SNET`, `u16` version, `u32` layer count,
//! then per layer `u32` rows (fan-in), `u32` cols (fan-out), `u8` activation
//! tag (0 identity, 1 sigmoid, 2 leaky ReLU followed by its `f64` slope), the
//! weight matrix as row-major `f64`, then `cols` bias `f64`s.

use std::io::{Read, Write};

use super::{Activation, Dense, DenseNet};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const MAGIC: &[u8; 4] = b"SNET";
pub const VERSION: u16 = 1;

pub fn write_net<W: Write>(net: &DenseNet, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(net.layers.len() as u32).to_le_bytes())?;
    for l in &net.layers {
        w.write_all(&(l.fan_in() as u32).to_le_bytes())?;
        w.write_all(&(l.fan_out() as u32).to_le_bytes())?;
        match l.activation {
            Activation::Identity => w.write_all(&[0])?,
            Activation::Sigmoid => w.write_all(&[1])?,
            Activation::LeakyRelu(a) => {
                w.write_all(&[2])?;
                w.write_all(&a.to_le_bytes())?;
            }
        }
        for v in l.weights.as_slice().iter().chain(&l.bias) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn net_to_bytes(net: &DenseNet) -> Vec<u8> {
    let mut out = Vec::new();
    write_net(net, &mut out).expect("Vec write");
    out
}

fn take<const K: usize, R: Read>(r: &mut R) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated SNET data".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

/// Reads one checkpoint, leaving the reader just past it.
pub fn read_net<R: Read>(mut r: R) -> Result<DenseNet> {
    if &take::<4, _>(&mut r)? != MAGIC {
        return Err(Error::Format("bad magic, expected SNET".into()));
    }
    let version = u16::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported SNET version {version}")));
    }
    let n_layers = u32::from_le_bytes(take(&mut r)?) as usize;
    let mut layers = Vec::with_capacity(n_layers.min(64));
    for _ in 0..n_layers {
        let rows = u32::from_le_bytes(take(&mut r)?) as usize;
        let cols = u32::from_le_bytes(take(&mut r)?) as usize;
        let activation = match take::<1, _>(&mut r)?[0] {
            0 => Activation::Identity,
            1 => Activation::Sigmoid,
            2 => Activation::LeakyRelu(f64::from_le_bytes(take(&mut r)?)),
            t => return Err(Error::Format(format!("unknown activation tag {t}"))),
        };
        let mut read_f64s = |n: usize| -> Result<Vec<f64>> {
            (0..n).map(|_| Ok(f64::from_le_bytes(take(&mut r)?))).collect()
        };
        let weights = Matrix::from_vec(rows, cols, read_f64s(rows * cols)?)?;
        let bias = read_f64s(cols)?;
        layers.push(Dense { weights, bias, activation });
    }
    DenseNet::new(layers).map_err(|e| Error::Format(e.to_string()))
}
