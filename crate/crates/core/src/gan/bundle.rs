//! Bundle files: magic `SGAN`, `u16` version, `u8` kind (1 CGAN, 2 BiGAN,
//! 3 adaptation CGAN), a `u32`-length-prefixed TOML descriptor with the
//! dimensions and training hyperparameters, the scaler (`u32` width, then
//! means and scales as `f64`), and finally the networks as consecutive
//! `SNET` checkpoints (generator, [encoder,] discriminator).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{AdaptationBundle, BiganBundle, CganBundle, FeatureScaler};
use crate::error::{Error, Result};
use crate::nncore::checkpoint::{read_net, write_net};
use crate::nncore::TrainHyper;

pub const MAGIC: &[u8; 4] = b"SGAN";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum GanBundle {
    Cgan(CganBundle),
    Bigan(BiganBundle),
    Adaptation(AdaptationBundle),
}

#[derive(Debug, Serialize, Deserialize)]
struct Descriptor {
    kind: String,
    feature_dim: usize,
    latent_dim: usize,
    label_dim: usize,
    hyper: TrainHyper,
}

impl GanBundle {
    fn kind_tag(&self) -> u8 {
        match self {
            GanBundle::Cgan(_) => 1,
            GanBundle::Bigan(_) => 2,
            GanBundle::Adaptation(_) => 3,
        }
    }

    fn descriptor(&self) -> Descriptor {
        let (kind, feature_dim, latent_dim, label_dim, hyper) = match self {
            GanBundle::Cgan(b) => ("cgan", b.feature_dim, b.hyper.noise_dim, super::LABEL_DIM, &b.hyper),
            GanBundle::Bigan(b) => ("bigan", b.feature_dim, b.hyper.noise_dim, 0, &b.hyper),
            GanBundle::Adaptation(b) => ("adaptation", b.feature_dim, b.latent_dim, super::LABEL_DIM, &b.hyper),
        };
        Descriptor { kind: kind.into(), feature_dim, latent_dim, label_dim, hyper: hyper.clone() }
    }

    fn scaler(&self) -> &FeatureScaler {
        match self {
            GanBundle::Cgan(b) => &b.scaler,
            GanBundle::Bigan(b) => &b.scaler,
            GanBundle::Adaptation(b) => &b.scaler,
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&[self.kind_tag()])?;
        let desc = toml::to_string(&self.descriptor())
            .map_err(|e| Error::Format(format!("descriptor: {e}")))?;
        w.write_all(&(desc.len() as u32).to_le_bytes())?;
        w.write_all(desc.as_bytes())?;
        let s = self.scaler();
        w.write_all(&(s.dim() as u32).to_le_bytes())?;
        for v in s.mean.iter().chain(&s.scale) {
            w.write_all(&v.to_le_bytes())?;
        }
        match self {
            GanBundle::Cgan(b) => {
                write_net(&b.generator, &mut w)?;
                write_net(&b.discriminator, &mut w)?;
            }
            GanBundle::Bigan(b) => {
                write_net(&b.generator, &mut w)?;
                write_net(&b.encoder, &mut w)?;
                write_net(&b.discriminator, &mut w)?;
            }
            GanBundle::Adaptation(b) => {
                write_net(&b.generator, &mut w)?;
                write_net(&b.discriminator, &mut w)?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write(&mut out).expect("Vec write");
        out
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 7];
        r.read_exact(&mut head).map_err(|_| Error::Format("truncated SGAN header".into()))?;
        if &head[..4] != MAGIC {
            return Err(Error::Format("bad magic, expected SGAN".into()));
        }
        let version = u16::from_le_bytes([head[4], head[5]]);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported SGAN version {version}")));
        }
        let kind = head[6];
        let mut word = [0u8; 4];
        r.read_exact(&mut word).map_err(|_| Error::Format("truncated SGAN descriptor".into()))?;
        let mut desc = vec![0u8; u32::from_le_bytes(word) as usize];
        r.read_exact(&mut desc).map_err(|_| Error::Format("truncated SGAN descriptor".into()))?;
        let desc: Descriptor = toml::from_str(
            std::str::from_utf8(&desc).map_err(|_| Error::Format("descriptor is not UTF-8".into()))?,
        )
        .map_err(|e| Error::Format(format!("descriptor: {e}")))?;

        r.read_exact(&mut word).map_err(|_| Error::Format("truncated scaler".into()))?;
        let dim = u32::from_le_bytes(word) as usize;
        let mut vals = Vec::with_capacity(2 * dim);
        let mut eight = [0u8; 8];
        for _ in 0..2 * dim {
            r.read_exact(&mut eight).map_err(|_| Error::Format("truncated scaler".into()))?;
            vals.push(f64::from_le_bytes(eight));
        }
        let scale = vals.split_off(dim);
        let scaler = FeatureScaler { mean: vals, scale };

        let bundle = match kind {
            1 => GanBundle::Cgan(CganBundle {
                generator: read_net(&mut r)?,
                discriminator: read_net(&mut r)?,
                hyper: desc.hyper,
                feature_dim: desc.feature_dim,
                scaler,
            }),
            2 => GanBundle::Bigan(BiganBundle {
                generator: read_net(&mut r)?,
                encoder: read_net(&mut r)?,
                discriminator: read_net(&mut r)?,
                hyper: desc.hyper,
                feature_dim: desc.feature_dim,
                scaler,
            }),
            3 => GanBundle::Adaptation(AdaptationBundle {
                generator: read_net(&mut r)?,
                discriminator: read_net(&mut r)?,
                hyper: desc.hyper,
                latent_dim: desc.latent_dim,
                feature_dim: desc.feature_dim,
                scaler,
            }),
            k => return Err(Error::Format(format!("unknown bundle kind {k}"))),
        };
        Ok(bundle)
    }
}
