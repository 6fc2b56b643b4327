//! `SCLF` v1 classifier records.
//!
//! Layout (little-endian): magic `SCLF`, `u16` version, `u8` kind
//! (1 forest, 2 SVM), then the body.
//!
//! Forest body: `u64` seed, `u32` feature count, `u32` tree count, `u32`
//! max depth (`u32::MAX` for unlimited), `u32` features per split (0 for
//! the default), `u32` min samples per split, `u8` bootstrap flag; per tree a
//! `u32` node count and nodes in order, each either `0, u32 count0, u32
//! count1` (leaf) or `1, u32 feature, f64 threshold, u32 left, u32 right`.
//!
//! SVM body: `f64` C, `f64` gamma, `f64` bias, `u32` feature count, that many
//! standardization means then scales, `u32` support-vector count, the
//! support vectors row-major, then one dual coefficient per vector.

use std::io::{Read, Write};
use std::path::Path;

use super::{Classifier, ForestParams, Node, RandomForestModel, SvmRbfModel, Tree};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scaler::FeatureScaler;

pub const MAGIC: &[u8; 4] = b"SCLF";
pub const VERSION: u16 = 1;

const KIND_FOREST: u8 = 1;
const KIND_SVM: u8 = 2;

struct Out<W>(W);

impl<W: Write> Out<W> {
    fn u8(&mut self, v: u8) -> Result<()> {
        Ok(self.0.write_all(&[v])?)
    }
    fn u32(&mut self, v: usize) -> Result<()> {
        let v = u32::try_from(v).map_err(|_| Error::Format(format!("{v} does not fit in u32")))?;
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn f64s(&mut self, v: &[f64]) -> Result<()> {
        for x in v {
            self.0.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }
}

struct In<R>(R);

impl<R: Read> In<R> {
    fn take<const K: usize>(&mut self) -> Result<[u8; K]> {
        let mut buf = [0u8; K];
        self.0.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::Format("truncated SCLF data".into()),
            _ => Error::Io(e),
        })?;
        Ok(buf)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take()?) as usize)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

pub fn write_classifier<W: Write>(model: &Classifier, w: W) -> Result<()> {
    let mut o = Out(w);
    o.0.write_all(MAGIC)?;
    o.0.write_all(&VERSION.to_le_bytes())?;
    match model {
        Classifier::Forest(f) => {
            o.u8(KIND_FOREST)?;
            o.u64(f.seed)?;
            o.u32(f.n_features)?;
            o.u32(f.trees.len())?;
            o.u32(f.params.max_depth.unwrap_or(u32::MAX as usize).min(u32::MAX as usize))?;
            o.u32(f.params.features_per_split.unwrap_or(0))?;
            o.u32(f.params.min_samples_split)?;
            o.u8(u8::from(f.params.bootstrap))?;
            for t in &f.trees {
                o.u32(t.nodes.len())?;
                for n in &t.nodes {
                    match n {
                        Node::Leaf { counts } => {
                            o.u8(0)?;
                            o.u32(counts[0] as usize)?;
                            o.u32(counts[1] as usize)?;
                        }
                        Node::Split { feature, threshold, left, right } => {
                            o.u8(1)?;
                            o.u32(*feature)?;
                            o.f64s(&[*threshold])?;
                            o.u32(*left)?;
                            o.u32(*right)?;
                        }
                    }
                }
            }
        }
        Classifier::Svm(s) => {
            o.u8(KIND_SVM)?;
            o.f64s(&[s.c, s.gamma, s.bias])?;
            o.u32(s.scaler.dim())?;
            o.f64s(&s.scaler.mean)?;
            o.f64s(&s.scaler.scale)?;
            o.u32(s.support_vectors.rows())?;
            o.f64s(s.support_vectors.as_slice())?;
            o.f64s(&s.dual_coef)?;
        }
    }
    Ok(())
}

pub fn classifier_to_bytes(model: &Classifier) -> Vec<u8> {
    let mut out = Vec::new();
    write_classifier(model, &mut out).expect("Vec write");
    out
}

pub fn read_classifier<R: Read>(r: R) -> Result<Classifier> {
    let mut i = In(r);
    if &i.take::<4>()? != MAGIC {
        return Err(Error::Format("bad magic, expected SCLF".into()));
    }
    let version = u16::from_le_bytes(i.take()?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported SCLF version {version}")));
    }
    match i.u8()? {
        KIND_FOREST => read_forest(&mut i).map(Classifier::Forest),
        KIND_SVM => read_svm(&mut i).map(Classifier::Svm),
        k => Err(Error::Format(format!("unknown classifier kind {k}"))),
    }
}

fn read_forest<R: Read>(i: &mut In<R>) -> Result<RandomForestModel> {
    let seed = i.u64()?;
    let n_features = i.u32()?;
    let n_trees = i.u32()?;
    let max_depth = match i.u32()? {
        d if d == u32::MAX as usize => None,
        d => Some(d),
    };
    let features_per_split = match i.u32()? {
        0 => None,
        m => Some(m),
    };
    let min_samples_split = i.u32()?;
    let bootstrap = i.u8()? != 0;
    let mut trees = Vec::with_capacity(n_trees.min(4096));
    for _ in 0..n_trees {
        let n_nodes = i.u32()?;
        if n_nodes == 0 {
            return Err(Error::Format("empty tree".into()));
        }
        let mut nodes = Vec::with_capacity(n_nodes.min(1 << 16));
        for k in 0..n_nodes {
            nodes.push(match i.u8()? {
                0 => Node::Leaf { counts: [i.u32()? as u32, i.u32()? as u32] },
                1 => {
                    let feature = i.u32()?;
                    let threshold = i.f64()?;
                    let (left, right) = (i.u32()?, i.u32()?);
                    // children always follow their parent, which rules out cycles
                    if feature >= n_features || left <= k || right <= k || left >= n_nodes || right >= n_nodes {
                        return Err(Error::Format(format!("malformed split node {k}")));
                    }
                    Node::Split { feature, threshold, left, right }
                }
                t => return Err(Error::Format(format!("unknown node tag {t}"))),
            });
        }
        trees.push(Tree { nodes });
    }
    let params = ForestParams { n_trees, max_depth, features_per_split, min_samples_split, bootstrap };
    Ok(RandomForestModel { trees, params, n_features, seed })
}

fn read_svm<R: Read>(i: &mut In<R>) -> Result<SvmRbfModel> {
    let c = i.f64()?;
    let gamma = i.f64()?;
    let bias = i.f64()?;
    let dim = i.u32()?;
    let mean = i.f64s(dim)?;
    let scale = i.f64s(dim)?;
    let n_sv = i.u32()?;
    let support_vectors = Matrix::from_vec(n_sv, dim, i.f64s(n_sv * dim)?)?;
    let dual_coef = i.f64s(n_sv)?;
    Ok(SvmRbfModel { support_vectors, dual_coef, bias, gamma, c, scaler: FeatureScaler { mean, scale } })
}

pub fn write_classifier_file(model: &Classifier, path: &Path) -> Result<()> {
    crate::io::write_atomic(path, &classifier_to_bytes(model))
}

pub fn read_classifier_file(path: &Path) -> Result<Classifier> {
    let bytes = std::fs::read(path)?;
    let mut slice = bytes.as_slice();
    let model = read_classifier(&mut slice)?;
    if !slice.is_empty() {
        return Err(Error::Format("trailing bytes after SCLF record".into()));
    }
    Ok(model)
}
