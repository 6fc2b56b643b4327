use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_training_set;
use crate::error::{shape, Result};
use crate::matrix::Matrix;
use crate::rng::{rng_for, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    /// Candidate features per split; `None` means `round(sqrt(d))`.
    pub features_per_split: Option<usize>,
    pub min_samples_split: usize,
    /// Train each tree on a bootstrap resample (otherwise on the full set).
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { n_trees: 100, max_depth: Some(10), features_per_split: None, min_samples_split: 2, bootstrap: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf { counts: [u32; 2] },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// Axis-aligned binary tree; `nodes[0]` is the root. Rows with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_counts(&self, x: &[f64]) -> [u32; 2] {
        let mut k = 0;
        loop {
            match &self.nodes[k] {
                Node::Leaf { counts } => return *counts,
                Node::Split { feature, threshold, left, right } => {
                    k = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Majority label at the reached leaf; ties go to 0.
    pub fn predict_row(&self, x: &[f64]) -> u8 {
        let c = self.leaf_counts(x);
        u8::from(c[1] > c[0])
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], k: usize) -> usize {
            match &nodes[k] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForestModel {
    pub trees: Vec<Tree>,
    pub params: ForestParams,
    pub n_features: usize,
    pub seed: u64,
}

impl RandomForestModel {
    /// Majority vote over trees; ties go to 0.
    pub fn predict(&self, features: &Matrix) -> Result<Vec<u8>> {
        if features.cols() != self.n_features && !features.is_empty() {
            return Err(shape(format!(
                "forest trained on {} features, got {}",
                self.n_features,
                features.cols()
            )));
        }
        Ok(features
            .iter_rows()
            .map(|x| {
                let ones = self.trees.iter().filter(|t| t.predict_row(x) == 1).count();
                u8::from(2 * ones > self.trees.len())
            })
            .collect())
    }
}

fn gini(c0: f64, c1: f64) -> f64 {
    let n = c0 + c1;
    if n == 0.0 {
        return 0.0;
    }
    let (p0, p1) = (c0 / n, c1 / n);
    1.0 - p0 * p0 - p1 * p1
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    params: &'a ForestParams,
    mtry: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> [u32; 2] {
        let ones = idx.iter().filter(|&&i| self.y[i] == 1).count() as u32;
        [idx.len() as u32 - ones, ones]
    }

    /// Best `(impurity, threshold)` for one feature, or `None` if the
    /// feature is constant on `idx`.
    fn best_threshold(&self, idx: &[usize], f: usize, scratch: &mut Vec<(f64, u8)>) -> Option<(f64, f64)> {
        scratch.clear();
        scratch.extend(idx.iter().map(|&i| (self.x.get(i, f), self.y[i])));
        scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total1 = scratch.iter().filter(|p| p.1 == 1).count() as f64;
        let n = scratch.len() as f64;
        let mut left1 = 0.0;
        let mut best: Option<(f64, f64)> = None;
        for k in 0..scratch.len() - 1 {
            left1 += f64::from(scratch[k].1);
            if scratch[k].0 == scratch[k + 1].0 {
                continue;
            }
            let nl = (k + 1) as f64;
            let nr = n - nl;
            let imp = (nl * gini(nl - left1, left1) + nr * gini(nr - (total1 - left1), total1 - left1)) / n;
            if best.is_none_or(|(b, _)| imp < b) {
                let t = 0.5 * (scratch[k].0 + scratch[k + 1].0);
                // midpoint can round up to the right value
                let t = if t >= scratch[k + 1].0 { scratch[k].0 } else { t };
                best = Some((imp, t));
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize, rng: &mut SimRng) -> usize {
        let counts = self.counts(&idx);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });
        let pure = counts[0] == 0 || counts[1] == 0;
        let depth_cap = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_cap || idx.len() < self.params.min_samples_split.max(2) {
            return id;
        }

        let d = self.x.cols();
        let mut order: Vec<usize> = (0..d).collect();
        order.shuffle(rng);
        let mut scratch = Vec::with_capacity(idx.len());
        let mut best: Option<(f64, usize, f64)> = None;
        // the first `mtry` candidates are always scored; later ones only
        // until some split is found
        for (k, &f) in order.iter().enumerate() {
            if k >= self.mtry && best.is_some() {
                break;
            }
            if let Some((imp, t)) = self.best_threshold(&idx, f, &mut scratch) {
                if best.is_none_or(|(b, _, _)| imp < b) {
                    best = Some((imp, f, t));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return id;
        };
        let (li, ri): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x.get(i, feature) <= threshold);
        let left = self.grow(li, depth + 1, rng);
        let right = self.grow(ri, depth + 1, rng);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }
}

/// Bagged CART trees with Gini splits. Tree `t` draws its bootstrap sample
/// and feature subsets from a stream derived from `(seed, t)`, so trees are
/// built in parallel without affecting the result. A single-class training
/// set yields a forest that always predicts that class.
pub fn train_random_forest(
    features: &Matrix,
    labels: &[u8],
    params: &ForestParams,
    seed: u64,
) -> Result<RandomForestModel> {
    check_training_set(features, labels)?;
    if params.n_trees == 0 {
        return Err(crate::error::invalid("forest needs at least one tree"));
    }
    let ones = labels.iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == labels.len() {
        log::warn!("random forest trained on a single class; model is constant");
    }
    let d = features.cols();
    let mtry = params
        .features_per_split
        .unwrap_or_else(|| ((d as f64).sqrt().round() as usize).max(1))
        .clamp(1, d.max(1));
    let n = labels.len();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t as u64);
            let idx: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut b = Builder { x: features, y: labels, params, mtry, nodes: Vec::new() };
            b.grow(idx, 0, &mut rng);
            Tree { nodes: b.nodes }
        })
        .collect();
    Ok(RandomForestModel { trees, params: params.clone(), n_features: d, seed })
}
