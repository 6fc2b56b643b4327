use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::augment::{augment_sizes, AugmentSpec, SynthSize};
use super::report::EvalReport;
use super::split::{default_ratio_grid, split_dataset, worst_ratio_split, SplitSpec};
use crate::classify::ClassifierKind;
use crate::error::{invalid, Error, Result};
use crate::rng::derive_path;
use crate::signalgen::{generate_dataset, ChannelEnv, OfdmConfig};

/// Cartesian experiment grid for augmentation runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub snr_db: Vec<f64>,
    pub classifiers: Vec<ClassifierKind>,
    /// Fixed train ratios; when empty, each cell searches `ratio_grid` for
    /// the ratio with the worst baseline accuracy.
    pub train_ratios: Vec<f64>,
    pub ratio_grid: Vec<f64>,
    pub synth_counts: Vec<usize>,
    pub synth_multipliers: Vec<f64>,
    pub replicates: usize,
    /// Real samples generated per replicate and SNR.
    pub n_samples: usize,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            snr_db: vec![0.0, 5.0, 10.0],
            classifiers: vec![ClassifierKind::RandomForest, ClassifierKind::SvmRbf],
            train_ratios: Vec::new(),
            ratio_grid: default_ratio_grid(),
            synth_counts: Vec::new(),
            synth_multipliers: vec![4.0],
            replicates: 10,
            n_samples: 100,
        }
    }
}

impl SweepGrid {
    pub fn synth_sizes(&self) -> Vec<SynthSize> {
        self.synth_counts
            .iter()
            .map(|&n| SynthSize::Count(n))
            .chain(self.synth_multipliers.iter().map(|&m| SynthSize::Multiplier(m)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let ratio_slots = if self.train_ratios.is_empty() { self.ratio_grid.len() } else { self.train_ratios.len() };
        if self.snr_db.is_empty()
            || self.classifiers.is_empty()
            || ratio_slots == 0
            || self.synth_sizes().is_empty()
            || self.replicates == 0
        {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.n_samples < 4 {
            return Err(Error::Config("sweep needs at least 4 samples per dataset".into()));
        }
        Ok(())
    }
}

/// One grid cell: indices into the grid axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepCell {
    pub snr: usize,
    pub classifier: usize,
    /// Index into `train_ratios`, or 0 under the worst-ratio search.
    pub ratio: usize,
    pub replicate: usize,
}

pub fn sweep_cells(grid: &SweepGrid) -> Vec<SweepCell> {
    let n_ratio = grid.train_ratios.len().max(1);
    let mut cells = Vec::new();
    for snr in 0..grid.snr_db.len() {
        for classifier in 0..grid.classifiers.len() {
            for ratio in 0..n_ratio {
                for replicate in 0..grid.replicates {
                    cells.push(SweepCell { snr, classifier, ratio, replicate });
                }
            }
        }
    }
    cells
}

/// Runs one cell. The dataset depends only on `(master_seed, snr,
/// replicate)` so every classifier and ratio in a replicate sees the same
/// samples; everything else derives from the full cell index.
pub fn run_cell(
    grid: &SweepGrid,
    ofdm: &OfdmConfig,
    env: &ChannelEnv,
    spec: &AugmentSpec,
    master_seed: u64,
    cell: SweepCell,
) -> Result<EvalReport> {
    let env = ChannelEnv { snr_db: grid.snr_db[cell.snr], ..*env };
    let data_seed = derive_path(master_seed, &[0, cell.snr as u64, cell.replicate as u64]);
    let ds = generate_dataset(grid.n_samples, ofdm, &env, data_seed)?;
    let seed = derive_path(
        master_seed,
        &[1, cell.snr as u64, cell.classifier as u64, cell.ratio as u64, cell.replicate as u64],
    );
    let kind = grid.classifiers[cell.classifier];
    let spec = AugmentSpec { classifiers: vec![kind], ..spec.clone() };
    let (train_set, test_set) = if grid.train_ratios.is_empty() {
        let w = worst_ratio_split(&ds, kind, &grid.ratio_grid, &spec.classifier_params, seed)?;
        (w.train, w.test)
    } else {
        split_dataset(&ds, &SplitSpec { train_ratio: grid.train_ratios[cell.ratio], seed })?
    };
    let mut sizes = grid
        .synth_sizes()
        .into_iter()
        .map(|s| s.resolve(train_set.len()))
        .collect::<Result<Vec<_>>>()?;
    sizes.sort_unstable();
    sizes.dedup();
    Ok(augment_sizes(&train_set, &test_set, &sizes, &spec, seed)?.report)
}

/// Runs every cell (in parallel, on at most `jobs` threads when given) and
/// returns the records in canonical order, so the result does not depend on
/// scheduling.
pub fn sweep(
    grid: &SweepGrid,
    ofdm: &OfdmConfig,
    env: &ChannelEnv,
    spec: &AugmentSpec,
    master_seed: u64,
    jobs: Option<usize>,
) -> Result<EvalReport> {
    grid.validate()?;
    let cells = sweep_cells(grid);
    let run = || -> Result<Vec<EvalReport>> {
        cells.par_iter().map(|&c| run_cell(grid, ofdm, env, spec, master_seed, c)).collect()
    };
    let parts = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let mut report = EvalReport::default();
    parts.into_iter().for_each(|p| report.extend(p));
    report.sort();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_count() {
        let grid = SweepGrid { replicates: 5, train_ratios: vec![0.5], ..Default::default() };
        assert_eq!(sweep_cells(&grid).len(), 3 * 2 * 5);
    }

    #[test]
    fn empty_grid_rejected() {
        let grid = SweepGrid { snr_db: vec![], ..Default::default() };
        assert!(matches!(grid.validate(), Err(Error::Config(_))));
    }
}
