//! End-to-end experiments: augmentation with a conditional GAN, adaptation
//! across channel environments, and grid sweeps over both, with CSV reports.

mod adapt;
mod augment;
mod report;
mod split;
mod sweep;

pub use adapt::{run_adaptation, AdaptRun, AdaptSpec};
pub use augment::{augment_sizes, run_augmentation, sample_balanced, AugmentRun, AugmentSpec, SynthSize};
pub use report::{mean, AggregateRow, EvalRecord, EvalReport, Method, AGGREGATE_HEADER, CSV_HEADER};
pub use split::{
    assert_disjoint, default_ratio_grid, fingerprints, split_dataset, split_indices, worst_ratio_split, SplitSpec,
    WorstSplit,
};
pub use sweep::{run_cell, sweep, sweep_cells, SweepCell, SweepGrid};
