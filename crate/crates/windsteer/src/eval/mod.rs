//! Evaluation harness: deterministic policy rollouts against the zero-yaw
//! twin, a brute-force static-yaw oracle, constraint-level comparisons, and
//! bit-stable result exports.

mod compare;
mod export;
mod grid;
mod metrics;
mod rollout;

pub use compare::{
    compare_constraint_levels, ComparisonRow, ComparisonSummary, ORDERING_MIN_DELTA,
    ORDERING_TOLERANCE,
};
pub use export::{export_results, load_report, EvalSummary};
pub use grid::{grid_search_oracle, GridSearchResult};
pub use metrics::{histogram_counts, histogram_edges, quantile, spearman};
pub use rollout::{
    evaluate, DelHistograms, EvalOptions, EvalReport, YawController, CROSS_CHECK_WOHLER_M,
    HIST_BINS,
};
