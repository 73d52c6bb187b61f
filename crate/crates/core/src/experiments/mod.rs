//! Synthetic data, bundled models, comparison runs and reports.

mod catalog;
mod compare;
mod data;
mod plan;
mod report;

pub use catalog::{
    builtin_names, builtin_plan_names, builtin_plan_source, builtin_source, builtin_spec,
    builtin_specs, REAL_WORLD_ROSTER, SYNTHETIC_ROSTER,
};
pub use compare::{
    cell_seed, compare_rows, posterior_rows, run_cells, run_comparison, run_evidence,
    sigma_regime_sweep, Cell, ComparisonRow, PosteriorRow, SigmaGroup,
};
pub use data::{
    generate_stand_in, generate_synthetic, StandIn, STAND_IN_NOISE, STAND_IN_PHI, THETA_TRUE,
};
pub use plan::{
    DatasetSource, ExperimentPlan, ResolvedModel, RosterEntry, SamplerBlock, SigmaBlock, SigmaValue,
};
pub use report::{
    comparison_markdown, emit_report, posterior_markdown, read_comparison_csv,
    write_comparison_csv, write_posterior_csv, COMPARISON_CSV, COMPARISON_MD, POSTERIOR_CSV,
    POSTERIOR_MD,
};
