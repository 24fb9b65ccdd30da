//! Datasets, synthetic generators, experiment runs, grids and benchmarks.

mod bench;
mod config;
mod data;
mod experiment;

pub use bench::{bench_one, bench_scaling, median, write_bench, BenchRow, BenchSpec};
pub use config::{Algorithm, BenchOp, DatasetKind, RunConfig, Selection, SCHEMA_VERSION};
pub use data::{gen_lowdim_correlated, gen_rbf_prototypes, load_svmlight, parse_svmlight, write_svmlight, Dataset};
pub use experiment::{
    build_learner, fmt_f64, grid_configs, load_dataset, run_experiment, run_grid, run_grid_on, run_on_dataset,
    split_sizes, subseed, write_experiment, write_grid, write_json, write_trace_csv, BoundSummary, Experiment,
    GridCell, GridSummary, PermSummary, RegretSummary, RunSummary,
};
