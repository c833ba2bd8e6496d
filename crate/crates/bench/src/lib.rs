//! Experiment harness for the entropic OT solvers: synthetic image
//! marginals, an exact small-instance OT oracle, log-log slope fits and
//! operation-count sweeps written as CSV.

pub mod csv_out;
pub mod error;
pub mod experiment;
pub mod imagegen;
pub mod oracle;
pub mod slope;

pub use csv_out::{write_csv, CSV_HEADER};
pub use error::{BenchError, Result};
pub use experiment::{
    mean_ops_by, run_batch_experiment, run_cell, run_eps_experiment, run_scaling_experiment, Accuracy, Algo,
    ExperimentRecord, RunOptions,
};
pub use imagegen::{gen_synthetic_image, grid_cost, image_pair, image_pair_to_problem, ImageMarginal};
pub use oracle::{exact_ot_small, ORACLE_MAX_N};
pub use slope::{fit_loglog_slope, LogLogFit};
pub use eot_core::OpCounter;
