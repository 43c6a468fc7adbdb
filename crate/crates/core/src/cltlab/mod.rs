//! Replicated experiments: sample, count, standardize and summarize.

mod expansion;
mod experiment;
mod stats;
mod table1;

pub use expansion::{expansion_scaling_check, ExpansionCheck, Quantity};
pub use experiment::{
    read_records_csv, run_experiment, write_outputs, write_plot_script, write_records_csv,
    ExperimentConfig, ExperimentOutcome, ExperimentSummary, OutputConfig, RadiusRule, RegimeChoice,
    ReplicationRecord, Skip, RECORDS_HEADER,
};
pub use stats::{ks_statistic, normal_cdf, summarize_z, ZStats};
pub use table1::{table1_reproduce, Table1Cell, Table1Report, TABLE1_KAPPAS, TABLE1_MUS};
