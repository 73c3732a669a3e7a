//! Seeded experiments over instance families, closed-form tables and
//! CSV/JSON reports.

pub mod analyze;
pub mod experiment;
pub mod instances;
pub mod report;

pub use experiment::{
    run_experiment, Algorithm, ExperimentConfig, ExperimentResult, OracleMode, RatioEstimate,
};
pub use instances::{generate_instance, FamilyKind, Instance, InstanceFamily};
pub use report::{read_csv_report, write_report, write_rows, Format, ReportRow};
