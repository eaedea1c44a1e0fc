//! Experiment harness: runs specs end to end, scores external samples, and writes the
//! JSON/CSV/text outputs consumed by plotting scripts.

pub mod amplitudes;
pub mod config;
pub mod error;
pub mod harness;
pub mod mem;
pub mod record;

pub use amplitudes::AmplitudeTable;
pub use config::{ConfigFile, ErrorModelSpec, LayoutSpec, Overrides, RcsSpec, RunSpec, Source};
pub use error::HarnessError;
pub use harness::{bench_sweep, bench_sweep_to_file, run, score_external, ExternalScore, MissingPolicy, RunOutcome};
pub use record::{CsvRow, ResultRecord, CSV_COLUMNS};
