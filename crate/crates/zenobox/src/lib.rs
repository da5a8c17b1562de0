//! Experiment runner for `zenobox-core`: TOML configs, the experiment
//! catalog, CSV records and FFT synthesis of spectral states.

pub mod config;
pub mod error;
pub mod experiments;
pub mod record;
pub mod run;
pub mod synth;

pub use config::{Config, Experiment};
pub use error::{Error, Result};
pub use experiments::RunOutput;
pub use record::{emit_csv, parse_records, read_records, ResultRecord};
pub use run::{run_experiment, write_outputs};
