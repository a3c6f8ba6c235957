//! Experiment runner for `duplexnet-core`: TOML experiment files, figure
//! presets, a parallel Monte Carlo driver, the CSV output contract and the
//! acceptance suite.

pub mod config;
pub mod csvio;
pub mod engine;
pub mod error;
pub mod presets;
pub mod run;
pub mod validate;

pub use config::{Engine, ExperimentSpec, JobKind};
pub use csvio::Row;
pub use engine::Pool;
pub use error::RunError;
pub use run::{run, RunOutput};
