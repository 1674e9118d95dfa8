//! Configuration, file formats and run orchestration for the `kds`
//! command-line tool. The numerics live in `kds-core`.

pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod presets;
pub mod run;

pub use config::{RunType, ScenarioConfig};
pub use error::{ConfigError, LabError, LabResult};
