//! Benchmark harness around `streamdrift-core`: dataset loading, experiment
//! configs and presets, CSV/SVG artifacts.

pub mod config;
pub mod error;
pub mod ingest;
pub mod learners;
pub mod output;
pub mod plot;
pub mod presets;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use presets::{run_preset, PresetOptions, PRESETS};
