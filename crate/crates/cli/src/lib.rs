//! Harness around `rdm-core`: TOML run configs, experiment runs, manifests
//! and plot tables. The `rdm` binary is a thin clap front end over this crate.

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod plot;

pub use config::{default_config, load_config, parse_config, Experiment, RunConfig};
pub use error::{HarnessError, Result};
pub use experiments::{execute, Check, Outcome, Table};
pub use manifest::{output_dir, resolve_seed, run, Manifest, SeedSource, SEED_ENV};
pub use plot::emit_plot_data;
