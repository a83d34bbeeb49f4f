//! Experiment configs, runs, figures and the verification suite behind the
//! `ballistic` binary.

pub mod config;
pub mod figure;
pub mod run;
pub mod svg;
pub mod verify;

pub use config::{load_cell, ExperimentConfig, Scenario, SCENARIOS};
pub use figure::{emit_figure_data, figure_data, FigureData, FIGURE_IDS};
pub use run::{run, summarize, Manifest, ResultRecord, RunOutput};
pub use verify::{verify, Check, CHECKS};
