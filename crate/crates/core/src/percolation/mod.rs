//! Connectivity analytics on sampled lattices.

mod crossing;
mod paths;
mod punch;
mod record;
mod threshold;

pub use crossing::{
    components, connectivity, crossing_exists, largest_component_fraction, wilson_interval, Connectivity, LatticeGraph,
    PercolationReport, ProbabilityEstimate, SpatialGraph, UnionFind,
};
pub use paths::{find_paths_windowed, PathOutcome, PathfindingState, DEFAULT_WINDOW};
pub use punch::{punch_out, recover_losses, PunchOut};
pub use record::{parse_json_lines, TrialRecord};
pub use threshold::{bisect, crossing_curve, estimate_threshold, BondLattice, Probe, ThresholdEstimate, ThresholdOptions};
