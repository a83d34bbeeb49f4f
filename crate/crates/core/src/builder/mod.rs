//! Wafer assembly from three-photon sources and fusion gates.

mod cellspec;
mod report;
mod wafer;

pub use cellspec::{
    db_to_transmission, loss_probability, Axis, BoundaryPair, ComputationalSlots, GhzSourceModel, OpticsSpec,
    PlusFilter, SourceShape, UnitCellSpec, WaferSpec, CELLSPEC_FORMAT,
};
pub use report::{optical_depth_report, resource_report, CellResources, OpticalDepthReport, SlotDepth};
pub use wafer::{apply_plus_filter, build_wafer, make_ghz3, BuiltLattice, FusionRecord, ResourceReport};
