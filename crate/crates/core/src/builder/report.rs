use serde::Serialize;

use super::cellspec::UnitCellSpec;
use crate::fusion::FusionParams;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlotDepth {
    pub slot: usize,
    pub elements: u32,
    pub crossings: u32,
    pub active_phase_shifters: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpticalDepthReport {
    pub slots: Vec<SlotDepth>,
    pub max: u32,
    pub mean: f64,
}

/// Static elements each photon slot passes: its source circuit, a fusion
/// gate if it is fused, waveguide crossings, the delay line, an active
/// phase shifter for computational photons, and the detector.
pub fn optical_depth_report(cell: &UnitCellSpec) -> OpticalDepthReport {
    let o = &cell.optics;
    let comp = cell.computational_slots();
    let slots: Vec<SlotDepth> = (0..cell.slot_count())
        .map(|s| {
            let crossings = o.crossings.iter().filter(|&&(a, b)| a == s || b == s).count() as u32;
            let active = u32::from(comp.contains(&s));
            let fused = if comp.contains(&s) { 0 } else { o.fusion_elements };
            let delay = u32::from(o.delay_slots.contains(&s));
            SlotDepth {
                slot: s,
                elements: o.source_elements + fused + crossings + delay + active + o.measurement_elements,
                crossings,
                active_phase_shifters: active,
            }
        })
        .collect();
    let max = slots.iter().map(|d| d.elements).max().unwrap_or(0);
    let mean = slots.iter().map(|d| d.elements as f64).sum::<f64>() / slots.len().max(1) as f64;
    OpticalDepthReport { slots, max, mean }
}

/// Photon budget of one interior cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResources {
    pub photons_per_cell: u32,
    pub fusions_per_cell: u32,
    pub ancilla_per_cell: u32,
    pub computational_per_cell: u32,
    /// Source photons per computational qubit.
    pub photons_per_qubit_no_ancilla: f64,
    /// Source plus boosting photons per computational qubit.
    pub photons_per_qubit_with_ancilla: f64,
    /// Expected single photons consumed per heralded GHZ state.
    pub single_photons_per_ghz: f64,
}

pub fn resource_report(cell: &UnitCellSpec, fusion: &FusionParams) -> CellResources {
    let photons = cell.slot_count() as u32;
    let fusions = cell.fusions_per_cell() as u32;
    let ancilla = fusions * fusion.ancilla_cost;
    let comps = 2u32;
    CellResources {
        photons_per_cell: photons,
        fusions_per_cell: fusions,
        ancilla_per_cell: ancilla,
        computational_per_cell: comps,
        photons_per_qubit_no_ancilla: photons as f64 / comps as f64,
        photons_per_qubit_with_ancilla: (photons + ancilla) as f64 / comps as f64,
        single_photons_per_ghz: cell.ghz_source.single_photons as f64 / cell.ghz_source.success_prob,
    }
}
