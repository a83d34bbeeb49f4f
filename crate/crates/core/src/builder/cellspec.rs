use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fusion::FusionParams;
use crate::{Error, Result};

pub const CELLSPEC_FORMAT: &str = "cellspec v1";

/// Graph form a source's three photons are emitted in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceShape {
    /// Linear cluster, slots 0-1-2.
    #[default]
    Chain,
    /// Local complement of the chain at its middle photon: all three
    /// photons pairwise adjacent. Same state up to local Cliffords, but
    /// graph-basis fusions and Z measurements act differently on it.
    Triangle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Photon `from` of a cell fuses with photon `to` of the next cell along
/// `axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryPair {
    pub from: usize,
    pub to: usize,
    pub axis: Axis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputationalSlots {
    pub primal: usize,
    pub dual: usize,
}

/// Static optical elements used by the depth report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticsSpec {
    /// Elements inside the source circuit, per photon.
    pub source_elements: u32,
    /// Elements inside one fusion gate, per photon.
    pub fusion_elements: u32,
    pub measurement_elements: u32,
    /// Slots that pass through the waveguide delay.
    pub delay_slots: Vec<usize>,
    /// Pairs of slots whose waveguides cross.
    pub crossings: Vec<(usize, usize)>,
}

impl Default for OpticsSpec {
    fn default() -> Self {
        OpticsSpec {
            source_elements: 4,
            fusion_elements: 4,
            measurement_elements: 1,
            delay_slots: Vec::new(),
            crossings: Vec::new(),
        }
    }
}

/// Heralded GHZ generation from single photons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GhzSourceModel {
    pub single_photons: u32,
    pub success_prob: f64,
}

impl Default for GhzSourceModel {
    fn default() -> Self {
        GhzSourceModel { single_photons: 6, success_prob: 1.0 / 32.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitCellSpec {
    pub format: String,
    pub sources: usize,
    #[serde(default = "three")]
    pub photons_per_source: usize,
    #[serde(default)]
    pub shapes: Vec<SourceShape>,
    pub computational: ComputationalSlots,
    pub intra_fusions: usize,
    pub boundary_fusions: usize,
    #[serde(default)]
    pub intra: Vec<(usize, usize)>,
    /// Slot in layer `t` fused with slot in layer `t + 1` of the same site.
    #[serde(default)]
    pub layer: Vec<(usize, usize)>,
    #[serde(default)]
    pub boundary: Vec<BoundaryPair>,
    #[serde(default)]
    pub optics: OpticsSpec,
    #[serde(default)]
    pub ghz_source: GhzSourceModel,
}

fn three() -> usize {
    3
}

const DEFAULT_CELL: &str = include_str!("../../data/cells/default.toml");

impl UnitCellSpec {
    /// The wiring shipped in `data/cells/default.toml`.
    pub fn default_cell() -> Self {
        Self::parse(DEFAULT_CELL).expect("bundled cell spec is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let spec: UnitCellSpec = toml::from_str(text).map_err(|e| Error::Config(format!("cellspec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("cell spec serializes")
    }

    pub fn slot_count(&self) -> usize {
        self.sources * self.photons_per_source
    }

    pub fn shape(&self, source: usize) -> SourceShape {
        self.shapes.get(source).copied().unwrap_or_default()
    }

    pub fn computational_slots(&self) -> [usize; 2] {
        [self.computational.primal, self.computational.dual]
    }

    /// Fusions attempted per cell away from the wafer edge.
    pub fn fusions_per_cell(&self) -> usize {
        self.intra.len() + self.layer.len() + self.boundary.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Spec(msg));
        if self.format != CELLSPEC_FORMAT {
            return bad(format!("format must be \"{CELLSPEC_FORMAT}\", got \"{}\"", self.format));
        }
        if self.photons_per_source != 3 {
            return bad(format!("sources emit 3 photons, got {}", self.photons_per_source));
        }
        if self.sources == 0 {
            return bad("at least one source is required".into());
        }
        if !self.shapes.is_empty() && self.shapes.len() != self.sources {
            return bad(format!("{} shapes listed for {} sources", self.shapes.len(), self.sources));
        }
        let n = self.slot_count();
        let comp = self.computational_slots();
        if comp[0] == comp[1] {
            return bad("primal and dual slots must differ".into());
        }
        // uses[s] counts how many pairs each slot joins, counting both ends
        // of a boundary or layer pair since every cell plays both roles
        let mut uses = vec![0usize; n];
        let mut mark = |s: usize, what: &str| -> Result<()> {
            if s >= n {
                return Err(Error::Spec(format!("{what} uses slot {s}, cell has {n}")));
            }
            uses[s] += 1;
            Ok(())
        };
        for &(a, b) in &self.intra {
            if a == b {
                return bad(format!("intra pair fuses slot {a} with itself"));
            }
            mark(a, "intra pair")?;
            mark(b, "intra pair")?;
        }
        for &(a, b) in &self.layer {
            mark(a, "layer pair")?;
            mark(b, "layer pair")?;
        }
        for p in &self.boundary {
            if p.axis == Axis::Z {
                return bad("boundary pairs run along x or y; use `layer` for z".into());
            }
            mark(p.from, "boundary pair")?;
            mark(p.to, "boundary pair")?;
        }
        for (s, &u) in uses.iter().enumerate() {
            let is_comp = comp.contains(&s);
            if is_comp && u != 0 {
                return bad(format!("computational slot {s} appears in a fusion pair"));
            }
            if !is_comp && u != 1 {
                return bad(format!("slot {s} appears in {u} fusion pairs, expected exactly 1"));
            }
        }
        if self.intra.len() + self.layer.len() != self.intra_fusions {
            return bad(format!(
                "intra_fusions = {} but {} intra and layer pairs are listed",
                self.intra_fusions,
                self.intra.len() + self.layer.len()
            ));
        }
        if 2 * self.boundary.len() != self.boundary_fusions {
            return bad(format!(
                "boundary_fusions = {} but {} boundary slots are listed",
                self.boundary_fusions,
                2 * self.boundary.len()
            ));
        }
        if 2 * self.intra_fusions + self.boundary_fusions != n - 2 {
            return bad(format!(
                "2 * intra_fusions + boundary_fusions = {} but there are {} non-computational slots",
                2 * self.intra_fusions + self.boundary_fusions,
                n - 2
            ));
        }
        for &s in &self.optics.delay_slots {
            if s >= n {
                return bad(format!("delay slot {s} out of range"));
            }
        }
        let mut crossings: BTreeMap<usize, usize> = BTreeMap::new();
        for &(a, b) in &self.optics.crossings {
            if a >= n || b >= n || a == b {
                return bad(format!("crossing ({a}, {b}) is not a pair of distinct slots"));
            }
            *crossings.entry(a).or_default() += 1;
            *crossings.entry(b).or_default() += 1;
        }
        if let Some((s, c)) = crossings.iter().find(|(_, &c)| c > 1) {
            return bad(format!("slot {s} crosses {c} waveguides, at most one allowed"));
        }
        let g = &self.ghz_source;
        if !(g.success_prob > 0.0 && g.success_prob <= 1.0) {
            return bad(format!("ghz_source.success_prob must be in (0, 1], got {}", g.success_prob));
        }
        Ok(())
    }
}

/// Loss and filter settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlusFilter {
    pub enabled: bool,
    /// `|<+|+~>|^2`.
    pub fidelity: f64,
}

impl Default for PlusFilter {
    fn default() -> Self {
        PlusFilter { enabled: false, fidelity: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaferSpec {
    pub nx: usize,
    pub ny: usize,
    /// Layers; the z direction is time.
    pub nz: usize,
    #[serde(default)]
    pub fusion: FusionParams,
    #[serde(default)]
    pub photon_loss: f64,
    #[serde(default)]
    pub filter: PlusFilter,
}

impl WaferSpec {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        WaferSpec {
            nx,
            ny,
            nz,
            fusion: FusionParams::boosted(),
            photon_loss: 0.0,
            filter: PlusFilter::default(),
        }
    }

    pub fn with_success_prob(mut self, p: f64) -> Self {
        self.fusion.success_prob = p;
        self
    }

    pub fn with_loss(mut self, eps: f64) -> Self {
        self.photon_loss = eps;
        self
    }

    pub fn with_filter(mut self, fidelity: f64) -> Self {
        self.filter = PlusFilter { enabled: true, fidelity };
        self
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.nz == 0 {
            return Err(Error::Spec(format!("wafer dimensions must be >= 1, got {}x{}x{}", self.nx, self.ny, self.nz)));
        }
        self.fusion.validate().map_err(|e| Error::Spec(e.to_string()))?;
        if !(0.0..1.0).contains(&self.photon_loss) {
            return Err(Error::Spec(format!("photon_loss must be in [0, 1), got {}", self.photon_loss)));
        }
        if !(0.0..=1.0).contains(&self.filter.fidelity) {
            return Err(Error::Spec(format!("filter fidelity must be in [0, 1], got {}", self.filter.fidelity)));
        }
        Ok(())
    }
}

/// Transmission of a component with the given loss in dB.
pub fn db_to_transmission(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

/// Photon loss probability after a chain of lossy components in dB.
pub fn loss_probability(loss_db: &[f64]) -> f64 {
    1.0 - db_to_transmission(loss_db.iter().sum())
}
