use rayon::prelude::*;
use rand::Rng;
use serde::Serialize;

use super::crossing::{crossing_exists, LatticeGraph, ProbabilityEstimate};
use crate::builder::Axis;
use crate::rng::{substream, TrialRng};
use crate::{Error, Result};

/// A lattice with every candidate bond listed; sampling keeps each bond
/// independently.
#[derive(Clone, Debug)]
pub struct BondLattice {
    pub sites: Vec<[usize; 3]>,
    pub bonds: Vec<(u32, u32)>,
    pub extent: [usize; 3],
    /// Axis the crossing test runs along.
    pub axis: Axis,
}

impl BondLattice {
    /// `l x l` square lattice, crossing along x.
    pub fn square(l: usize) -> Self {
        let id = |x: usize, y: usize| (y * l + x) as u32;
        let mut sites = Vec::with_capacity(l * l);
        let mut bonds = Vec::with_capacity(2 * l * l);
        for y in 0..l {
            for x in 0..l {
                sites.push([x, y, 0]);
                if x + 1 < l {
                    bonds.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < l {
                    bonds.push((id(x, y), id(x, y + 1)));
                }
            }
        }
        BondLattice { sites, bonds, extent: [l, l, 1], axis: Axis::X }
    }

    /// Diamond lattice cut from an `l`-sided cube of the integer grid,
    /// crossing along z. Sites of one sublattice have even coordinates with
    /// a sum divisible by 4; the other is shifted by (1, 1, 1).
    pub fn diamond(l: usize) -> Self {
        let mut index = vec![u32::MAX; l * l * l];
        let at = |x: usize, y: usize, z: usize| (z * l + y) * l + x;
        let mut sites = Vec::new();
        for z in 0..l {
            for y in 0..l {
                for x in 0..l {
                    let even = x % 2 == 0 && y % 2 == 0 && z % 2 == 0 && (x + y + z) % 4 == 0;
                    let odd = x % 2 == 1 && y % 2 == 1 && z % 2 == 1 && (x + y + z - 3) % 4 == 0;
                    if even || odd {
                        index[at(x, y, z)] = sites.len() as u32;
                        sites.push([x, y, z]);
                    }
                }
            }
        }
        let mut bonds = Vec::new();
        for (i, &[x, y, z]) in sites.iter().enumerate() {
            if x % 2 == 1 {
                continue;
            }
            for d in [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]] {
                let q = [x as i64 + d[0], y as i64 + d[1], z as i64 + d[2]];
                if q.iter().all(|&c| c >= 0 && c < l as i64) {
                    let j = index[at(q[0] as usize, q[1] as usize, q[2] as usize)];
                    debug_assert_ne!(j, u32::MAX);
                    bonds.push((i as u32, j));
                }
            }
        }
        BondLattice { sites, bonds, extent: [l, l, l], axis: Axis::Z }
    }

    /// A single isolated site. It touches both ends of every axis, so its
    /// crossing probability is 1 whatever the bond probability.
    pub fn single_site() -> Self {
        BondLattice { sites: vec![[0, 0, 0]], bonds: Vec::new(), extent: [1, 1, 1], axis: Axis::X }
    }

    pub fn sample(&self, p: f64, rng: &mut impl Rng) -> LatticeGraph {
        let mut g = LatticeGraph::with_vertices(self.sites.clone(), self.extent);
        for &(a, b) in &self.bonds {
            if rng.random_bool(p) {
                g.add_edge(a as usize, b as usize);
            }
        }
        g
    }

    pub fn crossing(&self, p: f64, rng: &mut impl Rng) -> bool {
        crossing_exists(&self.sample(p, rng), self.axis)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdOptions {
    pub trials: u64,
    /// Target width of the returned interval.
    pub tolerance: f64,
    /// Normal quantile for the Wilson bracket test.
    pub z: f64,
    /// Crossing probability that defines the threshold.
    pub level: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions { trials: 1000, tolerance: 0.01, z: 3.0, level: 0.5, max_iterations: 40, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Probe {
    pub x: f64,
    pub estimate: ProbabilityEstimate,
    /// Wilson interval straddled the level, so the side was chosen from the
    /// point estimate alone.
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub low: f64,
    pub high: f64,
    pub probes: Vec<Probe>,
}

impl ThresholdEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.low + self.high)
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

fn probe<F>(f: &F, x: f64, index: u64, opts: &ThresholdOptions) -> ProbabilityEstimate
where
    F: Fn(f64, &mut TrialRng) -> bool + Sync,
{
    let hits: u64 = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(opts.seed, t, index);
            u64::from(f(x, &mut rng))
        })
        .sum();
    ProbabilityEstimate::new(hits, opts.trials)
}

/// Bisection for the parameter in `[lo, hi]` where the success probability
/// of `f` passes `opts.level`. `increasing` says which way it moves.
///
/// Both ends are probed first and must lie on opposite sides of the level
/// with confidence, otherwise the family is rejected.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, increasing: bool, opts: &ThresholdOptions) -> Result<ThresholdEstimate>
where
    F: Fn(f64, &mut TrialRng) -> bool + Sync,
{
    if !(lo < hi) || opts.trials == 0 || !(opts.tolerance > 0.0) {
        return Err(Error::Config(format!(
            "bisection needs lo < hi, trials > 0 and tolerance > 0 (got [{lo}, {hi}], {}, {})",
            opts.trials, opts.tolerance
        )));
    }
    let mut probes = Vec::new();
    let mut index = 0u64;
    // the side of the level an estimate is on, with confidence
    let side = |e: &ProbabilityEstimate| {
        let (l, u) = e.wilson(opts.z);
        if u < opts.level {
            Some(false)
        } else if l > opts.level {
            Some(true)
        } else {
            None
        }
    };
    for (x, want_above) in [(lo, !increasing), (hi, increasing)] {
        let e = probe(&f, x, index, opts);
        index += 1;
        probes.push(Probe { x, estimate: e, ambiguous: side(&e).is_none() });
        if side(&e) != Some(want_above) {
            return Err(Error::Spec(format!(
                "success probability {:.4} at {x} is not confidently {} {}; no threshold in [{lo}, {hi}]",
                e.p,
                if want_above { "above" } else { "below" },
                opts.level
            )));
        }
    }
    let mut iterations = 0;
    while hi - lo > opts.tolerance {
        iterations += 1;
        if iterations > opts.max_iterations {
            let last = probes.last().map(|p| p.estimate.p).unwrap_or(f64::NAN);
            return Err(Error::Numeric(format!(
                "bisection did not reach width {} in {} steps: bracket [{lo}, {hi}], last estimate {last:.4}",
                opts.tolerance, opts.max_iterations
            )));
        }
        let mid = 0.5 * (lo + hi);
        let e = probe(&f, mid, index, opts);
        index += 1;
        let s = side(&e);
        probes.push(Probe { x: mid, estimate: e, ambiguous: s.is_none() });
        let above = s.unwrap_or(e.p >= opts.level);
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdEstimate { low: lo, high: hi, probes })
}

/// Bond threshold of a lattice family: the bond probability at which the
/// crossing probability passes `opts.level`.
pub fn estimate_threshold(family: &BondLattice, opts: &ThresholdOptions) -> Result<ThresholdEstimate> {
    bisect(|p, rng| family.crossing(p, rng), 0.0, 1.0, true, opts)
}

/// Crossing probability at each of `points`.
pub fn crossing_curve(family: &BondLattice, points: &[f64], trials: u64, seed: u64) -> Vec<ProbabilityEstimate> {
    let opts = ThresholdOptions { trials, seed, ..Default::default() };
    let f = |p: f64, rng: &mut TrialRng| family.crossing(p, rng);
    points.iter().enumerate().map(|(i, &p)| probe(&f, p, i as u64, &opts)).collect()
}
