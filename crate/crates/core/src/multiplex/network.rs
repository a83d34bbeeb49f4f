use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stream::PhotonStream;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwitchModel {
    pub loss_db_per_pass: f64,
    pub extinction_db: f64,
    /// Radians squared.
    pub phase_jitter_variance: f64,
}

impl Default for SwitchModel {
    fn default() -> Self {
        SwitchModel { loss_db_per_pass: 0.0, extinction_db: -50.0, phase_jitter_variance: 0.0 }
    }
}

impl SwitchModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.loss_db_per_pass >= 0.0) {
            return Err(Error::Spec(format!("switch loss must be >= 0 dB, got {}", self.loss_db_per_pass)));
        }
        if !(self.phase_jitter_variance >= 0.0) {
            return Err(Error::Spec(format!("phase jitter variance must be >= 0, got {}", self.phase_jitter_variance)));
        }
        extinction_to_z_error(self.extinction_db).map(|_| ())
    }

    pub fn transmission_per_pass(&self) -> f64 {
        10f64.powf(-self.loss_db_per_pass / 10.0)
    }

    /// Z error per pass: leakage from finite extinction plus small-angle
    /// phase jitter, `sin^2(dphi) ~ dphi^2`.
    pub fn z_error_per_pass(&self) -> f64 {
        let leak = extinction_to_z_error(self.extinction_db).unwrap_or(1.0);
        (leak + self.phase_jitter_variance).min(1.0)
    }
}

/// Worst-case Z error rate for a switch with the given extinction ratio,
/// attributing all of it to phase noise.
pub fn extinction_to_z_error(extinction_db: f64) -> Result<f64> {
    if !(extinction_db <= 0.0) {
        return Err(Error::Spec(format!("extinction ratio must be <= 0 dB, got {extinction_db}")));
    }
    Ok(10f64.powf(extinction_db / 10.0))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionPolicy {
    /// Every photon in a collision is lost.
    #[default]
    DropAll,
    /// The photon that entered the network first survives.
    KeepFirst,
}

/// Binary delay cascade: stage `k` holds a loop of `2^k` bins and a bypass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayNetwork {
    /// `S`: number of delay loops.
    pub stages: u32,
    pub switch: SwitchModel,
    pub policy: CollisionPolicy,
}

impl DelayNetwork {
    pub fn new(stages: u32) -> Self {
        DelayNetwork { stages, switch: SwitchModel::default(), policy: CollisionPolicy::DropAll }
    }

    pub fn with_policy(mut self, policy: CollisionPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn max_delay(&self) -> usize {
        (1usize << self.stages) - 1
    }

    pub fn loop_lengths(&self) -> Vec<usize> {
        (0..self.stages).map(|k| 1usize << k).collect()
    }

    /// Switch passes for any delay: one per stage plus the input switch.
    pub fn transmission(&self) -> f64 {
        self.switch.transmission_per_pass().powi(self.stages as i32 + 1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Collision {
    /// Stage whose output switch saw the clash.
    pub stage: u32,
    /// Bin at that switch.
    pub bin: usize,
    /// Input bins of the photons involved.
    pub photons: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RouteResult {
    /// Output occupancy, `bins + max_delay` long.
    pub output: Vec<bool>,
    /// `(input bin, output bin)` of every delivered photon.
    pub delivered: Vec<(usize, usize)>,
    pub collisions: Vec<Collision>,
    /// Input bins of photons lost to collisions.
    pub dropped: Vec<usize>,
    /// Photons with no delay assigned.
    pub discarded: usize,
}

/// Sends each assigned photon through the cascade. After stage `k` a
/// photon from bin `b` with delay `d` sits at bin `b + (d mod 2^(k+1))`;
/// two photons at the same switch output in the same bin collide.
pub fn route_with_delays(
    stream: &PhotonStream,
    assignments: &BTreeMap<usize, usize>,
    network: &DelayNetwork,
) -> Result<RouteResult> {
    let max = network.max_delay();
    for (&bin, &d) in assignments {
        if d > max {
            return Err(Error::Spec(format!("delay {d} for bin {bin} exceeds the network maximum {max}")));
        }
        if !stream.occupancy.get(bin).copied().unwrap_or(false) {
            return Err(Error::Spec(format!("delay assigned to bin {bin}, which holds no photon")));
        }
    }
    let discarded = stream.photon_count() - assignments.len();
    // (input bin, delay) of photons still in flight
    let mut live: Vec<(usize, usize)> = assignments.iter().map(|(&b, &d)| (b, d)).collect();
    let mut collisions = Vec::new();
    let mut dropped = Vec::new();
    for k in 0..network.stages {
        let modulus = 1usize << (k + 1);
        let mut at: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for &(b, d) in &live {
            at.entry(b + d % modulus).or_default().push((b, d));
        }
        live.clear();
        for (bin, group) in at {
            if group.len() == 1 {
                live.push(group[0]);
                continue;
            }
            collisions.push(Collision { stage: k, bin, photons: group.iter().map(|p| p.0).collect() });
            let keep = match network.policy {
                CollisionPolicy::DropAll => None,
                CollisionPolicy::KeepFirst => group.iter().min_by_key(|p| p.0).copied(),
            };
            for p in group {
                if Some(p) == keep {
                    live.push(p);
                } else {
                    dropped.push(p.0);
                }
            }
        }
    }
    live.sort_unstable();
    dropped.sort_unstable();
    let mut output = vec![false; stream.bin_count() + max];
    let delivered: Vec<(usize, usize)> = live.iter().map(|&(b, d)| (b, b + d)).collect();
    for &(_, t) in &delivered {
        output[t] = true;
    }
    Ok(RouteResult { output, delivered, collisions, dropped, discarded })
}
