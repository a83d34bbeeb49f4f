//! Probabilistic fusion of graph-state photons.
//!
//! All rules act in the graph basis: the local Cliffords and frames of the
//! two fused photons are ignored, as for [`GraphRegister::measure_graph_z`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph_state::{Clifford, GraphRegister, Pauli};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionKind {
    TypeI,
    TypeII,
    BoostedTypeII,
}

impl FusionKind {
    pub fn default_success_prob(self) -> f64 {
        match self {
            FusionKind::TypeI | FusionKind::TypeII => 0.5,
            FusionKind::BoostedTypeII => 0.75,
        }
    }

    /// Photons spent on boosting per attempt.
    pub fn default_ancilla_cost(self) -> u32 {
        match self {
            FusionKind::BoostedTypeII => 2,
            _ => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionParams {
    pub kind: FusionKind,
    /// Success probability given that both photons arrived.
    pub success_prob: f64,
    /// Transmission of each photon entering the gate.
    pub transmission: f64,
    pub ancilla_cost: u32,
}

impl FusionParams {
    pub fn new(kind: FusionKind) -> Self {
        FusionParams {
            kind,
            success_prob: kind.default_success_prob(),
            transmission: 1.0,
            ancilla_cost: kind.default_ancilla_cost(),
        }
    }

    pub fn type_i() -> Self {
        Self::new(FusionKind::TypeI)
    }

    pub fn type_ii() -> Self {
        Self::new(FusionKind::TypeII)
    }

    pub fn boosted() -> Self {
        Self::new(FusionKind::BoostedTypeII)
    }

    pub fn with_success_prob(mut self, p: f64) -> Self {
        self.success_prob = p;
        self
    }

    pub fn with_transmission(mut self, eta: f64) -> Self {
        self.transmission = eta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("success_prob", self.success_prob), ("transmission", self.transmission)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("fusion {name} must be in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for FusionParams {
    fn default() -> Self {
        Self::boosted()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionResult {
    Success,
    Failure,
    LossHerald,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FusionOutcome {
    pub result: FusionResult,
    /// Vertices the gate destroyed. A successful Type-I fusion only
    /// consumes `b`.
    pub consumed: [Option<usize>; 2],
    /// Boost photons spent on this attempt.
    pub ancilla_photons: u32,
}

/// Per-bond retention probability `eta^2 * lambda`.
pub fn expected_bond_probability(params: &FusionParams) -> f64 {
    params.transmission * params.transmission * params.success_prob
}

/// Draws the herald and applies the matching graph rule.
pub fn fuse(reg: &mut GraphRegister, a: usize, b: usize, params: &FusionParams, rng: &mut impl Rng) -> Result<FusionOutcome> {
    check_pair(reg, a, b)?;
    params.validate()?;
    let eta2 = params.transmission * params.transmission;
    let result = if !rng.random_bool(eta2) {
        FusionResult::LossHerald
    } else if rng.random_bool(params.success_prob) {
        FusionResult::Success
    } else {
        FusionResult::Failure
    };
    fuse_with_result(reg, a, b, params, result, rng)
}

/// Applies a given herald; measurement signs still come from `rng`.
pub fn fuse_with_result(
    reg: &mut GraphRegister,
    a: usize,
    b: usize,
    params: &FusionParams,
    result: FusionResult,
    rng: &mut impl Rng,
) -> Result<FusionOutcome> {
    check_pair(reg, a, b)?;
    let mut consumed = [Some(a), Some(b)];
    match result {
        FusionResult::LossHerald => {
            reg.remove_lost(a)?;
            reg.remove_lost(b)?;
        }
        FusionResult::Failure => {
            reg.measure_graph_z(a, rng)?;
            reg.measure_graph_z(b, rng)?;
        }
        FusionResult::Success => match params.kind {
            FusionKind::TypeI => {
                type_i_success(reg, a, b, rng.random())?;
                consumed[0] = None;
            }
            FusionKind::TypeII | FusionKind::BoostedTypeII => {
                type_ii_success(reg, a, b, rng.random(), rng.random())?;
            }
        },
    }
    Ok(FusionOutcome { result, consumed, ancilla_photons: params.ancilla_cost })
}

fn check_pair(reg: &GraphRegister, a: usize, b: usize) -> Result<()> {
    reg.check(a)?;
    reg.check(b)?;
    if a == b {
        return Err(Error::VertexState { vertex: a, reason: "cannot fuse a vertex with itself" });
    }
    Ok(())
}

/// Successful Type-II fusion with measured signs `s1` for `X_a Z_b` and
/// `s2` for `Z_a X_b` (`true` means -1).
///
/// Every neighbour of `a` is toggled against every neighbour of `b`. A
/// common neighbour picks up a Z, neighbours of `a` pick up `Z^s2` and
/// neighbours of `b` pick up `Z^s1`. If `a` and `b` were adjacent the
/// result is not a graph state and the affected frames become unknown.
///
/// An unknown frame is read as a possible Z error. On `a` it flips `s1`,
/// so the frames of `b`'s neighbours become unknown, and vice versa.
pub fn type_ii_success(reg: &mut GraphRegister, a: usize, b: usize, s1: bool, s2: bool) -> Result<()> {
    check_pair(reg, a, b)?;
    let adjacent = reg.has_edge(a, b);
    let (a_known, b_known) = (reg.frame(a).is_some(), reg.frame(b).is_some());
    let na: Vec<usize> = reg.neighbors(a).iter().map(|&v| v as usize).filter(|&v| v != b).collect();
    let nb: Vec<usize> = reg.neighbors(b).iter().map(|&v| v as usize).filter(|&v| v != a).collect();
    for &u in &na {
        for &w in &nb {
            if u != w {
                reg.toggle_edge(u, w);
            } else {
                reg.push_frame(u, Pauli::Z);
            }
        }
    }
    for &u in &na {
        if s2 {
            reg.push_frame(u, Pauli::Z);
        }
    }
    for &w in &nb {
        if s1 {
            reg.push_frame(w, Pauli::Z);
        }
    }
    if adjacent {
        for &v in na.iter().chain(&nb) {
            reg.forget_frame(v);
        }
    }
    if !a_known {
        nb.iter().for_each(|&w| reg.forget_frame(w));
    }
    if !b_known {
        na.iter().for_each(|&u| reg.forget_frame(u));
    }
    reg.retire(a, Clifford::h());
    reg.retire(b, Clifford::h());
    Ok(())
}

/// Successful Type-I fusion with parity outcome `m` for `Z_a Z_b`.
///
/// `b`'s neighbourhood is added onto `a` (symmetric difference), its
/// neighbours pick up `Z^m`, and `b` is left in `|m>`. A possible Z error
/// on `b` moves to `a`.
pub fn type_i_success(reg: &mut GraphRegister, a: usize, b: usize, m: bool) -> Result<()> {
    check_pair(reg, a, b)?;
    let adjacent = reg.has_edge(a, b);
    if reg.frame(b).is_none() {
        reg.forget_frame(a);
    }
    let nb: Vec<usize> = reg.neighbors(b).iter().map(|&v| v as usize).filter(|&v| v != a).collect();
    if adjacent && !m {
        reg.push_frame(a, Pauli::Z);
    }
    for &w in &nb {
        reg.toggle_edge(a, w);
        if m {
            reg.push_frame(w, Pauli::Z);
        }
    }
    let dead = if m { Clifford::h().then_after(Clifford::z()) } else { Clifford::h() };
    reg.retire(b, dead);
    Ok(())
}
