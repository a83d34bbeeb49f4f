use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dump-the-pump cascade: one pump pulse passes `crystals` crystals in
/// turn and stops at the first heralded pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DtpParams {
    /// Pair emission probability per crystal.
    pub q: f64,
    pub crystals: u32,
    /// Transmission of the heralded photon through one later crystal.
    #[serde(default = "one")]
    pub t: f64,
}

fn one() -> f64 {
    1.0
}

impl DtpParams {
    pub fn new(q: f64, crystals: u32) -> Self {
        DtpParams { q, crystals, t: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.q) || !(0.0..=1.0).contains(&self.t) {
            return Err(Error::Spec(format!("q and t must lie in [0, 1], got {} and {}", self.q, self.t)));
        }
        if self.crystals == 0 {
            return Err(Error::Spec("at least one crystal is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DtpProbabilities {
    /// Some crystal heralded a pair.
    pub heralded: f64,
    /// The heralded photon also made it out of the remaining crystals.
    pub delivered: f64,
}

pub fn dtp_success_prob(params: &DtpParams) -> Result<DtpProbabilities> {
    params.validate()?;
    let DtpParams { q, crystals: k, t } = *params;
    let heralded = 1.0 - (1.0 - q).powi(k as i32);
    let delivered = (1..=k).map(|i| q * (1.0 - q).powi(i as i32 - 1) * t.powi((k - i) as i32)).sum();
    Ok(DtpProbabilities { heralded, delivered })
}

/// Monte Carlo of one pump pulse per trial. Returns heralded and
/// delivered counts.
pub fn simulate_dtp(params: &DtpParams, pulses: u64, rng: &mut impl Rng) -> Result<(u64, u64)> {
    params.validate()?;
    let (mut heralded, mut delivered) = (0, 0);
    for _ in 0..pulses {
        if let Some(i) = (0..params.crystals).find(|_| rng.random_bool(params.q)) {
            heralded += 1;
            if (i + 1..params.crystals).all(|_| rng.random_bool(params.t)) {
                delivered += 1;
            }
        }
    }
    Ok((heralded, delivered))
}
