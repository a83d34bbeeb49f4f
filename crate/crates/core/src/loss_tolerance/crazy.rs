use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph_state::GraphRegister;
use crate::{Error, Result};

/// A wire of `n` columns, each holding `l` qubits joined to every qubit of
/// the neighbouring columns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrazyGraphSpec {
    pub n: usize,
    pub l: usize,
    /// Per-qubit loss probability.
    pub loss: f64,
    /// Per-qubit probability that the X outcome is flipped.
    #[serde(default)]
    pub p_z: f64,
}

impl CrazyGraphSpec {
    pub fn new(n: usize, l: usize, loss: f64) -> Self {
        CrazyGraphSpec { n, l, loss, p_z: 0.0 }
    }

    pub fn with_z_noise(mut self, p_z: f64) -> Self {
        self.p_z = p_z;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.l == 0 {
            return Err(Error::Spec(format!("need N, L >= 1, got N={} L={}", self.n, self.l)));
        }
        for (name, x) in [("loss", self.loss), ("p_z", self.p_z)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Spec(format!("{name} must lie in [0, 1], got {x}")));
            }
        }
        Ok(())
    }

    /// Vertex id of qubit `i` of column `c`.
    pub fn vertex(&self, c: usize, i: usize) -> usize {
        c * self.l + i
    }
}

pub fn build_crazy_graph(spec: &CrazyGraphSpec) -> Result<GraphRegister> {
    spec.validate()?;
    let l = spec.l;
    let mut edges = Vec::with_capacity((spec.n - 1) * l * l);
    for c in 1..spec.n {
        for i in 0..l {
            for j in 0..l {
                edges.push((spec.vertex(c - 1, i), spec.vertex(c, j)));
            }
        }
    }
    GraphRegister::from_edges(spec.n * l, &edges)
}

/// Column count for a wire of at least `min_columns` columns. Every
/// X-measured column applies a Hadamard, so an odd count carries one.
pub fn wire_column_count(min_columns: usize, hadamard: bool) -> usize {
    let n = min_columns.max(1);
    if (n % 2 == 1) == hadamard {
        n
    } else {
        n + 1
    }
}

/// The wire teleports as long as every column keeps one qubit.
pub fn teleport_success_prob(spec: &CrazyGraphSpec) -> Result<f64> {
    spec.validate()?;
    Ok((1.0 - spec.loss.powi(spec.l as i32)).powi(spec.n as i32))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TeleportStats {
    pub trials: u64,
    pub successes: u64,
    /// Successful trials whose decoded value came out wrong.
    pub logical_flips: u64,
    /// Column votes that were tied and settled by a coin.
    pub ties: u64,
}

impl TeleportStats {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Logical flips per successful trial.
    pub fn flip_rate(&self) -> f64 {
        if self.successes == 0 {
            0.0
        } else {
            self.logical_flips as f64 / self.successes as f64
        }
    }

    /// Tied votes per successful trial.
    pub fn tie_rate(&self) -> f64 {
        if self.successes == 0 {
            0.0
        } else {
            self.ties as f64 / self.successes as f64
        }
    }
}

/// Monte Carlo over loss patterns. A column's value is the majority of its
/// surviving X outcomes, each flipped with probability `p_z`; ties go to a
/// fair coin. A trial flips logically when any column votes wrong.
pub fn simulate_teleport(spec: &CrazyGraphSpec, rng: &mut impl Rng, trials: u64) -> Result<TeleportStats> {
    spec.validate()?;
    if trials == 0 {
        return Err(Error::Spec("need at least one trial".into()));
    }
    let mut st = TeleportStats { trials, ..Default::default() };
    'trial: for _ in 0..trials {
        let mut wrong = false;
        let mut ties = 0;
        for _ in 0..spec.n {
            let alive = (0..spec.l).filter(|_| !rng.random_bool(spec.loss)).count();
            if alive == 0 {
                continue 'trial;
            }
            if spec.p_z > 0.0 {
                let flips = (0..alive).filter(|_| rng.random_bool(spec.p_z)).count();
                let column_wrong = match (2 * flips).cmp(&alive) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => {
                        ties += 1;
                        rng.random::<bool>()
                    }
                };
                wrong |= column_wrong;
            }
        }
        st.successes += 1;
        st.ties += ties;
        st.logical_flips += u64::from(wrong);
    }
    Ok(st)
}
