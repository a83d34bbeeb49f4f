//! Relative-time multiplexing: pair photons of two streams by delaying one
//! of them by at most `D` bins.
//!
//! With delays on one stream only, photon `a` pairs with `b` when
//! `0 <= t_b - t_a <= D`. Each `a` then covers the window
//! `[t_a, t_a + D]`, and sweeping the `b` photons in time order while
//! always taking the unmatched `a` whose window closes first gives a
//! maximum matching: any optimal matching can be swapped, one `b` at a
//! time, into the greedy one without losing a pair. With delays on both
//! streams the compatibility is `|t_a - t_b| <= D`, and pairing the
//! earliest photon with the earliest compatible partner is optimal by the
//! same exchange.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::network::{route_with_delays, DelayNetwork};
use super::stream::PhotonStream;
use crate::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DelaySides {
    /// Only the first stream carries a delay network.
    #[default]
    First,
    Second,
    Both,
}

impl DelaySides {
    fn may_delay(self, first: bool) -> bool {
        match self {
            DelaySides::First => first,
            DelaySides::Second => !first,
            DelaySides::Both => true,
        }
    }
}

/// Photons at bins `a` and `b` meet at `max(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Pair {
    pub a: usize,
    pub b: usize,
}

impl Pair {
    pub fn delay(&self) -> usize {
        self.a.abs_diff(self.b)
    }
}

fn compatible(ta: usize, tb: usize, d: usize, sides: DelaySides) -> bool {
    if ta == tb {
        return true;
    }
    let first_earlier = ta < tb;
    sides.may_delay(first_earlier) && ta.abs_diff(tb) <= d
}

/// The sliding-window rule: take the earliest unmatched photon of either
/// stream; if it may be delayed and the other stream has a photon at most
/// `d` bins after it, pair the two, otherwise discard it.
pub fn sliding_window_match(a: &PhotonStream, b: &PhotonStream, d: usize, sides: DelaySides) -> Vec<Pair> {
    sweep(&a.photons(), &b.photons(), d, sides)
}

fn sweep(ta: &[usize], tb: &[usize], d: usize, sides: DelaySides) -> Vec<Pair> {
    let (mut i, mut j) = (0, 0);
    let mut pairs = Vec::new();
    while i < ta.len() && j < tb.len() {
        let (x, y) = (ta[i], tb[j]);
        if compatible(x, y, d, sides) {
            pairs.push(Pair { a: x, b: y });
            i += 1;
            j += 1;
        } else if x < y {
            i += 1;
        } else {
            j += 1;
        }
    }
    pairs
}

/// Maximum matching under the delay rule, ignoring collisions.
pub fn maximum_matching(ta: &[usize], tb: &[usize], d: usize, sides: DelaySides) -> Vec<Pair> {
    match sides {
        DelaySides::Both => sweep(ta, tb, d, sides),
        DelaySides::First => one_sided(ta, tb, d).into_iter().map(|(x, y)| Pair { a: x, b: y }).collect(),
        DelaySides::Second => one_sided(tb, ta, d).into_iter().map(|(y, x)| Pair { a: x, b: y }).collect(),
    }
}

/// `early` photons wait for `late` ones.
fn one_sided(early: &[usize], late: &[usize], d: usize) -> Vec<(usize, usize)> {
    let mut open: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    let mut pairs = Vec::new();
    for &t in late {
        while next < early.len() && early[next] <= t {
            open.push_back(early[next]);
            next += 1;
        }
        while open.front().is_some_and(|&x| x + d < t) {
            open.pop_front();
        }
        if let Some(x) = open.pop_front() {
            pairs.push((x, t));
        }
    }
    pairs
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    /// Pairs that survive the delay network.
    pub pairs: Vec<Pair>,
    /// Size of the first, collision-blind maximum matching.
    pub max_matching: usize,
    pub collisions: usize,
    /// Photons destroyed in collisions.
    pub dropped: usize,
    pub rounds: usize,
}

impl MatchResult {
    pub fn pair_yield(&self, bins: usize) -> f64 {
        self.pairs.len() as f64 / bins as f64
    }
}

/// Loop and bypass slots a photon from `bin` with delay `d` occupies, one
/// per stage: after stage `k` it sits at `bin + (d mod 2^(k+1))`.
fn route_slots(bin: usize, d: usize, stages: u32) -> impl Iterator<Item = (u32, usize)> {
    (0..stages).map(move |k| (k, bin + d % (1usize << (k + 1))))
}

/// Delays for the photons of one stream, empty when it has no network.
/// Zero-delay photons of a networked stream still pass every bypass.
fn assignments(pairs: &[Pair], first: bool, sides: DelaySides) -> BTreeMap<usize, usize> {
    if !sides.may_delay(first) {
        return BTreeMap::new();
    }
    pairs
        .iter()
        .map(|p| if first { (p.a, p.b.wrapping_sub(p.a)) } else { (p.b, p.a.wrapping_sub(p.b)) })
        .filter(|&(_, d)| d <= usize::MAX / 2)
        .collect()
}

/// Matching planned against the delay network. Photon times are known
/// before anything is switched, so each late photon, in time order, takes
/// the earliest waiting partner whose route through the cascade is still
/// free. Nothing collides and no photon is lost in transit. Without any
/// blocked route this is the maximum matching.
pub fn matching_rmux(
    a: &PhotonStream,
    b: &PhotonStream,
    network: &DelayNetwork,
    sides: DelaySides,
) -> Result<MatchResult> {
    let d = network.max_delay();
    let (ta, tb) = (a.photons(), b.photons());
    let max_matching = maximum_matching(&ta, &tb, d, sides).len();
    let mut used: [HashSet<(u32, usize)>; 2] = [HashSet::new(), HashSet::new()];
    let mut fits = |routes: &[(usize, usize, usize)]| -> bool {
        let slots: Vec<(usize, (u32, usize))> = routes
            .iter()
            .filter(|r| sides.may_delay(r.0 == 0))
            .flat_map(|&(side, bin, delay)| route_slots(bin, delay, network.stages).map(move |s| (side, s)))
            .collect();
        if slots.iter().any(|(side, s)| used[*side].contains(s)) {
            return false;
        }
        for (side, s) in slots {
            used[side].insert(s);
        }
        true
    };
    let mut pairs = Vec::new();
    // photons waiting for a partner: (time, stream index)
    let mut open: Vec<(usize, usize)> = Vec::new();
    let mut events: Vec<(usize, usize)> = ta.iter().map(|&t| (t, 0)).chain(tb.iter().map(|&t| (t, 1))).collect();
    events.sort_unstable();
    for (t, side) in events {
        open.retain(|&(u, _)| u + d >= t);
        let found = open.iter().position(|&(u, other)| {
            other != side && (u == t || sides.may_delay(other == 0)) && fits(&[(other, u, t - u), (side, t, 0)])
        });
        match found {
            Some(i) => {
                let (u, _) = open.remove(i);
                pairs.push(if side == 1 { Pair { a: u, b: t } } else { Pair { a: t, b: u } });
            }
            None => open.push((t, side)),
        }
    }
    pairs.sort_unstable();
    let ra = route_with_delays(a, &assignments(&pairs, true, sides), network)?;
    let rb = route_with_delays(b, &assignments(&pairs, false, sides), network)?;
    debug_assert!(ra.collisions.is_empty() && rb.collisions.is_empty());
    Ok(MatchResult {
        pairs,
        max_matching,
        collisions: ra.collisions.len() + rb.collisions.len(),
        dropped: ra.dropped.len() + rb.dropped.len(),
        rounds: 1,
    })
}

/// Sliding-window pairs routed once through `network`; a pair loses
/// either photon to a collision and is gone.
pub fn sliding_rmux(
    a: &PhotonStream,
    b: &PhotonStream,
    network: &DelayNetwork,
    sides: DelaySides,
) -> Result<MatchResult> {
    let pairs = sliding_window_match(a, b, network.max_delay(), sides);
    let max_matching = pairs.len();
    let ra = route_with_delays(a, &assignments(&pairs, true, sides), network)?;
    let rb = route_with_delays(b, &assignments(&pairs, false, sides), network)?;
    let pairs: Vec<Pair> = pairs
        .into_iter()
        .filter(|p| ra.dropped.binary_search(&p.a).is_err() && rb.dropped.binary_search(&p.b).is_err())
        .collect();
    Ok(MatchResult {
        pairs,
        max_matching,
        collisions: ra.collisions.len() + rb.collisions.len(),
        dropped: ra.dropped.len() + rb.dropped.len(),
        rounds: 1,
    })
}

/// Groups of one photon per stream, built by matching each further stream
/// against the groups so far. The first stream is never delayed; every
/// other photon waits up to `network.max_delay()` bins for its group.
pub fn multi_stream_match(streams: &[PhotonStream], network: &DelayNetwork) -> Result<Vec<Vec<usize>>> {
    let Some(first) = streams.first() else {
        return Ok(Vec::new());
    };
    let bins = first.bin_count();
    let mut groups: Vec<Vec<usize>> = first.photons().into_iter().map(|t| vec![t]).collect();
    for s in &streams[1..] {
        let anchor = PhotonStream::from_bins(first.id, bins.max(s.bin_count()), &groups.iter().map(|g| g[0]).collect::<Vec<_>>())?;
        let m = matching_rmux(s, &anchor, network, DelaySides::First)?;
        let by_anchor: BTreeMap<usize, usize> = m.pairs.iter().map(|p| (p.b, p.a)).collect();
        groups = groups
            .into_iter()
            .filter_map(|mut g| {
                by_anchor.get(&g[0]).map(|&t| {
                    g.push(t);
                    g
                })
            })
            .collect();
    }
    Ok(groups)
}
