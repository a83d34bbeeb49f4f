use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const RLE_HEADER: &str = "photon-stream v1";

/// Time-binned photon arrivals from one heralded source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonStream {
    pub id: u32,
    /// Photon probability per bin the stream was drawn with.
    pub p: f64,
    pub occupancy: Vec<bool>,
}

impl PhotonStream {
    pub fn new(id: u32, p: f64, occupancy: Vec<bool>) -> Self {
        PhotonStream { id, p, occupancy }
    }

    /// Stream with photons at the given bins.
    pub fn from_bins(id: u32, bins: usize, photons: &[usize]) -> Result<Self> {
        let mut occupancy = vec![false; bins];
        for &t in photons {
            if t >= bins {
                return Err(Error::Spec(format!("photon at bin {t} in a stream of {bins} bins")));
            }
            occupancy[t] = true;
        }
        Ok(PhotonStream { id, p: f64::NAN, occupancy })
    }

    pub fn sample(id: u32, bins: usize, p: f64, rng: &mut impl Rng) -> Self {
        let occupancy = (0..bins).map(|_| rng.random_bool(p)).collect();
        PhotonStream { id, p, occupancy }
    }

    pub fn bin_count(&self) -> usize {
        self.occupancy.len()
    }

    /// Bins holding a photon, ascending.
    pub fn photons(&self) -> Vec<usize> {
        self.occupancy.iter().enumerate().filter(|(_, &o)| o).map(|(t, _)| t).collect()
    }

    pub fn photon_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }

    /// Run-length text: a header line, then runs such as `12.` (twelve
    /// empty bins) and `3#` (three occupied bins).
    pub fn to_rle(&self) -> String {
        let mut out = format!("{RLE_HEADER} id={} bins={} p={}\n", self.id, self.bin_count(), self.p);
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.occupancy.len() {
            let v = self.occupancy[i];
            let j = self.occupancy[i..].iter().position(|&o| o != v).map_or(self.occupancy.len(), |k| i + k);
            runs.push(format!("{}{}", j - i, if v { '#' } else { '.' }));
            i = j;
        }
        for chunk in runs.chunks(16) {
            let _ = writeln!(out, "{}", chunk.join(" "));
        }
        out
    }

    pub fn from_rle(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        });
        let parse_err = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let (hl, header) = lines.next().ok_or_else(|| Error::EmptyInput("photon stream".into()))?;
        let rest = header
            .trim()
            .strip_prefix(RLE_HEADER)
            .ok_or_else(|| parse_err(hl, format!("expected header `{RLE_HEADER} ...`")))?;
        let (mut id, mut bins, mut p) = (0u32, None, f64::NAN);
        for field in rest.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| parse_err(hl, format!("bad header field `{field}`")))?;
            let bad = |_| parse_err(hl, format!("bad value in `{field}`"));
            match k {
                "id" => id = v.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                "bins" => bins = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "p" => p = v.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                _ => return Err(parse_err(hl, format!("unknown header field `{k}`"))),
            }
        }
        let bins = bins.ok_or_else(|| parse_err(hl, "header lacks bins=".into()))?;
        let mut occupancy = Vec::with_capacity(bins);
        for (ln, line) in lines {
            for tok in line.split_whitespace() {
                let (count, mark) = tok.split_at(tok.len() - tok.chars().last().map_or(0, char::len_utf8));
                let value = match mark {
                    "#" => true,
                    "." => false,
                    _ => return Err(parse_err(ln, format!("run `{tok}` must end in `#` or `.`"))),
                };
                let n: usize = count.parse().map_err(|_| parse_err(ln, format!("bad run length in `{tok}`")))?;
                if occupancy.len() + n > bins {
                    return Err(parse_err(ln, format!("runs exceed the declared {bins} bins")));
                }
                occupancy.extend(std::iter::repeat_n(value, n));
            }
        }
        if occupancy.len() != bins {
            return Err(Error::Shape(format!("runs cover {} bins, header says {bins}", occupancy.len())));
        }
        Ok(PhotonStream { id, p, occupancy })
    }
}

/// Photon probability after block multiplexing `2^s` bins into one.
pub fn standard_mux_prob(p: f64, s: u32) -> f64 {
    1.0 - (1.0 - p).powi(1 << s)
}

/// Pairs per original bin when two block-multiplexed streams feed a
/// beamsplitter.
pub fn standard_mux_pair_yield(p: f64, s: u32) -> f64 {
    let q = standard_mux_prob(p, s);
    q * q / (1u64 << s) as f64
}

/// Per-block occupancy after block multiplexing; a trailing partial
/// block is dropped.
pub fn block_multiplex(stream: &PhotonStream, s: u32) -> Vec<bool> {
    stream.occupancy.chunks_exact(1 << s).map(|b| b.iter().any(|&o| o)).collect()
}
