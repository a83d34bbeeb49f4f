//! Dense bosonic linear optics for a handful of photons.
//!
//! Beamsplitter convention on modes `(p, q)`:
//!
//! ```text
//! U_pp = cos t          U_pq = i e^{i phi} sin t
//! U_qp = i e^{-i phi} sin t   U_qq = cos t
//! ```
//!
//! Creation operators transform as `a_j^+ -> sum_k U_kj a_k^+`, so a photon
//! in mode 0 leaving a balanced splitter (`t = pi/4`, `phi = 0`) is
//! `(|1,0> + i|0,1>)/sqrt(2)`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

pub const MAX_PHOTONS: usize = 6;
pub const MAX_MODES: usize = 12;

const NORM_TOL: f64 = 1e-10;

pub type Occupation = Vec<u8>;

/// Superposition of occupation vectors over a fixed set of modes.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    modes: usize,
    amps: BTreeMap<Occupation, Complex64>,
}

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 || modes > MAX_MODES {
        return Err(Error::Capacity(format!(
            "{modes} modes, oracle supports 1..={MAX_MODES}"
        )));
    }
    Ok(())
}

fn total(occ: &[u8]) -> usize {
    occ.iter().map(|&n| n as usize).sum()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl FockState {
    pub fn vacuum(modes: usize) -> Result<Self> {
        Self::basis(&vec![0; modes])
    }

    pub fn basis(occ: &[u8]) -> Result<Self> {
        Self::from_terms(occ.len(), [(occ.to_vec(), Complex64::new(1.0, 0.0))])
    }

    /// Builds a state from `(occupation, amplitude)` terms. Repeated
    /// occupations are summed. The result must be normalized.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        check_modes(modes)?;
        let mut amps: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, a) in terms {
            if occ.len() != modes {
                return Err(Error::Shape(format!(
                    "occupation of length {} in a {modes}-mode state",
                    occ.len()
                )));
            }
            if total(&occ) > MAX_PHOTONS {
                return Err(Error::Capacity(format!(
                    "{} photons, oracle supports at most {MAX_PHOTONS}",
                    total(&occ)
                )));
            }
            *amps.entry(occ).or_default() += a;
        }
        amps.retain(|_, a| a.norm_sqr() > 0.0);
        let s = FockState { modes, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Numeric(format!("state norm {norm} is not 1")));
        }
        Ok(s)
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn amplitude(&self, occ: &[u8]) -> Complex64 {
        self.amps.get(occ).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amps.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Largest photon number over all terms.
    pub fn max_photons(&self) -> usize {
        self.amps.keys().map(|o| total(o)).max().unwrap_or(0)
    }

    /// Tensor product; modes of `other` are appended after ours.
    pub fn tensor(&self, other: &FockState) -> Result<FockState> {
        let modes = self.modes + other.modes;
        let mut terms = Vec::with_capacity(self.amps.len() * other.amps.len());
        for (o1, a1) in &self.amps {
            for (o2, a2) in &other.amps {
                let mut occ = o1.clone();
                occ.extend_from_slice(o2);
                terms.push((occ, a1 * a2));
            }
        }
        FockState::from_terms(modes, terms)
    }

    /// Largest deviation between two states' amplitudes.
    pub fn distance(&self, other: &FockState) -> f64 {
        let mut worst: f64 = 0.0;
        for (o, a) in &self.amps {
            worst = worst.max((a - other.amplitude(o)).norm());
        }
        for (o, a) in &other.amps {
            worst = worst.max((a - self.amplitude(o)).norm());
        }
        worst
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (occ, a) in &self.amps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let digits: Vec<String> = occ.iter().map(|n| n.to_string()).collect();
            write!(f, "({:.6}{:+.6}i)|{}>", a.re, a.im, digits.join(","))?;
        }
        Ok(())
    }
}

/// Primitive optical element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    Beamsplitter { m1: usize, m2: usize, theta: f64, phi: f64 },
    PhaseShift { m: usize, phi: f64 },
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Element::Beamsplitter { m1, m2, theta, phi } => {
                write!(f, "[bs, {m1}, {m2}, {theta}, {phi}]")
            }
            Element::PhaseShift { m, phi } => write!(f, "[ps, {m}, {phi}]"),
        }
    }
}

/// Passive linear network described by its mode unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct Interferometer {
    modes: usize,
    /// Row-major `modes x modes`.
    u: Vec<Complex64>,
}

impl Interferometer {
    pub fn identity(modes: usize) -> Result<Self> {
        check_modes(modes)?;
        let mut u = vec![Complex64::default(); modes * modes];
        for i in 0..modes {
            u[i * modes + i] = Complex64::new(1.0, 0.0);
        }
        Ok(Interferometer { modes, u })
    }

    pub fn from_elements(modes: usize, elements: &[Element]) -> Result<Self> {
        let mut itf = Self::identity(modes)?;
        for e in elements {
            itf.push(*e)?;
        }
        Ok(itf)
    }

    /// Builds from a raw unitary (row-major). Fails if it is not unitary.
    pub fn from_matrix(modes: usize, u: Vec<Complex64>) -> Result<Self> {
        check_modes(modes)?;
        if u.len() != modes * modes {
            return Err(Error::Shape(format!(
                "matrix has {} entries, expected {}",
                u.len(),
                modes * modes
            )));
        }
        let itf = Interferometer { modes, u };
        let err = itf.unitarity_error();
        if err > NORM_TOL {
            return Err(Error::Numeric(format!("matrix is not unitary (deviation {err:e})")));
        }
        Ok(itf)
    }

    pub fn balanced_beamsplitter(modes: usize, m1: usize, m2: usize) -> Result<Self> {
        Self::from_elements(modes, &[Element::Beamsplitter { m1, m2, theta: FRAC_PI_4, phi: 0.0 }])
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.u[row * self.modes + col]
    }

    /// Appends an element (applied after everything already present).
    pub fn push(&mut self, e: Element) -> Result<()> {
        let n = self.modes;
        match e {
            Element::Beamsplitter { m1, m2, theta, phi } => {
                if m1 >= n || m2 >= n || m1 == m2 {
                    return Err(Error::Shape(format!("beamsplitter on modes {m1},{m2} of {n}")));
                }
                let c = Complex64::new(theta.cos(), 0.0);
                let s = theta.sin();
                let i = Complex64::i();
                let t12 = i * Complex64::from_polar(s, phi);
                let t21 = i * Complex64::from_polar(s, -phi);
                for col in 0..n {
                    let a = self.u[m1 * n + col];
                    let b = self.u[m2 * n + col];
                    self.u[m1 * n + col] = c * a + t12 * b;
                    self.u[m2 * n + col] = t21 * a + c * b;
                }
            }
            Element::PhaseShift { m, phi } => {
                if m >= n {
                    return Err(Error::Shape(format!("phase shifter on mode {m} of {n}")));
                }
                let p = Complex64::from_polar(1.0, phi);
                for col in 0..n {
                    self.u[m * n + col] *= p;
                }
            }
        }
        Ok(())
    }

    /// `next` applied after `self`; the unitary is `next.U * self.U`.
    pub fn then(&self, next: &Interferometer) -> Result<Interferometer> {
        if self.modes != next.modes {
            return Err(Error::Shape(format!(
                "composing {}-mode and {}-mode networks",
                self.modes, next.modes
            )));
        }
        let n = self.modes;
        let mut u = vec![Complex64::default(); n * n];
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::default();
                for k in 0..n {
                    acc += next.u[r * n + k] * self.u[k * n + c];
                }
                u[r * n + c] = acc;
            }
        }
        Ok(Interferometer { modes: n, u })
    }

    /// Max entry of `|U U^+ - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.modes;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::default();
                for k in 0..n {
                    acc += self.u[r * n + k] * self.u[c * n + k].conj();
                }
                if r == c {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Parses the element-list text format (see `docs/interferometer.md`).
    ///
    /// If no `modes <n>` line is present the mode count is one past the
    /// largest mode mentioned.
    pub fn parse(text: &str) -> Result<Self> {
        let mut modes = None;
        let mut elements = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("modes") {
                if modes.is_some() || !elements.is_empty() {
                    return Err(parse_err(line_no, "`modes` must come first and only once"));
                }
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(line_no, "bad mode count"))?;
                modes = Some(n);
                continue;
            }
            elements.push(parse_element(line, line_no)?);
        }
        let needed = elements
            .iter()
            .map(|e| match *e {
                Element::Beamsplitter { m1, m2, .. } => m1.max(m2) + 1,
                Element::PhaseShift { m, .. } => m + 1,
            })
            .max()
            .unwrap_or(0);
        let modes = match modes {
            Some(n) if n < needed => {
                return Err(Error::Shape(format!("element uses mode {} but modes is {n}", needed - 1)))
            }
            Some(n) => n,
            None if needed == 0 => return Err(Error::EmptyInput("no elements and no mode count".into())),
            None => needed,
        };
        Self::from_elements(modes, &elements)
    }
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}

fn parse_element(line: &str, line_no: usize) -> Result<Element> {
    let inner = line
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| parse_err(line_no, "element must be written as [kind, ...]"))?;
    let fields: Vec<&str> = inner.split(',').map(str::trim).collect();
    let mode = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(line_no, &format!("bad mode index `{s}`")))
    };
    let angle = |s: &str| parse_angle(s).ok_or_else(|| parse_err(line_no, &format!("bad angle `{s}`")));
    match fields.as_slice() {
        ["bs", m1, m2, theta, phi] => Ok(Element::Beamsplitter {
            m1: mode(m1)?,
            m2: mode(m2)?,
            theta: angle(theta)?,
            phi: angle(phi)?,
        }),
        ["ps", m, phi] => Ok(Element::PhaseShift { m: mode(m)?, phi: angle(phi)? }),
        [kind, ..] if *kind == "bs" || *kind == "ps" => {
            Err(parse_err(line_no, &format!("wrong number of fields for `{kind}`")))
        }
        [kind, ..] => Err(parse_err(line_no, &format!("unknown element `{kind}`"))),
        [] => Err(parse_err(line_no, "empty element")),
    }
}

/// Plain float, or `pi`, `k*pi`, `pi/d`, `k*pi/d`.
fn parse_angle(s: &str) -> Option<f64> {
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().ok()?),
        None => (s, 1.0),
    };
    let coef = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some("-") => -1.0,
        Some(k) => k.trim_end_matches('*').trim().parse::<f64>().ok()?,
        None => return None,
    };
    let v = coef * std::f64::consts::PI / den;
    v.is_finite().then_some(v)
}

/// Propagates every term through the network.
pub fn apply_interferometer(state: &FockState, itf: &Interferometer) -> Result<FockState> {
    if state.modes != itf.modes {
        return Err(Error::Shape(format!(
            "{}-mode state into a {}-mode interferometer",
            state.modes, itf.modes
        )));
    }
    if state.max_photons() > MAX_PHOTONS {
        return Err(Error::Capacity(format!(
            "{} photons, oracle supports at most {MAX_PHOTONS}",
            state.max_photons()
        )));
    }
    let n = state.modes;
    let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (occ, amp) in &state.amps {
        // expand prod_j (sum_k U_kj a_k^+)^{n_j} one creation operator at a time
        let mut poly: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        poly.insert(vec![0; n], *amp / occ.iter().map(|&k| factorial(k as usize)).product::<f64>().sqrt());
        for (j, &count) in occ.iter().enumerate() {
            for _ in 0..count {
                let mut next: BTreeMap<Occupation, Complex64> = BTreeMap::new();
                for (mono, c) in &poly {
                    for k in 0..n {
                        let u = itf.u[k * n + j];
                        if u == Complex64::default() {
                            continue;
                        }
                        let mut m = mono.clone();
                        m[k] += 1;
                        *next.entry(m).or_default() += c * u;
                    }
                }
                poly = next;
            }
        }
        for (mono, c) in poly {
            let norm = mono.iter().map(|&k| factorial(k as usize)).product::<f64>().sqrt();
            *out.entry(mono).or_default() += c * norm;
        }
    }
    out.retain(|_, a| a.norm_sqr() > 1e-30);
    Ok(FockState { modes: n, amps: out })
}

/// Requirement on one detector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Click {
    /// Number-resolving: exactly this many photons.
    Count(u8),
    /// Threshold detector fired (one or more photons).
    Any,
}

/// Detector requirements per mode. Modes without an entry are not looked at.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DetectionPattern {
    rules: BTreeMap<usize, Click>,
}

impl DetectionPattern {
    pub fn new() -> Self {
        Self::default()
    }

    /// Exact counts on modes `0..counts.len()`.
    pub fn exact(counts: &[u8]) -> Self {
        let mut p = Self::new();
        for (m, &c) in counts.iter().enumerate() {
            p = p.count(m, c);
        }
        p
    }

    pub fn count(mut self, mode: usize, n: u8) -> Self {
        self.rules.insert(mode, Click::Count(n));
        self
    }

    pub fn click(mut self, mode: usize) -> Self {
        self.rules.insert(mode, Click::Any);
        self
    }

    pub fn matches(&self, occ: &[u8]) -> bool {
        self.rules.iter().all(|(&m, rule)| {
            let n = occ.get(m).copied().unwrap_or(0);
            match *rule {
                Click::Count(k) => n == k,
                Click::Any => n >= 1,
            }
        })
    }
}

pub fn detection_probability(state: &FockState, pattern: &DetectionPattern) -> f64 {
    state
        .amps
        .iter()
        .filter(|(occ, _)| pattern.matches(occ))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Herald classes of the fusion scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionHeralds {
    /// One photon in each output pair of modes.
    pub success: f64,
    /// Both photons in the same output pair.
    pub failure: f64,
    /// Any other photon count in the detected modes.
    pub degenerate: f64,
}

impl FusionHeralds {
    pub fn total(&self) -> f64 {
        self.success + self.failure + self.degenerate
    }
}

/// Modes of the fusion scenario: qubit `a0` on (0,1), `a1` on (2,3), `b0`
/// on (4,5), `b1` on (6,7). Pairs `a0 a1` and `b0 b1` are Bell pairs and
/// `a1`, `b0` are fused.
pub const FUSION_MODES: usize = 8;
const FUSED_A: (usize, usize) = (2, 3);
const FUSED_B: (usize, usize) = (4, 5);

/// Dual-rail Bell pair `(|10,10> + |01,01>)/sqrt(2)` on four modes.
pub fn dual_rail_bell_pair() -> FockState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    FockState::from_terms(
        4,
        [
            (vec![1, 0, 1, 0], Complex64::new(h, 0.0)),
            (vec![0, 1, 0, 1], Complex64::new(h, 0.0)),
        ],
    )
    .expect("normalized")
}

/// Polarizing splitter swapping the second rails of the fused qubits,
/// then a balanced splitter inside each output pair.
pub fn type2_fusion_network() -> Interferometer {
    let (a0, a1) = FUSED_A;
    let (b0, b1) = FUSED_B;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let elements = [
        // full swap with the i phases undone
        Element::Beamsplitter { m1: a1, m2: b1, theta: half_pi, phi: 0.0 },
        Element::PhaseShift { m: a1, phi: -half_pi },
        Element::PhaseShift { m: b1, phi: -half_pi },
        Element::Beamsplitter { m1: a0, m2: a1, theta: FRAC_PI_4, phi: 0.0 },
        Element::Beamsplitter { m1: b0, m2: b1, theta: FRAC_PI_4, phi: 0.0 },
    ];
    Interferometer::from_elements(FUSION_MODES, &elements).expect("valid network")
}

fn classify(occ: &[u8]) -> usize {
    let a = occ[FUSED_A.0] + occ[FUSED_A.1];
    let b = occ[FUSED_B.0] + occ[FUSED_B.1];
    match (a, b) {
        (1, 1) => 0,
        (2, 0) | (0, 2) => 1,
        _ => 2,
    }
}

fn heralds_from<'a>(dist: impl Iterator<Item = (&'a Occupation, f64)>) -> FusionHeralds {
    let mut h = [0.0; 3];
    for (occ, p) in dist {
        h[classify(occ)] += p;
    }
    FusionHeralds { success: h[0], failure: h[1], degenerate: h[2] }
}

/// Herald probabilities with indistinguishable photons.
pub fn type2_fusion_heralds() -> FusionHeralds {
    let input = dual_rail_bell_pair().tensor(&dual_rail_bell_pair()).expect("8 modes");
    let out = apply_interferometer(&input, &type2_fusion_network()).expect("within bounds");
    heralds_from(out.terms().map(|(o, a)| (o, a.norm_sqr())))
}

pub fn type2_fusion_success_probability() -> f64 {
    type2_fusion_heralds().success
}

/// Same network, but the two Bell pairs never interfere: each is sent
/// through alone (other pair's modes empty) and the detector counts of
/// the two runs are added.
pub fn type2_fusion_heralds_distinguishable() -> FusionHeralds {
    let vac = FockState::vacuum(4).expect("4 modes");
    let pair_a = dual_rail_bell_pair().tensor(&vac).expect("8 modes");
    let pair_b = vac.tensor(&dual_rail_bell_pair()).expect("8 modes");
    let net = type2_fusion_network();
    let out_a = apply_interferometer(&pair_a, &net).expect("within bounds");
    let out_b = apply_interferometer(&pair_b, &net).expect("within bounds");
    let mut joint: BTreeMap<Occupation, f64> = BTreeMap::new();
    for (oa, aa) in out_a.terms() {
        for (ob, ab) in out_b.terms() {
            let occ: Occupation = oa.iter().zip(ob).map(|(x, y)| x + y).collect();
            *joint.entry(occ).or_default() += aa.norm_sqr() * ab.norm_sqr();
        }
    }
    heralds_from(joint.iter().map(|(o, p)| (o, *p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_photon_on_balanced_splitter() {
        let bs = Interferometer::balanced_beamsplitter(2, 0, 1).unwrap();
        let out = apply_interferometer(&FockState::basis(&[1, 0]).unwrap(), &bs).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude(&[1, 0]) - c(h, 0.0)).norm() < 1e-12);
        assert!((out.amplitude(&[0, 1]) - c(0.0, h)).norm() < 1e-12);
    }

    #[test]
    fn identity_leaves_state() {
        let s = FockState::basis(&[1, 2, 0]).unwrap();
        let out = apply_interferometer(&s, &Interferometer::identity(3).unwrap()).unwrap();
        assert!(out.distance(&s) < 1e-12);
    }

    #[test]
    fn angle_forms() {
        assert_eq!(parse_angle("0.5"), Some(0.5));
        assert!((parse_angle("pi/4").unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((parse_angle("-pi").unwrap() + std::f64::consts::PI).abs() < 1e-15);
        assert!((parse_angle("3*pi/2").unwrap() - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(parse_angle("tau"), None);
        assert_eq!(parse_angle("nan"), None);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = Interferometer::parse("[bs, 0, 1, pi/4, 0]\n[xx, 1]\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = Interferometer::parse("[ps, 0]\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(matches!(Interferometer::parse("modes 2\n[ps, 3, 0]"), Err(Error::Shape(_))));
    }

    #[test]
    fn capacity_limits() {
        assert!(matches!(FockState::basis(&[7, 0]), Err(Error::Capacity(_))));
        assert!(matches!(FockState::vacuum(13), Err(Error::Capacity(_))));
        let s = FockState::basis(&[1, 0]).unwrap();
        let itf = Interferometer::identity(3).unwrap();
        assert!(matches!(apply_interferometer(&s, &itf), Err(Error::Shape(_))));
    }
}
