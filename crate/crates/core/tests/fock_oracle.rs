use ballistic::fock::*;
use ballistic::rng::trial_rng;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn random_elements(rng: &mut impl Rng, modes: usize, count: usize) -> Vec<Element> {
    (0..count)
        .map(|_| {
            if rng.random_bool(0.7) {
                let m1 = rng.random_range(0..modes);
                let mut m2 = rng.random_range(0..modes - 1);
                if m2 >= m1 {
                    m2 += 1;
                }
                Element::Beamsplitter {
                    m1,
                    m2,
                    theta: rng.random_range(0.0..std::f64::consts::TAU),
                    phi: rng.random_range(0.0..std::f64::consts::TAU),
                }
            } else {
                Element::PhaseShift { m: rng.random_range(0..modes), phi: rng.random_range(0.0..6.3) }
            }
        })
        .collect()
}

/// Permanent by summing over all permutations.
fn permanent(m: &[Vec<Complex64>]) -> Complex64 {
    fn go(m: &[Vec<Complex64>], row: usize, used: &mut Vec<bool>) -> Complex64 {
        if row == m.len() {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::default();
        for c in 0..m.len() {
            if !used[c] {
                used[c] = true;
                acc += m[row][c] * go(m, row + 1, used);
                used[c] = false;
            }
        }
        acc
    }
    go(m, 0, &mut vec![false; m.len()])
}

fn fact(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

/// `<out| U |in>` for basis states via the permanent of the repeated
/// submatrix.
fn transition(itf: &Interferometer, input: &[u8], output: &[u8]) -> Complex64 {
    let ins: Vec<usize> = input.iter().enumerate().flat_map(|(m, &k)| std::iter::repeat_n(m, k as usize)).collect();
    let outs: Vec<usize> = output.iter().enumerate().flat_map(|(m, &k)| std::iter::repeat_n(m, k as usize)).collect();
    if ins.len() != outs.len() {
        return Complex64::default();
    }
    let sub: Vec<Vec<Complex64>> = outs.iter().map(|&r| ins.iter().map(|&c| itf.entry(r, c)).collect()).collect();
    let norm: f64 = input.iter().chain(output).map(|&k| fact(k)).product();
    permanent(&sub) / norm.sqrt()
}

fn all_occupations(modes: usize, photons: u8) -> Vec<Vec<u8>> {
    if modes == 1 {
        return vec![vec![photons]];
    }
    let mut out = Vec::new();
    for k in 0..=photons {
        for mut rest in all_occupations(modes - 1, photons - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

#[test]
fn hom_dip_and_bunching() {
    let bs = Interferometer::balanced_beamsplitter(2, 0, 1).unwrap();
    let out = apply_interferometer(&FockState::basis(&[1, 1]).unwrap(), &bs).unwrap();
    assert!(out.amplitude(&[1, 1]).norm() < 1e-12);
    assert!(detection_probability(&out, &DetectionPattern::exact(&[1, 1])) < 1e-12);
    assert!((detection_probability(&out, &DetectionPattern::exact(&[2, 0])) - 0.5).abs() < 1e-12);
    assert!((detection_probability(&out, &DetectionPattern::exact(&[0, 2])) - 0.5).abs() < 1e-12);
}

#[test]
fn basis_pattern_is_certain() {
    let s = FockState::basis(&[0, 2, 1, 0]).unwrap();
    assert!((detection_probability(&s, &DetectionPattern::exact(&[0, 2, 1, 0])) - 1.0).abs() < 1e-15);
    assert!((detection_probability(&s, &DetectionPattern::new().click(1).click(2)) - 1.0).abs() < 1e-15);
    assert_eq!(detection_probability(&s, &DetectionPattern::new().click(0)), 0.0);
}

#[test]
fn amplitudes_match_permanents() {
    let mut rng = trial_rng(11, 0);
    for case in 0..20u64 {
        let modes = 2 + (case as usize % 4);
        let itf = Interferometer::from_elements(modes, &random_elements(&mut rng, modes, 30)).unwrap();
        let photons = 1 + (case % 3) as u8;
        let inputs = all_occupations(modes, photons);
        let input = &inputs[rng.random_range(0..inputs.len())];
        let out = apply_interferometer(&FockState::basis(input).unwrap(), &itf).unwrap();
        for occ in all_occupations(modes, photons) {
            let want = transition(&itf, input, &occ);
            assert!((out.amplitude(&occ) - want).norm() < 1e-10, "case {case} {occ:?}");
        }
    }
}

#[test]
fn unitarity_survives_long_compositions() {
    let mut rng = trial_rng(12, 0);
    for modes in [2, 5, 12] {
        let itf = Interferometer::from_elements(modes, &random_elements(&mut rng, modes, 500)).unwrap();
        assert!(itf.unitarity_error() < 1e-8, "{}", itf.unitarity_error());
    }
}

#[test]
fn complete_pattern_set_sums_to_one() {
    let mut rng = trial_rng(13, 0);
    let modes = 5;
    let itf = Interferometer::from_elements(modes, &random_elements(&mut rng, modes, 100)).unwrap();
    let out = apply_interferometer(&FockState::basis(&[1, 1, 0, 1, 0]).unwrap(), &itf).unwrap();
    let total: f64 = all_occupations(modes, 3)
        .iter()
        .map(|o| detection_probability(&out, &DetectionPattern::exact(o)))
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn fusion_succeeds_half_the_time() {
    let h = type2_fusion_heralds();
    assert!((h.success - 0.5).abs() < 1e-9, "{h:?}");
    assert!((h.total() - 1.0).abs() < 1e-9);
    assert!((type2_fusion_success_probability() - 0.5).abs() < 1e-9);
}

#[test]
fn distinguishable_fusion_matches_classical_routing() {
    // each fused photon is H or V with probability 1/2, independently; the
    // polarizing splitter keeps H in its own pair and moves V to the other,
    // the balanced splitters never move a photon between pairs
    let mut success = 0.0;
    for a_h in [true, false] {
        for b_h in [true, false] {
            let a_side = if a_h { 0 } else { 1 };
            let b_side = if b_h { 1 } else { 0 };
            if a_side != b_side {
                success += 0.25;
            }
        }
    }
    let h = type2_fusion_heralds_distinguishable();
    assert!((h.success - success).abs() < 1e-12, "{h:?}");
    assert!((h.total() - 1.0).abs() < 1e-12);
}

#[test]
fn element_list_round_trip() {
    let text = "# two splitters\nmodes 4\n[bs, 0, 1, pi/4, 0]\n[ps, 2, 0.3]   # trim\n\n[bs, 2, 3, 0.1, -pi/2]\n";
    let parsed = Interferometer::parse(text).unwrap();
    let built = Interferometer::from_elements(
        4,
        &[
            Element::Beamsplitter { m1: 0, m2: 1, theta: std::f64::consts::FRAC_PI_4, phi: 0.0 },
            Element::PhaseShift { m: 2, phi: 0.3 },
            Element::Beamsplitter { m1: 2, m2: 3, theta: 0.1, phi: -std::f64::consts::FRAC_PI_2 },
        ],
    )
    .unwrap();
    assert_eq!(parsed, built);
    let printed: String = [Element::PhaseShift { m: 1, phi: 0.25 }].iter().map(|e| format!("{e}\n")).collect();
    assert_eq!(Interferometer::parse(&printed).unwrap().mode_count(), 2);
}

proptest! {
    #[test]
    fn composition_matches_sequential_application(seed in any::<u64>(), n1 in 1usize..40, n2 in 1usize..40) {
        let mut rng = trial_rng(seed, 0);
        let modes = 4;
        let u1 = Interferometer::from_elements(modes, &random_elements(&mut rng, modes, n1)).unwrap();
        let u2 = Interferometer::from_elements(modes, &random_elements(&mut rng, modes, n2)).unwrap();
        let s = FockState::basis(&[1, 0, 2, 1]).unwrap();
        let seq = apply_interferometer(&apply_interferometer(&s, &u1).unwrap(), &u2).unwrap();
        let once = apply_interferometer(&s, &u1.then(&u2).unwrap()).unwrap();
        prop_assert!(seq.distance(&once) < 1e-9);
        prop_assert!((once.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
