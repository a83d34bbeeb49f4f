//! Browser bindings. Every function takes plain numbers and returns a JSON
//! string for the page to draw.

use std::collections::VecDeque;

use ballistic::builder::{build_wafer, UnitCellSpec, WaferSpec};
use ballistic::loss_tolerance::{simulate_teleport, teleport_success_prob, CrazyGraphSpec};
use ballistic::multiplex::{matching_rmux, sliding_rmux, standard_mux_pair_yield, DelayNetwork, DelaySides, PhotonStream};
use ballistic::percolation::{connectivity, recover_losses};
use ballistic::rng::trial_rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_CELLS: usize = 40_000;

fn js_err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Samples one wafer and reports its spanning state plus, for the `y = 0`
/// slab, which cells hold a computational qubit joined to the bottom face.
/// `cells` is `nz` rows of `nx` codes: 0 empty, 1 alive, 2 joined to the
/// bottom, 3 joined to bottom and top.
#[wasm_bindgen]
pub fn sample_wafer(nx: usize, ny: usize, nz: usize, success_prob: f64, loss: f64, seed: u32) -> Result<String, String> {
    if nx * ny * nz > MAX_CELLS {
        return Err(js_err(format!("at most {MAX_CELLS} cells in the browser")));
    }
    let cell = UnitCellSpec::default_cell();
    let spec = WaferSpec::new(nx, ny, nz).with_success_prob(success_prob).with_loss(loss);
    let mut rng = trial_rng(u64::from(seed), 0);
    let mut lat = build_wafer(&spec, &cell, &mut rng).map_err(js_err)?;
    if loss > 0.0 {
        recover_losses(&mut lat, &mut rng).map_err(js_err)?;
    }
    let conn = connectivity(&lat);
    let reg = &lat.register;

    let reach = |faces: Vec<usize>| {
        let mut seen = vec![false; reg.vertex_count()];
        let mut queue: VecDeque<usize> = faces.into_iter().filter(|&v| reg.is_alive(v)).collect();
        queue.iter().for_each(|&v| seen[v] = true);
        while let Some(v) = queue.pop_front() {
            for &u in reg.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    queue.push_back(u as usize);
                }
            }
        }
        seen
    };
    let face = |z: usize| (0..ny).flat_map(move |y| (0..nx).map(move |x| (x, y, z))).flat_map(|(x, y, z)| {
        let (p, d) = lat.computational(x, y, z);
        [p, d]
    });
    let bottom = reach(face(0).collect());
    let top = reach(face(nz - 1).collect());
    let cells: Vec<Vec<u8>> = (0..nz)
        .map(|z| {
            (0..nx)
                .map(|x| {
                    let (p, d) = lat.computational(x, 0, z);
                    let alive = reg.is_alive(p) || reg.is_alive(d);
                    let low = bottom[p] || bottom[d];
                    let both = (bottom[p] && top[p]) || (bottom[d] && top[d]);
                    match (alive, low, both) {
                        (false, _, _) => 0,
                        (true, _, true) => 3,
                        (true, true, false) => 2,
                        (true, false, false) => 1,
                    }
                })
                .collect()
        })
        .collect();
    let fused = lat.fusion_log.len();
    let ok = lat.fusion_log.iter().filter(|r| r.result == ballistic::fusion::FusionResult::Success).count();
    Ok(json!({
        "crossing": conn.crossing,
        "largest_component_fraction": conn.largest_component_fraction,
        "fusions": fused,
        "fusion_successes": ok,
        "photons": lat.resources.photons_emitted,
        "cells": cells,
    })
    .to_string())
}

/// Pair yield per bin for stages `0..=max_stages`: block multiplexing in
/// closed form, then sliding-window and planned matching on sampled streams.
#[wasm_bindgen]
pub fn mux_yields(p: f64, max_stages: u32, bins: usize, seed: u32) -> Result<String, String> {
    if !(0.0..=1.0).contains(&p) || bins == 0 || max_stages > 12 {
        return Err(js_err("need 0 <= p <= 1, bins >= 1 and at most 12 stages"));
    }
    let a = PhotonStream::sample(0, bins, p, &mut trial_rng(u64::from(seed), 0));
    let b = PhotonStream::sample(1, bins, p, &mut trial_rng(u64::from(seed), 1));
    let mut rows = Vec::new();
    for s in 0..=max_stages {
        let net = DelayNetwork::new(s);
        let sliding = sliding_rmux(&a, &b, &net, DelaySides::Both).map_err(js_err)?;
        let matching = matching_rmux(&a, &b, &net, DelaySides::Both).map_err(js_err)?;
        rows.push(json!({
            "S": s,
            "standard": standard_mux_pair_yield(p, s),
            "sliding": sliding.pair_yield(bins),
            "matching": matching.pair_yield(bins),
            "collisions": sliding.collisions,
        }));
    }
    Ok(serde_json::Value::Array(rows).to_string())
}

/// Success probability of an `n`-column, width-`l` wire against per-qubit
/// loss, exact and sampled, for widths `1..=max_l`.
#[wasm_bindgen]
pub fn wire_success(n: usize, max_l: usize, loss: f64, shots: u32, seed: u32) -> Result<String, String> {
    if max_l == 0 || max_l > 16 || shots == 0 {
        return Err(js_err("need 1 <= max_l <= 16 and shots >= 1"));
    }
    let mut rows = Vec::new();
    for l in 1..=max_l {
        let spec = CrazyGraphSpec::new(n, l, loss);
        let exact = teleport_success_prob(&spec).map_err(js_err)?;
        let st = simulate_teleport(&spec, &mut trial_rng(u64::from(seed), l as u64), u64::from(shots)).map_err(js_err)?;
        rows.push(json!({ "L": l, "exact": exact, "sampled": st.success_rate() }));
    }
    Ok(serde_json::Value::Array(rows).to_string())
}
