#![allow(dead_code)]

use fogform::{CloudLink, ComputeProfile, FogCandidate, FogLink, NodeSet, Position};
use rand::Rng;

pub fn profile(rng: &mut impl Rng, lo: f64, hi: f64) -> ComputeProfile {
    ComputeProfile::new(rng.random_range(lo..hi), rng.random_range(0.0..0.05)).unwrap()
}

/// Random node set with `paths` paths (local first, then an optional cloud
/// and fog neighbors), every rate in [lo, hi), loaded at a random fraction
/// of its stable capacity.
pub fn random_nodes(rng: &mut impl Rng, paths: usize, lo: f64, hi: f64) -> NodeSet {
    assert!(paths >= 1);
    let local = profile(rng, lo, hi);
    let mut remaining = paths - 1;
    let cloud = if remaining > 0 && rng.random_bool(0.5) {
        remaining -= 1;
        Some(CloudLink { mu_tx: rng.random_range(lo..hi), c: rng.random_range(0.0..0.05) })
    } else {
        None
    };
    let neighbors =
        (0..remaining).map(|_| FogLink { mu_tx: rng.random_range(lo..hi), prof: profile(rng, lo, hi) }).collect();
    let mut nodes = NodeSet::new(1.0, local, cloud, neighbors);
    let capacity: f64 = nodes.stable_caps().iter().sum();
    nodes.x_i = capacity * rng.random_range(0.05..0.95);
    nodes
}

/// Candidates in arrival order whose scores are exactly `scores`.
pub fn scored_stream(scores: &[f64]) -> Vec<FogCandidate> {
    scores
        .iter()
        .enumerate()
        .map(|(k, &s)| FogCandidate {
            id: k,
            position: Position::new(0.0, 0.0),
            mu_tx: s - 1.0,
            prof: ComputeProfile::new(1.0, 0.0).unwrap(),
            arrival_index: k + 1,
        })
        .collect()
}
