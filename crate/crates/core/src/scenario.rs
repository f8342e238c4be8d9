//! Random candidate neighborhoods.
//!
//! Each Monte Carlo iteration draws from its own ChaCha stream keyed by
//! `(seed, iteration)`, so results do not depend on how iterations are
//! spread over workers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{LinkMode, ScenarioConfig};
use crate::error::Result;
use crate::queueing::{service_rate, ComputeProfile, Position};
use crate::selection::FogCandidate;
use crate::solver::NodeSet;

/// Independent generator for one iteration.
pub fn iteration_rng(seed: u64, iteration: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    rng
}

/// Draws `n_candidates` neighbors uniformly over the square and returns
/// them in a uniformly random arrival order.
pub fn generate_scenario<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<Vec<FogCandidate>> {
    let radio = cfg.radio_params()?;
    let origin = cfg.initiator();
    let mut candidates = Vec::with_capacity(cfg.n_candidates);
    for id in 0..cfg.n_candidates {
        let (position, distance) = loop {
            let p = Position::new(rng.random::<f64>() * cfg.area_m, rng.random::<f64>() * cfg.area_m);
            let d = p.distance(&origin);
            if d > 0.0 {
                break (p, d);
            }
        };
        let mu_tx = match cfg.link_mode {
            LinkMode::Geometric => service_rate(distance, &radio)?,
            LinkMode::Fixed => cfg.fixed_mu_tx,
        };
        candidates.push(FogCandidate { id, position, mu_tx, prof: cfg.neighbor_prof, arrival_index: 0 });
    }
    candidates.shuffle(rng);
    for (k, c) in candidates.iter_mut().enumerate() {
        c.arrival_index = k + 1;
    }
    Ok(candidates)
}

/// Node set for the initiator with `chosen` as its neighbors.
pub fn node_set(cfg: &ScenarioConfig, local: ComputeProfile, chosen: &[FogCandidate]) -> Result<NodeSet> {
    Ok(NodeSet::new(cfg.x_i, local, Some(cfg.cloud_link()?), chosen.iter().map(FogCandidate::link).collect()))
}
