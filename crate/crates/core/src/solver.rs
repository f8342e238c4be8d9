//! Min-max task distribution for a fixed set of computing nodes.
//!
//! Every path delay is continuous and strictly increasing in its load, so
//! the optimum routes load until all used paths share one delay `D`. For a
//! candidate `D` each path's load is found by bisection on its own delay
//! curve, and `D` itself is found by bisection on the total routed fraction
//! `g(D)`, which is continuous and non-decreasing.

use crate::error::{Error, Result};
use crate::queueing::{CloudLink, ComputeProfile, FogLink, Path};

/// Absolute tolerance on a single path's fraction when inverting its delay.
pub const LOAD_TOLERANCE: f64 = 1e-12;

/// Default tolerance for the outer search on the common delay.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const DELAY_CEILING: f64 = 1e12;
const MAX_OUTER_ITERATIONS: usize = 400;

/// The computation graph for one solve: the initiator's own processor, an
/// optional cloud link, and the selected neighbors in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub x_i: f64,
    pub local: ComputeProfile,
    pub cloud: Option<CloudLink>,
    pub neighbors: Vec<FogLink>,
}

impl NodeSet {
    pub fn new(x_i: f64, local: ComputeProfile, cloud: Option<CloudLink>, neighbors: Vec<FogLink>) -> Self {
        NodeSet { x_i, local, cloud, neighbors }
    }

    /// Paths in canonical order: local, cloud (if present), then neighbors.
    pub fn paths(&self) -> Vec<Path> {
        let mut paths = Vec::with_capacity(2 + self.neighbors.len());
        paths.push(Path::Local(self.local));
        if let Some(cloud) = self.cloud {
            paths.push(Path::Cloud(cloud));
        }
        paths.extend(self.neighbors.iter().copied().map(Path::Fog));
        paths
    }

    pub fn neighbor_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Per-path stable rate caps, aligned with [`NodeSet::paths`].
    pub fn stable_caps(&self) -> Vec<f64> {
        self.paths().iter().map(Path::stable_cap).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_i.is_finite() && self.x_i > 0.0) {
            return Err(Error::domain(format!("input rate x_i must be positive, got {}", self.x_i)));
        }
        self.local.validate()?;
        if let Some(cloud) = &self.cloud {
            positive("cloud mu_tx", cloud.mu_tx)?;
            if !(cloud.c.is_finite() && cloud.c >= 0.0) {
                return Err(Error::domain(format!("cloud c must be non-negative, got {}", cloud.c)));
            }
        }
        for (k, n) in self.neighbors.iter().enumerate() {
            positive(&format!("neighbor {k} mu_tx"), n.mu_tx)?;
            n.prof.validate()?;
        }
        Ok(())
    }

    fn check_capacity(&self) -> Result<()> {
        let caps = self.stable_caps();
        let capacity: f64 = caps.iter().sum();
        if capacity < self.x_i {
            return Err(Error::Infeasible { x_i: self.x_i, capacity, shortfall: self.x_i - capacity, caps });
        }
        Ok(())
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be positive, got {v}")))
    }
}

/// Fractions of the input rate sent to each destination.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDistribution {
    pub alpha_local: f64,
    pub alpha_cloud: f64,
    pub alpha_fog: Vec<f64>,
}

impl TaskDistribution {
    /// Splits a vector aligned with [`NodeSet::paths`].
    pub fn from_path_fractions(nodes: &NodeSet, fractions: &[f64]) -> Self {
        let (alpha_cloud, fog_start) = if nodes.cloud.is_some() { (fractions[1], 2) } else { (0.0, 1) };
        TaskDistribution { alpha_local: fractions[0], alpha_cloud, alpha_fog: fractions[fog_start..].to_vec() }
    }

    /// Fractions aligned with [`NodeSet::paths`].
    pub fn path_fractions(&self, nodes: &NodeSet) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 + self.alpha_fog.len());
        v.push(self.alpha_local);
        if nodes.cloud.is_some() {
            v.push(self.alpha_cloud);
        }
        v.extend_from_slice(&self.alpha_fog);
        v
    }

    pub fn fog_share(&self) -> f64 {
        self.alpha_fog.iter().fold(0.0, |a, s| a + s)
    }

    pub fn sum(&self) -> f64 {
        self.alpha_local + self.alpha_cloud + self.fog_share()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub distribution: TaskDistribution,
    /// Delay shared by all paths that carry load.
    pub common_delay: f64,
    /// Delay of every path at its assigned load, aligned with
    /// [`NodeSet::paths`]; unused paths report their zero-load delay.
    pub per_path_delays: Vec<f64>,
    pub max_delay: f64,
    pub total_cost: f64,
    pub active_mask: Vec<bool>,
}

/// Fraction of `x_i` that `path` can carry while keeping its delay at
/// `target_delay`. Clipped to zero when the empty path is already slower,
/// and to the stable cap (or 1) when even a saturated path is faster.
pub fn load_for_delay(path: &Path, target_delay: f64, x_i: f64) -> f64 {
    if path.zero_load_delay() >= target_delay {
        return 0.0;
    }
    let cap = (path.stable_cap() / x_i).min(1.0);
    let delay_at = |alpha: f64| path.delay_at_rate(alpha * x_i).unwrap_or(f64::INFINITY);
    if delay_at(cap) <= target_delay {
        return cap;
    }
    let (mut lo, mut hi) = (0.0, cap);
    while hi - lo > LOAD_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if delay_at(mid) < target_delay {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn routed_fraction(paths: &[Path], delay: f64, x_i: f64) -> f64 {
    paths.iter().map(|p| load_for_delay(p, delay, x_i)).sum()
}

/// Min-max distribution of `nodes.x_i` over all paths of `nodes`.
///
/// `tol` bounds both the width of the final bracket on the common delay
/// and the gap `g(D) - 1` of the total routed fraction.
pub fn solve_distribution(nodes: &NodeSet, eta: f64, tol: f64) -> Result<SolveReport> {
    nodes.validate()?;
    if !(eta >= 0.0) {
        return Err(Error::domain(format!("eta must be non-negative, got {eta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    nodes.check_capacity()?;

    let x_i = nodes.x_i;
    let paths = nodes.paths();
    let g = |d: f64| routed_fraction(&paths, d, x_i);

    let mut lo = paths.iter().map(Path::zero_load_delay).fold(f64::INFINITY, f64::min);
    let mut hi = lo.max(1.0);
    while g(hi) < 1.0 {
        hi *= 2.0;
        if hi > DELAY_CEILING {
            let caps = nodes.stable_caps();
            let capacity: f64 = caps.iter().sum();
            return Err(Error::Infeasible { x_i, capacity, shortfall: (x_i - capacity).max(0.0), caps });
        }
    }

    let mut g_hi = g(hi);
    for _ in 0..MAX_OUTER_ITERATIONS {
        if hi - lo <= tol && g_hi - 1.0 <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid >= 1.0 {
            hi = mid;
            g_hi = g_mid;
        } else {
            lo = mid;
        }
    }

    let common_delay = hi;
    let mut fractions: Vec<f64> = paths.iter().map(|p| load_for_delay(p, common_delay, x_i)).collect();
    let total: f64 = fractions.iter().sum();
    for a in &mut fractions {
        *a /= total;
    }

    let mut per_path_delays = Vec::with_capacity(paths.len());
    for (p, &a) in paths.iter().zip(&fractions) {
        per_path_delays.push(p.delay_at_rate(a * x_i)?);
    }
    let active_mask: Vec<bool> = fractions.iter().map(|&a| a > 0.0).collect();
    let max_delay = per_path_delays.iter().zip(&active_mask).filter(|(_, &on)| on).map(|(&d, _)| d).fold(0.0, f64::max);

    Ok(SolveReport {
        distribution: TaskDistribution::from_path_fractions(nodes, &fractions),
        common_delay,
        per_path_delays,
        max_delay,
        total_cost: total_cost(max_delay, eta, nodes.neighbor_count()),
        active_mask,
    })
}

/// Objective value: worst path delay plus `eta` per managed queue
/// (one per neighbor and one for the cloud).
pub fn total_cost(max_delay: f64, eta: f64, neighbors: usize) -> f64 {
    max_delay + eta * (neighbors as f64 + 1.0)
}

/// Worst delay over the paths that carry load under `dist`.
pub fn max_path_delay(nodes: &NodeSet, dist: &TaskDistribution) -> Result<f64> {
    let fractions = dist.path_fractions(nodes);
    let mut worst: f64 = 0.0;
    for (p, &a) in nodes.paths().iter().zip(&fractions) {
        if a > 0.0 {
            worst = worst.max(p.delay_at_rate(a * nodes.x_i)?);
        }
    }
    Ok(worst)
}
