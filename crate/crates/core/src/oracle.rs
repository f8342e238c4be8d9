//! Brute-force reference for the distribution solver.
//!
//! Enumerates task distributions on a regular simplex grid and evaluates
//! the worst active path delay directly from the delay formulas. Nothing
//! here relies on the equal-latency structure the solver exploits.

use crate::error::{Error, Result};
use crate::queueing::Path;
use crate::solver::{NodeSet, TaskDistribution};

pub const MAX_ORACLE_PATHS: usize = 4;
pub const MAX_ORACLE_RESOLUTION: u64 = 400;

/// Subdivision per refinement level and half-width (in fine steps) of the
/// window searched around the previous minimizer.
const ZOOM_FACTOR: u64 = 10;
const ZOOM_HALF_WIDTH: u64 = 2 * ZOOM_FACTOR;

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub distribution: TaskDistribution,
    pub max_delay: f64,
    /// Grid resolution of the returned point.
    pub resolution: u64,
}

/// Minimizer of the worst active path delay over all distributions whose
/// entries are multiples of `1 / resolution`.
pub fn grid_oracle(nodes: &NodeSet, resolution: u64) -> Result<TaskDistribution> {
    Ok(grid_search(nodes, resolution, 0)?.distribution)
}

/// Exhaustive grid search at `resolution`, followed by `refinements`
/// zoom levels. Each level re-enumerates a window of ±2 coarse steps
/// around the current minimizer on a grid ten times finer.
pub fn grid_search(nodes: &NodeSet, resolution: u64, refinements: u32) -> Result<GridOptimum> {
    let paths = nodes.paths();
    if paths.len() > MAX_ORACLE_PATHS {
        return Err(Error::OracleRefused(format!("{} paths exceed the limit of {MAX_ORACLE_PATHS}", paths.len())));
    }
    if resolution == 0 || resolution > MAX_ORACLE_RESOLUTION {
        return Err(Error::OracleRefused(format!("resolution {resolution} outside 1..={MAX_ORACLE_RESOLUTION}")));
    }

    let windows = vec![(0, resolution); paths.len() - 1];
    let (mut best, mut best_delay) = enumerate(&paths, nodes.x_i, resolution, &windows)
        .ok_or_else(|| Error::OracleRefused("no stable grid point".into()))?;
    let mut res = resolution;

    for _ in 0..refinements {
        let fine = res * ZOOM_FACTOR;
        let windows: Vec<(u64, u64)> = best[..paths.len() - 1]
            .iter()
            .map(|&k| {
                let center = k * ZOOM_FACTOR;
                (center.saturating_sub(ZOOM_HALF_WIDTH), (center + ZOOM_HALF_WIDTH).min(fine))
            })
            .collect();
        match enumerate(&paths, nodes.x_i, fine, &windows) {
            Some((point, delay)) if delay <= best_delay => {
                best = point;
                best_delay = delay;
                res = fine;
            }
            _ => break,
        }
    }

    let fractions: Vec<f64> = best.iter().map(|&k| k as f64 / res as f64).collect();
    Ok(GridOptimum {
        distribution: TaskDistribution::from_path_fractions(nodes, &fractions),
        max_delay: best_delay,
        resolution: res,
    })
}

/// Lexicographic walk over integer compositions of `total` whose first
/// coordinates fall inside `windows`; the last coordinate takes the rest.
fn enumerate(paths: &[Path], x_i: f64, total: u64, windows: &[(u64, u64)]) -> Option<(Vec<u64>, f64)> {
    let delay = |path: &Path, k: u64| -> Option<f64> {
        if k == 0 {
            return Some(0.0);
        }
        path.delay_at_rate(k as f64 / total as f64 * x_i).ok()
    };

    let mut best: Option<(Vec<u64>, f64)> = None;
    let mut point = vec![0u64; paths.len()];
    recurse(paths, total, windows, 0, 0, 0.0, &mut point, &delay, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    paths: &[Path],
    total: u64,
    windows: &[(u64, u64)],
    depth: usize,
    used: u64,
    worst: f64,
    point: &mut Vec<u64>,
    delay: &dyn Fn(&Path, u64) -> Option<f64>,
    best: &mut Option<(Vec<u64>, f64)>,
) {
    if let Some((_, b)) = best {
        if worst >= *b {
            return;
        }
    }
    if depth == paths.len() - 1 {
        let k = total - used;
        let Some(d) = delay(&paths[depth], k) else { return };
        let worst = worst.max(d);
        if best.as_ref().is_none_or(|(_, b)| worst < *b) {
            point[depth] = k;
            *best = Some((point.clone(), worst));
        }
        return;
    }
    let (lo, hi) = windows[depth];
    for k in lo..=hi.min(total - used) {
        let Some(d) = delay(&paths[depth], k) else { break };
        point[depth] = k;
        recurse(paths, total, windows, depth + 1, used + k, worst.max(d), point, delay, best);
    }
}
