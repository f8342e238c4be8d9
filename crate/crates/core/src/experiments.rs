//! Experiment runners. Each produces a [`Table`] ready for CSV output.
//!
//! Monte Carlo iterations run on a rayon pool of the requested size. Every
//! iteration seeds its own generator from `(seed, iteration)` and results
//! are reduced in iteration order, so the output does not depend on the
//! worker count.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{LinkMode, ScenarioConfig};
use crate::error::{Error, Result};
use crate::queueing::{service_rate, ComputeProfile};
use crate::scenario::{generate_scenario, iteration_rng, node_set};
use crate::selection::{
    competitive_ratio, offline_top_j, online_secretary, FogCandidate, SecretaryParams, SelectionOutcome,
};
use crate::solver::{solve_distribution, SolveReport};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    OfflineSweep,
    OnlineVsOffline,
    RatioCdf,
    DistanceSweep,
    ChooseJ,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::OfflineSweep,
        Experiment::OnlineVsOffline,
        Experiment::RatioCdf,
        Experiment::DistanceSweep,
        Experiment::ChooseJ,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::OfflineSweep => "offline-sweep",
            Experiment::OnlineVsOffline => "online-vs-offline",
            Experiment::RatioCdf => "ratio-cdf",
            Experiment::DistanceSweep => "distance-sweep",
            Experiment::ChooseJ => "choose-j",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(Experiment::name).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown experiment `{s}`; valid names: {}", Self::valid_names())))
    }
}

/// Runs `name` with the sweep ranges from `cfg`.
pub fn run_experiment(name: Experiment, cfg: &ScenarioConfig, workers: usize) -> Result<Table> {
    let sweep = &cfg.sweep;
    if matches!(name, Experiment::RatioCdf | Experiment::DistanceSweep) && cfg.j == 0 {
        return Err(Error::config("j", format!("{name} needs at least one neighbor")));
    }
    match name {
        Experiment::OfflineSweep => run_offline_sweep(cfg, sweep.j_min..=sweep.j_max, &sweep.mu_ij_values),
        Experiment::OnlineVsOffline => run_online_vs_offline(cfg, sweep.j_min.max(1)..=sweep.j_max.max(1), workers),
        Experiment::RatioCdf => run_ratio_cdf(cfg, workers),
        Experiment::DistanceSweep => run_distance_sweep(cfg, &sweep.distances_m, &sweep.mu_compute_values, workers),
        Experiment::ChooseJ => Ok(choose_j(cfg, sweep.j_min..=sweep.j_max, workers)?.table),
    }
}

fn parallel_iterations<T, F>(workers: usize, iterations: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..iterations as u64).into_par_iter().map(&f).collect())
}

/// Solves the distribution for the initiator with `chosen` neighbors.
/// Infeasible instances come back as `None`.
pub fn solve_selection(
    cfg: &ScenarioConfig,
    local: ComputeProfile,
    chosen: &[FogCandidate],
) -> Result<Option<SolveReport>> {
    match solve_distribution(&node_set(cfg, local, chosen)?, cfg.eta, cfg.tolerance) {
        Ok(r) => Ok(Some(r)),
        Err(Error::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn secretary_params(cfg: &ScenarioConfig, j: usize) -> SecretaryParams {
    SecretaryParams { tau: cfg.tau, max_neighbors: j, stream_end: cfg.stream_end.into() }
}

/// Online selection that re-solves after every acceptance. The final
/// report always describes the final selection.
pub fn online_with_solver(
    cfg: &ScenarioConfig,
    stream: &[FogCandidate],
    j: usize,
) -> Result<(SelectionOutcome, Option<SolveReport>)> {
    let mut failure = None;
    let outcome = online_secretary(stream, secretary_params(cfg, j), |chosen| {
        match solve_selection(cfg, cfg.local_prof, chosen) {
            Ok(r) => r,
            Err(e) => {
                failure.get_or_insert(e);
                None
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let last = match &outcome.final_report {
        Some(r) if outcome.solve_trace.len() == outcome.chosen.len() => Some(r.clone()),
        _ => solve_selection(cfg, cfg.local_prof, &outcome.chosen)?,
    };
    Ok((outcome, last))
}

const OFFLINE_SWEEP_COLUMNS: [&str; 9] =
    ["mu_ij", "j", "feasible", "total_cost", "max_latency", "common_delay", "share_local", "share_cloud", "share_fog"];

/// Offline total cost, latency and task shares per neighbor count, with
/// every candidate link fixed at each value in `mu_ij_values`.
pub fn run_offline_sweep(cfg: &ScenarioConfig, j_range: RangeInclusive<usize>, mu_ij_values: &[f64]) -> Result<Table> {
    let mut table = Table::new(&OFFLINE_SWEEP_COLUMNS);
    for &mu_ij in mu_ij_values {
        let fixed = ScenarioConfig { link_mode: LinkMode::Fixed, fixed_mu_tx: mu_ij, ..cfg.clone() };
        let candidates = generate_scenario(&fixed, &mut iteration_rng(cfg.seed, 0))?;
        for j in j_range.clone() {
            let report = match offline_top_j(&candidates, j) {
                Ok(best) => solve_selection(&fixed, fixed.local_prof, &best.chosen)?,
                Err(_) => None,
            };
            let mut row: Vec<Cell> = vec![mu_ij.into(), j.into(), report.is_some().into()];
            match report {
                Some(r) => row.extend::<[Cell; 6]>([
                    r.total_cost.into(),
                    r.max_delay.into(),
                    r.common_delay.into(),
                    r.distribution.alpha_local.into(),
                    r.distribution.alpha_cloud.into(),
                    r.distribution.fog_share().into(),
                ]),
                None => row.extend([Cell::Real(0.0); 6]),
            }
            table.push(row);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostPoint {
    pub total_cost: f64,
    pub latency: f64,
    pub neighbors: usize,
}

impl From<&SolveReport> for CostPoint {
    fn from(r: &SolveReport) -> Self {
        CostPoint { total_cost: r.total_cost, latency: r.max_delay, neighbors: r.distribution.alpha_fog.len() }
    }
}

/// Online and offline results for one iteration and one neighbor count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedCost {
    pub iteration: u64,
    pub j: usize,
    pub online: Option<CostPoint>,
    pub offline: Option<CostPoint>,
}

/// Per-iteration costs of online selection against the offline top-`j`
/// set, on common random candidates for every `j`.
pub fn paired_costs(cfg: &ScenarioConfig, j_range: RangeInclusive<usize>, workers: usize) -> Result<Vec<PairedCost>> {
    let per_iteration = parallel_iterations(workers, cfg.iterations, |it| {
        let candidates = generate_scenario(cfg, &mut iteration_rng(cfg.seed, it))?;
        let mut out = Vec::new();
        for j in j_range.clone() {
            let (_, online) = online_with_solver(cfg, &candidates, j)?;
            let offline = match offline_top_j(&candidates, j) {
                Ok(best) => solve_selection(cfg, cfg.local_prof, &best.chosen)?,
                Err(_) => None,
            };
            out.push(PairedCost {
                iteration: it,
                j,
                online: online.as_ref().map(CostPoint::from),
                offline: offline.as_ref().map(CostPoint::from),
            });
        }
        Ok(out)
    })?;
    Ok(per_iteration.into_iter().flatten().collect())
}

const ONLINE_VS_OFFLINE_COLUMNS: [&str; 11] = [
    "j",
    "iterations",
    "infeasible",
    "online_total_cost",
    "offline_total_cost",
    "online_latency",
    "offline_latency",
    "cost_gap",
    "latency_gap",
    "min_cost_margin",
    "mean_online_size",
];

/// Mean total cost and latency of online selection versus the offline
/// optimum for each neighbor count. Gaps are relative to offline.
pub fn run_online_vs_offline(cfg: &ScenarioConfig, j_range: RangeInclusive<usize>, workers: usize) -> Result<Table> {
    let pairs = paired_costs(cfg, j_range.clone(), workers)?;
    let mut table = Table::new(&ONLINE_VS_OFFLINE_COLUMNS);
    for j in j_range {
        let mut n = 0usize;
        let mut infeasible = 0usize;
        let (mut on_cost, mut off_cost, mut on_lat, mut off_lat, mut size) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut min_margin = f64::INFINITY;
        for p in pairs.iter().filter(|p| p.j == j) {
            match (p.online, p.offline) {
                (Some(on), Some(off)) => {
                    n += 1;
                    on_cost += on.total_cost;
                    off_cost += off.total_cost;
                    on_lat += on.latency;
                    off_lat += off.latency;
                    size += on.neighbors as f64;
                    min_margin = min_margin.min(on.total_cost - off.total_cost);
                }
                _ => infeasible += 1,
            }
        }
        let mean = |s: f64| if n > 0 { s / n as f64 } else { 0.0 };
        let (on_cost, off_cost, on_lat, off_lat) = (mean(on_cost), mean(off_cost), mean(on_lat), mean(off_lat));
        let gap = |a: f64, b: f64| if b > 0.0 { (a - b) / b } else { 0.0 };
        table.push(vec![
            j.into(),
            n.into(),
            infeasible.into(),
            on_cost.into(),
            off_cost.into(),
            on_lat.into(),
            off_lat.into(),
            gap(on_cost, off_cost).into(),
            gap(on_lat, off_lat).into(),
            (if n > 0 { min_margin } else { 0.0 }).into(),
            mean(size).into(),
        ]);
    }
    Ok(table)
}

/// One competitive ratio per iteration, in iteration order.
pub fn competitive_ratios(cfg: &ScenarioConfig, workers: usize) -> Result<Vec<f64>> {
    parallel_iterations(workers, cfg.iterations, |it| {
        let candidates = generate_scenario(cfg, &mut iteration_rng(cfg.seed, it))?;
        let j = cfg.j.min(candidates.len());
        let online = online_secretary(&candidates, secretary_params(cfg, j), |_| None)?;
        let offline = offline_top_j(&candidates, j)?;
        competitive_ratio(&online, &offline)
    })
}

/// Empirical CDF of the competitive ratio: sorted ratios with their
/// cumulative level `rank / n`.
pub fn run_ratio_cdf(cfg: &ScenarioConfig, workers: usize) -> Result<Table> {
    let mut ratios = competitive_ratios(cfg, workers)?;
    ratios.sort_by(f64::total_cmp);
    let n = ratios.len() as f64;
    let mut table = Table::new(&["rank", "ratio", "cdf"]);
    for (k, r) in ratios.into_iter().enumerate() {
        table.push(vec![(k + 1).into(), r.into(), ((k + 1) as f64 / n).into()]);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistancePoint {
    pub mu_compute: f64,
    pub distance_m: f64,
    pub mu_c: f64,
    pub feasible: usize,
    pub infeasible: usize,
    pub share_cloud: f64,
    pub share_local: f64,
    pub share_fog: f64,
    pub max_latency: f64,
}

/// Mean task shares under online selection with the cloud link rate
/// derived from each base-station distance. Each value in `mu_compute`
/// is applied to the initiator and to every neighbor.
pub fn distance_shares(
    cfg: &ScenarioConfig,
    distances_m: &[f64],
    mu_compute: &[f64],
    workers: usize,
) -> Result<Vec<DistancePoint>> {
    let radio = cfg.radio_params()?;
    let mut points = Vec::new();
    for &mu in mu_compute {
        for &d in distances_m {
            let mu_c = service_rate(d, &radio)?;
            let mut run = cfg.clone();
            run.bs_distance_m = d;
            run.cloud.mu_c = mu_c;
            run.cloud.derive_mu_c = false;
            run.local_prof.mu = mu;
            run.neighbor_prof.mu = mu;
            let reports = parallel_iterations(workers, run.iterations, |it| {
                let candidates = generate_scenario(&run, &mut iteration_rng(run.seed, it))?;
                Ok(online_with_solver(&run, &candidates, run.j)?.1)
            })?;
            let feasible: Vec<&SolveReport> = reports.iter().flatten().collect();
            let n = feasible.len();
            let mean = |f: &dyn Fn(&SolveReport) -> f64| {
                if n == 0 {
                    0.0
                } else {
                    feasible.iter().map(|r| f(r)).sum::<f64>() / n as f64
                }
            };
            points.push(DistancePoint {
                mu_compute: mu,
                distance_m: d,
                mu_c,
                feasible: n,
                infeasible: reports.len() - n,
                share_cloud: mean(&|r| r.distribution.alpha_cloud),
                share_local: mean(&|r| r.distribution.alpha_local),
                share_fog: mean(&|r| r.distribution.fog_share()),
                max_latency: mean(&|r| r.max_delay),
            });
        }
    }
    Ok(points)
}

pub fn run_distance_sweep(
    cfg: &ScenarioConfig,
    distances_m: &[f64],
    mu_compute: &[f64],
    workers: usize,
) -> Result<Table> {
    let mut table = Table::new(&[
        "mu_compute",
        "distance_m",
        "mu_c",
        "iterations",
        "infeasible",
        "share_cloud",
        "share_local",
        "share_fog",
        "max_latency",
    ]);
    for p in distance_shares(cfg, distances_m, mu_compute, workers)? {
        table.push(vec![
            p.mu_compute.into(),
            p.distance_m.into(),
            p.mu_c.into(),
            p.feasible.into(),
            p.infeasible.into(),
            p.share_cloud.into(),
            p.share_local.into(),
            p.share_fog.into(),
            p.max_latency.into(),
        ]);
    }
    Ok(table)
}

/// Index of the smallest cost; near-ties (relative 1e-12) go to the
/// larger neighbor count, which has the lower latency.
pub fn argmin_cost(costs: &[(usize, f64)]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &(j, cost) in costs {
        if !cost.is_finite() {
            continue;
        }
        best = match best {
            Some((bj, bc)) if cost > bc + 1e-12 * bc.abs() => Some((bj, bc)),
            Some((bj, bc)) if cost >= bc - 1e-12 * bc.abs() => {
                if j > bj {
                    Some((j, cost.min(bc)))
                } else {
                    Some((bj, bc))
                }
            }
            _ => Some((j, cost)),
        };
    }
    best.map(|(j, _)| j)
}

pub struct JChoice {
    pub j: usize,
    pub table: Table,
}

/// Sweeps the neighbor count and picks the one with the lowest mean
/// offline total cost.
pub fn choose_j(cfg: &ScenarioConfig, j_bounds: RangeInclusive<usize>, workers: usize) -> Result<JChoice> {
    if j_bounds.is_empty() {
        return Err(Error::domain("empty range of neighbor counts"));
    }
    // fixed links make every iteration identical
    let iterations = match cfg.link_mode {
        LinkMode::Fixed => 1,
        LinkMode::Geometric => cfg.iterations,
    };
    let js: Vec<usize> = j_bounds.collect();
    let per_iteration = parallel_iterations(workers, iterations, |it| {
        let candidates = generate_scenario(cfg, &mut iteration_rng(cfg.seed, it))?;
        js.iter()
            .map(|&j| match offline_top_j(&candidates, j) {
                Ok(best) => Ok(solve_selection(cfg, cfg.local_prof, &best.chosen)?.map(|r| CostPoint::from(&r))),
                Err(_) => Ok(None),
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut summary = Vec::with_capacity(js.len());
    for (k, &j) in js.iter().enumerate() {
        let points: Vec<CostPoint> = per_iteration.iter().filter_map(|row| row[k]).collect();
        let n = points.len();
        let cost = if n > 0 { points.iter().map(|p| p.total_cost).sum::<f64>() / n as f64 } else { f64::NAN };
        let latency = if n > 0 { points.iter().map(|p| p.latency).sum::<f64>() / n as f64 } else { f64::NAN };
        summary.push((j, n, cost, latency));
    }
    let costs: Vec<(usize, f64)> = summary.iter().map(|&(j, _, c, _)| (j, c)).collect();
    let chosen = argmin_cost(&costs).ok_or_else(|| Error::domain("every neighbor count is infeasible"))?;

    let mut table = Table::new(&["j", "feasible_iterations", "mean_total_cost", "mean_latency", "selected"]);
    for (j, n, cost, latency) in summary {
        let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
        table.push(vec![j.into(), n.into(), finite(cost).into(), finite(latency).into(), (j == chosen).into()]);
    }
    Ok(JChoice { j: chosen, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(iterations: usize) -> ScenarioConfig {
        ScenarioConfig { iterations, ..Default::default() }
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        let err = "fig-7".parse::<Experiment>().unwrap_err().to_string();
        assert!(err.contains("ratio-cdf") && err.contains("choose-j"));
    }

    #[test]
    fn argmin_examples() {
        assert_eq!(argmin_cost(&[(3, 1.0)]), Some(3));
        // strictly convex curve (j - 4.3)^2
        let curve: Vec<(usize, f64)> = (0..10).map(|j| (j, (j as f64 - 4.3).powi(2))).collect();
        assert_eq!(argmin_cost(&curve), Some(4));
        assert_eq!(argmin_cost(&[(1, 2.0), (2, 1.0), (3, 1.0), (4, 3.0)]), Some(3));
        assert_eq!(argmin_cost(&[(1, f64::NAN)]), None);
    }

    #[test]
    fn offline_sweep_row_count() {
        let t = run_offline_sweep(&small(1), 0..=7, &[20.0, 30.0]).unwrap();
        assert_eq!(t.rows.len(), 16);
    }

    #[test]
    fn offline_sweep_flags_oversized_j() {
        let cfg = ScenarioConfig { n_candidates: 3, ..small(1) };
        let t = run_offline_sweep(&cfg, 2..=4, &[20.0]).unwrap();
        assert_eq!(t.column("feasible").unwrap(), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn ratio_is_one_when_everything_is_taken() {
        let cfg = ScenarioConfig { tau: 0, j: 15, iterations: 50, ..Default::default() };
        assert!(competitive_ratios(&cfg, 2).unwrap().iter().all(|&r| r == 1.0));
    }

    #[test]
    fn ratios_in_unit_interval() {
        let ratios = competitive_ratios(&small(500), 4).unwrap();
        assert_eq!(ratios.len(), 500);
        assert!(ratios.iter().all(|&r| r > 0.0 && r <= 1.0));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = small(64);
        assert_eq!(competitive_ratios(&cfg, 1).unwrap(), competitive_ratios(&cfg, 5).unwrap());
        let a = run_online_vs_offline(&small(12), 1..=3, 1).unwrap().to_csv();
        let b = run_online_vs_offline(&small(12), 1..=3, 3).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn online_never_beats_offline() {
        for p in paired_costs(&small(40), 1..=5, 4).unwrap() {
            let (on, off) = (p.online.unwrap(), p.offline.unwrap());
            assert!(on.total_cost >= off.total_cost * (1.0 - 1e-9), "{p:?}");
        }
    }

    #[test]
    fn choose_single_point() {
        let cfg = ScenarioConfig { link_mode: LinkMode::Fixed, ..small(1) };
        assert_eq!(choose_j(&cfg, 3..=3, 1).unwrap().j, 3);
    }
}
