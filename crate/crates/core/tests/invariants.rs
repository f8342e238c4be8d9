mod common;

use std::cell::RefCell;

use fogform::{
    competitive_ratio, grid_search, load_for_delay, offline_top_j, online_secretary, path_delay, solve_distribution,
    CloudLink, ComputeProfile, FogLink, NodeSet, Path, SecretaryParams, StreamEnd, ThresholdSet,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn any_path() -> impl Strategy<Value = Path> {
    let prof = (1.0..40.0f64, 0.0..0.1f64).prop_map(|(mu, c)| ComputeProfile::new(mu, c).unwrap());
    prop_oneof![
        prof.clone().prop_map(Path::Local),
        (1.0..40.0f64, 0.0..0.1f64).prop_map(|(mu_tx, c)| Path::Cloud(CloudLink { mu_tx, c })),
        (1.0..40.0f64, prof).prop_map(|(mu_tx, prof)| Path::Fog(FogLink { mu_tx, prof })),
    ]
}

fn nodes(seed: u64, paths: usize) -> NodeSet {
    common::random_nodes(&mut ChaCha8Rng::seed_from_u64(seed), paths, 2.0, 40.0)
}

proptest! {
    #[test]
    fn delay_grows_with_load(path in any_path(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let cap = path.stable_cap();
        let (lo, hi) = if a < b { (a * cap, b * cap) } else { (b * cap, a * cap) };
        let d_lo = path.delay_at_rate(lo).unwrap();
        let d_hi = path.delay_at_rate(hi).unwrap();
        prop_assert!(d_lo <= d_hi);
    }

    #[test]
    fn overload_is_rejected(path in any_path(), extra in 0.0..10.0f64) {
        prop_assert!(path.delay_at_rate(path.stable_cap() * (1.0 + 1e-9) + extra).is_err());
    }

    #[test]
    fn inverse_is_monotone(path in any_path(), x_i in 1.0..50.0f64, d1 in 0.0..5.0f64, d2 in 0.0..5.0f64) {
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(load_for_delay(&path, lo, x_i) <= load_for_delay(&path, hi, x_i));
    }

    #[test]
    fn solution_is_on_simplex_with_equal_delays(seed in any::<u64>(), paths in 1usize..8) {
        let n = nodes(seed, paths);
        let r = solve_distribution(&n, 0.0, 1e-12).unwrap();
        let fractions = r.distribution.path_fractions(&n);
        prop_assert!(fractions.iter().all(|&a| (0.0..=1.0).contains(&a)));
        prop_assert!((fractions.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (k, path) in n.paths().iter().enumerate() {
            if r.active_mask[k] {
                let d = path_delay(path, fractions[k], n.x_i).unwrap();
                prop_assert!((d - r.common_delay).abs() <= 1e-6 * r.common_delay);
            } else {
                // an idle path is no faster than the common delay even when empty
                prop_assert!(path.zero_load_delay() >= r.common_delay * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn extra_neighbor_never_hurts(seed in any::<u64>(), paths in 1usize..6, mu_tx in 1.0..40.0f64, mu in 1.0..40.0f64) {
        let mut n = nodes(seed, paths);
        let before = solve_distribution(&n, 0.0, 1e-12).unwrap().max_delay;
        n.neighbors.push(FogLink { mu_tx, prof: ComputeProfile::new(mu, 0.01).unwrap() });
        let after = solve_distribution(&n, 0.0, 1e-12).unwrap().max_delay;
        prop_assert!(after <= before * (1.0 + 1e-9));
    }

    #[test]
    fn grid_never_beats_solver(seed in any::<u64>(), paths in 1usize..=3) {
        let n = nodes(seed, paths);
        let solved = solve_distribution(&n, 0.0, 1e-12).unwrap().max_delay;
        let grid = grid_search(&n, 50, 0).unwrap().max_delay;
        prop_assert!(grid >= solved * (1.0 - 1e-9));
    }

    #[test]
    fn thresholds_only_fall(values in prop::collection::vec(-100.0..100.0f64, 0..20)) {
        let mut t = ThresholdSet::new();
        for v in &values {
            t.insert(*v);
        }
        let mut last = f64::INFINITY;
        while let Some(v) = t.remove_max() {
            prop_assert!(v <= last);
            last = v;
        }
        prop_assert_eq!(t.threshold(), f64::NEG_INFINITY);
    }

    #[test]
    fn online_selection_rules(
        scores in prop::collection::vec(1.0..100.0f64, 0..25),
        tau in 0usize..6,
        j in 1usize..6,
        fill in any::<bool>(),
    ) {
        let stream = common::scored_stream(&scores);
        let stream_end = if fill { StreamEnd::FillRemaining } else { StreamEnd::Strict };
        let calls = RefCell::new(Vec::new());
        let out = online_secretary(&stream, SecretaryParams { tau, max_neighbors: j, stream_end }, |chosen| {
            calls.borrow_mut().push(chosen.iter().map(|c| c.id).collect::<Vec<_>>());
            None
        })
        .unwrap();
        let ids: Vec<usize> = out.chosen.iter().map(|c| c.id).collect();

        prop_assert!(ids.len() <= j);
        // exploration arrivals are never taken
        prop_assert!(ids.iter().all(|&id| id >= tau));
        prop_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        // one solve per acceptance, each extending the last: decisions are never revised
        let calls = calls.into_inner();
        prop_assert_eq!(calls.len(), ids.len());
        for (k, call) in calls.iter().enumerate() {
            prop_assert_eq!(&call[..], &ids[..=k]);
        }
        if fill && scores.len() >= tau + j {
            prop_assert_eq!(ids.len(), j);
        }
    }

    #[test]
    fn ratio_in_unit_interval(scores in prop::collection::vec(1.0..100.0f64, 8..25), tau in 0usize..4, j in 1usize..4) {
        let stream = common::scored_stream(&scores);
        let params = SecretaryParams { tau, max_neighbors: j, stream_end: StreamEnd::FillRemaining };
        let online = online_secretary(&stream, params, |_| None).unwrap();
        let offline = offline_top_j(&stream, j).unwrap();
        let r = competitive_ratio(&online, &offline).unwrap();
        prop_assert!(r > 0.0 && r <= 1.0 + 1e-12, "{}", r);
    }
}
