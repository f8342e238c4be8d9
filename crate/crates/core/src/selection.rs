//! Choosing which neighboring fog nodes join the network.
//!
//! Offline, with every candidate known, the best set is simply the `J`
//! highest scores. Online, candidates arrive one at a time and must be
//! accepted or rejected on arrival: the first `tau` arrivals are only
//! observed to build a threshold set, after which an arrival is accepted
//! when it beats the largest remaining threshold, and that threshold is
//! consumed.

use crate::error::{Error, Result};
use crate::queueing::{ComputeProfile, FogLink, Position};
use crate::solver::SolveReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FogCandidate {
    pub id: usize,
    pub position: Position,
    /// Link rate from the initiator to this node, packets/s.
    pub mu_tx: f64,
    pub prof: ComputeProfile,
    /// 1-based position in the arrival stream.
    pub arrival_index: usize,
}

impl FogCandidate {
    pub fn score(&self) -> f64 {
        score(self)
    }

    pub fn link(&self) -> FogLink {
        FogLink { mu_tx: self.mu_tx, prof: self.prof }
    }
}

/// Link rate plus compute rate: what the selection objective maximizes.
pub fn score(candidate: &FogCandidate) -> f64 {
    candidate.mu_tx + candidate.prof.mu
}

/// Scores observed during exploration. Acceptance thresholds are drawn
/// from the top, and each acceptance consumes the value it beat.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThresholdSet {
    values: Vec<f64>,
}

impl ThresholdSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, value: f64) {
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Current acceptance threshold; `-inf` once every observation has
    /// been consumed, so later arrivals are accepted unconditionally.
    pub fn threshold(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Removes one copy of the current maximum.
    pub fn remove_max(&mut self) -> Option<f64> {
        let (idx, _) = self.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        Some(self.values.swap_remove(idx))
    }
}

/// What happens when the stream is about to run out with open slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StreamEnd {
    /// Only the threshold rule accepts; slots may stay empty.
    Strict,
    /// Once the arrivals left equal the open slots, accept each of them:
    /// a rejected node cannot be recalled, so rejecting would only leave
    /// the slot unused.
    #[default]
    FillRemaining,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecretaryParams {
    /// Number of arrivals observed before any acceptance.
    pub tau: usize,
    /// Target number of neighbors `J`.
    pub max_neighbors: usize,
    pub stream_end: StreamEnd,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionOutcome {
    /// Selected candidates in arrival order.
    pub chosen: Vec<FogCandidate>,
    pub scores_sum: f64,
    /// One report per acceptance that the solver hook answered.
    pub solve_trace: Vec<SolveReport>,
    pub final_report: Option<SolveReport>,
    pub competitive_ratio: Option<f64>,
    /// The stream ended before the target size was reached.
    pub truncated: bool,
    /// Candidates accepted by [`StreamEnd::FillRemaining`] rather than by
    /// beating a threshold.
    pub filled_at_end: usize,
}

fn sum_scores(chosen: &[FogCandidate]) -> f64 {
    chosen.iter().map(score).fold(0.0, |a, s| a + s)
}

/// The `j` best candidates by score, ties going to the earlier arrival.
/// Returned in arrival order.
pub fn offline_top_j(candidates: &[FogCandidate], j: usize) -> Result<SelectionOutcome> {
    if j > candidates.len() {
        return Err(Error::domain(format!("cannot choose {j} nodes from {} candidates", candidates.len())));
    }
    let mut ranked: Vec<&FogCandidate> = candidates.iter().collect();
    ranked.sort_by(|a, b| b.score().total_cmp(&a.score()).then(a.arrival_index.cmp(&b.arrival_index)));
    let mut chosen: Vec<FogCandidate> = ranked[..j].iter().map(|c| **c).collect();
    chosen.sort_by_key(|c| c.arrival_index);
    Ok(SelectionOutcome { scores_sum: sum_scores(&chosen), chosen, ..Default::default() })
}

/// Runs the exploration/exploitation rule over `stream`.
///
/// `solve` is called with the current selection after every acceptance;
/// its answers are kept in `solve_trace` and the last one becomes
/// `final_report`.
pub fn online_secretary<F>(stream: &[FogCandidate], params: SecretaryParams, mut solve: F) -> Result<SelectionOutcome>
where
    F: FnMut(&[FogCandidate]) -> Option<SolveReport>,
{
    let SecretaryParams { tau, max_neighbors, stream_end } = params;
    if max_neighbors == 0 {
        return Err(Error::domain("the target number of neighbors must be at least 1"));
    }

    let mut outcome = SelectionOutcome::default();
    if stream.len() < tau {
        outcome.truncated = true;
        return Ok(outcome);
    }

    let mut thresholds = ThresholdSet::new();
    for candidate in &stream[..tau] {
        thresholds.insert(candidate.score());
    }

    for (offset, candidate) in stream[tau..].iter().enumerate() {
        if outcome.chosen.len() == max_neighbors {
            break;
        }
        let remaining = stream.len() - tau - offset;
        let open = max_neighbors - outcome.chosen.len();
        let threshold = thresholds.threshold();

        let accepted = if candidate.score() > threshold {
            thresholds.remove_max();
            true
        } else if stream_end == StreamEnd::FillRemaining && remaining <= open {
            outcome.filled_at_end += 1;
            true
        } else {
            false
        };

        if accepted {
            outcome.chosen.push(*candidate);
            if let Some(report) = solve(&outcome.chosen) {
                outcome.solve_trace.push(report);
            }
        }
    }

    outcome.truncated = outcome.chosen.len() < max_neighbors;
    outcome.scores_sum = sum_scores(&outcome.chosen);
    outcome.final_report = outcome.solve_trace.last().cloned();
    Ok(outcome)
}

/// Online score sum over the offline optimum; unfilled slots count zero.
pub fn competitive_ratio(online: &SelectionOutcome, offline: &SelectionOutcome) -> Result<f64> {
    if !(offline.scores_sum > 0.0) {
        return Err(Error::domain("offline score sum must be positive"));
    }
    Ok(online.scores_sum / offline.scores_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Candidates whose score equals the given value (compute rate fixed at 1).
    fn stream(scores: &[f64]) -> Vec<FogCandidate> {
        scores
            .iter()
            .enumerate()
            .map(|(k, &s)| FogCandidate {
                id: k,
                position: Position::new(0.0, 0.0),
                mu_tx: s - 1.0,
                prof: ComputeProfile { mu: 1.0, c: 0.0 },
                arrival_index: k + 1,
            })
            .collect()
    }

    fn scores_of(o: &SelectionOutcome) -> Vec<f64> {
        o.chosen.iter().map(FogCandidate::score).collect()
    }

    fn strict(tau: usize, j: usize) -> SecretaryParams {
        SecretaryParams { tau, max_neighbors: j, stream_end: StreamEnd::Strict }
    }

    #[test]
    fn score_examples() {
        let c = FogCandidate {
            id: 0,
            position: Position::new(1.0, 2.0),
            mu_tx: 20.0,
            prof: ComputeProfile { mu: 8.0, c: 0.05 },
            arrival_index: 1,
        };
        assert_eq!(score(&c), 28.0);
        let idle = FogCandidate { mu_tx: 0.0, ..c };
        assert_eq!(idle.score(), 8.0);
        let swapped = FogCandidate { mu_tx: 8.0, prof: ComputeProfile { mu: 20.0, c: 0.05 }, ..c };
        assert_eq!(swapped.score(), c.score());
    }

    #[test]
    fn threshold_set_behaviour() {
        let mut t = ThresholdSet::new();
        assert_eq!(t.threshold(), f64::NEG_INFINITY);
        assert_eq!(t.remove_max(), None);
        for v in [3.0, 7.0, 7.0, 5.0] {
            t.insert(v);
        }
        assert_eq!(t.remove_max(), Some(7.0));
        assert_eq!(t.threshold(), 7.0);
        assert_eq!(t.remove_max(), Some(7.0));
        assert_eq!(t.threshold(), 5.0);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn offline_examples() {
        let s = stream(&[5.0, 9.0, 7.0]);
        let o = offline_top_j(&s, 2).unwrap();
        assert_eq!(scores_of(&o), vec![9.0, 7.0]);
        assert_eq!(o.scores_sum, 16.0);
        assert_eq!(offline_top_j(&s, 3).unwrap().chosen.len(), 3);
        let none = offline_top_j(&s, 0).unwrap();
        assert!(none.chosen.is_empty());
        assert_eq!(none.scores_sum, 0.0);
        assert!(offline_top_j(&s, 4).is_err());
    }

    #[test]
    fn offline_ties_prefer_earlier_arrival() {
        let s = stream(&[4.0, 6.0, 6.0, 6.0]);
        let o = offline_top_j(&s, 2).unwrap();
        assert_eq!(o.chosen.iter().map(|c| c.arrival_index).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn hand_traced_stream() {
        let s = stream(&[3.0, 7.0, 5.0, 6.0, 8.0, 4.0, 9.0]);
        let mut calls = 0;
        let o = online_secretary(&s, strict(3, 2), |sel| {
            calls += 1;
            assert_eq!(sel.len(), calls);
            None
        })
        .unwrap();
        assert_eq!(scores_of(&o), vec![8.0, 9.0]);
        assert_eq!(calls, 2);
        assert!(!o.truncated);

        let off = offline_top_j(&s, 2).unwrap();
        assert_eq!(competitive_ratio(&o, &off).unwrap(), 1.0);
    }

    #[test]
    fn nothing_beats_the_threshold() {
        let s = stream(&[3.0, 7.0, 5.0, 1.0, 2.0, 2.5]);
        let o = online_secretary(&s, strict(3, 2), |_| None).unwrap();
        assert!(o.chosen.is_empty());
        assert!(o.truncated);
        assert_eq!(o.scores_sum, 0.0);
    }

    #[test]
    fn fill_remaining_uses_last_arrivals() {
        let s = stream(&[3.0, 7.0, 5.0, 1.0, 2.0, 2.5]);
        let params = SecretaryParams { tau: 3, max_neighbors: 2, stream_end: StreamEnd::FillRemaining };
        let o = online_secretary(&s, params, |_| None).unwrap();
        assert_eq!(scores_of(&o), vec![2.0, 2.5]);
        assert_eq!(o.filled_at_end, 2);
        assert!(!o.truncated);
    }

    #[test]
    fn no_exploration_accepts_first_arrivals() {
        let s = stream(&[3.0, 1.0, 2.0, 9.0]);
        let o = online_secretary(&s, strict(0, 3), |_| None).unwrap();
        assert_eq!(scores_of(&o), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn exhausted_thresholds_accept_everything() {
        // tau = 1 < J = 3: after the first acceptance the set is empty.
        let s = stream(&[5.0, 6.0, 1.0, 2.0, 3.0]);
        let o = online_secretary(&s, strict(1, 3), |_| None).unwrap();
        assert_eq!(scores_of(&o), vec![6.0, 1.0, 2.0]);
    }

    #[test]
    fn ties_are_rejections() {
        let s = stream(&[5.0, 5.0, 6.0]);
        let o = online_secretary(&s, strict(1, 1), |_| None).unwrap();
        assert_eq!(scores_of(&o), vec![6.0]);
    }

    #[test]
    fn short_stream_is_truncated() {
        let s = stream(&[5.0, 6.0]);
        let o = online_secretary(&s, strict(3, 1), |_| None).unwrap();
        assert!(o.truncated);
        assert!(o.chosen.is_empty());
        assert!(online_secretary(&s, strict(0, 0), |_| None).is_err());
    }

    #[test]
    fn ratio_examples() {
        let s = stream(&[7.0, 9.0]);
        let on = SelectionOutcome { scores_sum: 7.0, chosen: vec![s[0]], ..Default::default() };
        let off = offline_top_j(&s, 1).unwrap();
        assert!((competitive_ratio(&on, &off).unwrap() - 7.0 / 9.0).abs() < 1e-15);
        assert!(competitive_ratio(&on, &SelectionOutcome::default()).is_err());
    }
}
