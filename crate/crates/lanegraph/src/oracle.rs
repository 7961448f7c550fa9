//! Brute-force ground truth for the solvers.
//!
//! Enumerates every lane-level traversal directly from the network and path,
//! deliberately not going through the graph construction or either solver,
//! so agreement between oracle and solver checks the whole pipeline. A
//! traversal is an (entry lane, driven lane) choice per pod; the lane
//! changes between entry and driven lane are the forced monotone hop
//! sequence (revisiting a lane within a pod costs extra and is never
//! optimal, so capped-at-k-1 monotone sequences cover every candidate
//! optimum).
//!
//! The search space is the product over pods of k_i^2. The search prunes a
//! prefix when its accumulated cost plus an admissible lower bound on the
//! remaining boundaries is strictly worse than the best complete traversal:
//! costs only grow along a path and every completion pays at least the
//! bound, so such prefixes cannot contain a better completion. Prefixes
//! whose bound ties the best are fully explored so tie-breaking sees every
//! candidate. The final result is therefore identical to full enumeration
//! and independent of visit order, but `evaluated` counts only the complete
//! traversals actually reached.

use std::collections::HashMap;

use crate::cost::CostTuple;
use crate::graph::ArcKind;
use crate::model::{Convenience, ValidatedPath};
use crate::solver::{Traversal, TraversalEvent};

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub best: Traversal,
    /// Complete traversals reached (pruned subtrees not included).
    pub evaluated: u64,
    /// Size of the full enumeration space: product over pods of k_i^2,
    /// saturated at u64::MAX.
    pub search_space: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
pub enum OracleError {
    #[error("search space {search_space} exceeds cap {max_states}; use a solver instead")]
    SearchSpaceTooLarge { search_space: u64, max_states: u64 },
}

/// One maneuver of a candidate traversal, mirroring the graph's arc kinds.
#[derive(Clone, Copy, Debug)]
struct Step {
    kind: ArcKind,
    pod: usize,
    from: u32,
    to: u32,
}

impl Step {
    /// Tie-break key, identical to the solvers' parent preference: arc class
    /// (lane changes rank after everything else), then the from-lane.
    fn key(&self) -> (u8, u32) {
        (matches!(self.kind, ArcKind::LaneChange) as u8, self.from)
    }
}

struct Search<'a> {
    path: &'a ValidatedPath<'a>,
    /// Declared turns per boundary, rebuilt here from the raw connection
    /// list (independent of the graph module's lookup structures).
    boundaries: Vec<HashMap<(u32, u32), Convenience>>,
    /// `suffix_min[i]` sums the lexicographically minimal turn cost of every
    /// boundary from `i` on; any completion of a prefix driving in pod `i`
    /// costs at least this much more. Summing per-boundary lex-minima is
    /// admissible for the lexicographic order: the lex-min arc carries the
    /// boundary's minimal first component, and a completion matching the
    /// bound on the leading components can only use arcs that are lex-minimal
    /// on those components, which bounds the next component in turn.
    suffix_min: Vec<CostTuple>,
    best: Option<(CostTuple, Vec<Step>)>,
    evaluated: u64,
}

impl Search<'_> {
    fn turn_kind(&self, boundary: usize, from: u32, to: u32) -> ArcKind {
        match self.boundaries[boundary].get(&(from, to)) {
            Some(Convenience::Convenient) => ArcKind::FeasibleTurn,
            Some(Convenience::Inconvenient) => ArcKind::UnwantedTurn,
            None => ArcKind::InfeasibleTurn,
        }
    }

    /// Pushes the monotone hop sequence `from -> to` within `pod`.
    fn push_changes(walk: &mut Vec<Step>, pod: usize, from: u32, to: u32) {
        let step = if to >= from { 1i64 } else { -1 };
        let mut lane = from as i64;
        while lane != to as i64 {
            walk.push(Step {
                kind: ArcKind::LaneChange,
                pod,
                from: lane as u32,
                to: (lane + step) as u32,
            });
            lane += step;
        }
    }

    /// True if (cost, walk) beats the incumbent under the solver's order:
    /// lexicographic cost, then lowest final lane, then the lexicographically
    /// smallest reversed sequence of per-step keys. The last criterion is
    /// exactly what the solvers' walk-back produces: from the chosen sink
    /// they repeatedly take the preference-minimal parent, and among
    /// equal-cost traversals any two distinct walks differ at some step from
    /// the end, where distinct incoming maneuvers always have distinct keys.
    fn better(&self, cost: CostTuple, walk: &[Step]) -> bool {
        let Some((best_cost, best_walk)) = &self.best else {
            return true;
        };
        match cost.cmp(best_cost) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
        let sink = |w: &[Step]| w.last().expect("walk is non-empty").from;
        match sink(walk).cmp(&sink(best_walk)) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
        // Equal cost implies equal maneuver counts, hence equal length.
        debug_assert_eq!(walk.len(), best_walk.len());
        for (a, b) in walk.iter().rev().zip(best_walk.iter().rev()) {
            match a.key().cmp(&b.key()) {
                std::cmp::Ordering::Less => return true,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Equal => {}
            }
        }
        false
    }

    fn record_if_better(&mut self, cost: CostTuple, walk: &[Step]) {
        self.evaluated += 1;
        if self.better(cost, walk) {
            self.best = Some((cost, walk.to_vec()));
        }
    }

    /// Extends a partial traversal that currently drives `driven` in `pod`.
    fn dfs(&mut self, pod: usize, driven: u32, cost: CostTuple, walk: &mut Vec<Step>) {
        if pod + 1 == self.path.len() {
            self.record_if_better(cost, walk);
            return;
        }
        let k_next = self.path.lane_count(pod + 1);
        for entry in 0..k_next {
            let kind = self.turn_kind(pod, driven, entry);
            for target in 0..k_next {
                let step_cost = kind.cost()
                    + CostTuple::new(0, 0, entry.abs_diff(target) as u64);
                let next_cost = cost + step_cost;
                // Prefixes that cannot reach the incumbent even paying only
                // the per-boundary minimum from here on are dropped; ties
                // continue so the tie-break sees every candidate.
                if let Some((best_cost, _)) = &self.best {
                    if next_cost + self.suffix_min[pod + 1] > *best_cost {
                        continue;
                    }
                }
                let depth = walk.len();
                walk.push(Step { kind, pod, from: driven, to: entry });
                Self::push_changes(walk, pod + 1, entry, target);
                walk.push(Step {
                    kind: ArcKind::LaneBody,
                    pod: pod + 1,
                    from: target,
                    to: target,
                });
                self.dfs(pod + 1, target, next_cost, walk);
                walk.truncate(depth);
            }
        }
    }
}

/// Per-pod lower bound on the cost of finishing the traversal; see the
/// `suffix_min` field. A boundary's lex-min turn cost is zero if any pair is
/// declared convenient, otherwise the cheapest outcome among declared
/// inconvenient pairs and (if any pair is undeclared) the infeasible turn.
fn suffix_minima(
    path: &ValidatedPath<'_>,
    boundaries: &[HashMap<(u32, u32), Convenience>],
) -> Vec<CostTuple> {
    let n = path.len();
    let mut out = vec![CostTuple::ZERO; n];
    for b in (0..n.saturating_sub(1)).rev() {
        let pairs = u64::from(path.lane_count(b)) * u64::from(path.lane_count(b + 1));
        let declared = &boundaries[b];
        let mut min: Option<CostTuple> =
            ((declared.len() as u64) < pairs).then(|| ArcKind::InfeasibleTurn.cost());
        for convenience in declared.values() {
            let cost = match convenience {
                Convenience::Convenient => ArcKind::FeasibleTurn.cost(),
                Convenience::Inconvenient => ArcKind::UnwantedTurn.cost(),
            };
            min = Some(min.map_or(cost, |m| m.min(cost)));
        }
        out[b] = out[b + 1] + min.expect("boundary has at least one lane pair");
    }
    out
}

/// Exhaustively finds the lexicographically minimal traversal, with the same
/// tie-break as the solvers. `max_states` caps the enumeration space (k_i^2
/// per pod); larger instances are refused rather than silently truncated.
pub fn oracle_best(
    path: &ValidatedPath<'_>,
    max_states: u64,
) -> Result<OracleResult, OracleError> {
    let n = path.len();
    let mut space: u128 = 1;
    for i in 0..n {
        let k = path.lane_count(i) as u128;
        space = space.saturating_mul(k * k);
    }
    let search_space = space.min(u64::MAX as u128) as u64;
    if space > max_states as u128 {
        return Err(OracleError::SearchSpaceTooLarge { search_space, max_states });
    }

    let network = path.network();
    let boundaries: Vec<HashMap<(u32, u32), Convenience>> = (0..n.saturating_sub(1))
        .map(|i| {
            let from = &path.segment(i).id;
            let to = &path.segment(i + 1).id;
            network
                .connections()
                .iter()
                .filter(|c| c.from_segment == *from && c.to_segment == *to)
                .map(|c| ((c.from_lane, c.to_lane), c.convenience))
                .collect()
        })
        .collect();

    let suffix_min = suffix_minima(path, &boundaries);
    let mut search = Search { path, boundaries, suffix_min, best: None, evaluated: 0 };
    let k0 = path.lane_count(0);
    let mut walk = Vec::new();
    for entry in 0..k0 {
        for target in 0..k0 {
            let cost = CostTuple::new(0, 0, entry.abs_diff(target) as u64);
            if let Some((best_cost, _)) = &search.best {
                if cost + search.suffix_min[0] > *best_cost {
                    continue;
                }
            }
            walk.clear();
            Search::push_changes(&mut walk, 0, entry, target);
            walk.push(Step { kind: ArcKind::LaneBody, pod: 0, from: target, to: target });
            search.dfs(0, target, cost, &mut walk);
        }
    }

    let (total_cost, steps) = search.best.expect("path has at least one traversal");
    let mut lane_sequence = Vec::with_capacity(n);
    let mut events = Vec::new();
    for step in &steps {
        match step.kind {
            ArcKind::LaneBody => lane_sequence.push(step.from),
            kind => events.push(TraversalEvent {
                pod_index: step.pod,
                kind,
                from_lane: step.from,
                to_lane: step.to,
            }),
        }
    }
    debug_assert_eq!(lane_sequence.len(), n);
    Ok(OracleResult {
        best: Traversal { lane_sequence, total_cost, events },
        evaluated: search.evaluated,
        search_space,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::LaneLevelGraph;
    use crate::model::{Convenience, validate_path};
    use crate::solver::{solve_dijkstra, solve_sweep};

    #[test]
    fn single_lane_single_segment() {
        let (net, path) = fixtures::single_segment(1);
        let valid = validate_path(&net, &path).unwrap();
        let result = oracle_best(&valid, 1_000).unwrap();
        assert_eq!(result.best.total_cost, CostTuple::ZERO);
        assert_eq!(result.best.lane_sequence, vec![0]);
        assert_eq!(result.search_space, 1);
        assert!(result.evaluated >= 1);
    }

    #[test]
    fn dependency_instance_matches_solver_exactly() {
        let (net, path) = fixtures::merge_funnel_instance();
        let valid = validate_path(&net, &path).unwrap();
        let g = LaneLevelGraph::build(&valid);
        let result = oracle_best(&valid, 1_000_000).unwrap();
        assert_eq!(result.best.total_cost, CostTuple::ZERO);
        assert_eq!(result.best.lane_sequence, vec![1, 1, 0]);
        assert_eq!(result.best, solve_dijkstra(&g));
        assert_eq!(result.best, solve_sweep(&g));
        // Pods of 2, 2 and 1 lanes: (2*2) * (2*2) * (1*1) states.
        assert_eq!(result.search_space, 16);
    }

    #[test]
    fn crossing_connection_needs_no_changes() {
        let (net, path) = fixtures::chain_network(
            &[2, 2],
            &[(0, 0, 1, Convenience::Convenient)],
        );
        let valid = validate_path(&net, &path).unwrap();
        let result = oracle_best(&valid, 1_000).unwrap();
        assert_eq!(result.best.total_cost, CostTuple::ZERO);
        assert_eq!(result.best.lane_sequence, vec![0, 1]);
    }

    #[test]
    fn cap_is_enforced() {
        let (net, path) = fixtures::two_by_two_full();
        let valid = validate_path(&net, &path).unwrap();
        let err = oracle_best(&valid, 3).unwrap_err();
        assert_eq!(
            err,
            OracleError::SearchSpaceTooLarge { search_space: 16, max_states: 3 }
        );
    }

    #[test]
    fn tie_rich_instance_agrees_with_both_solvers() {
        let (net, path) = fixtures::two_by_two_full();
        let valid = validate_path(&net, &path).unwrap();
        let g = LaneLevelGraph::build(&valid);
        let result = oracle_best(&valid, 1_000).unwrap();
        assert_eq!(result.best, solve_dijkstra(&g));
        assert_eq!(result.best, solve_sweep(&g));
        assert_eq!(result.best.lane_sequence, vec![0, 0]);
    }
}
