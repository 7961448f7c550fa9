//! Exact solvers for the staged lane-level graph.
//!
//! Two algorithms with an identical result contract:
//!
//! - [`solve_dijkstra`]: multi-source, multi-criteria label setting with a
//!   lexicographic comparator; works without assuming any graph shape.
//! - [`solve_sweep`]: one forward pass over pods. Because all arcs point
//!   from pod i to pod i or i+1, once pod i's labels are settled pod i+1's
//!   follow from a scan of the boundary's turn arcs plus a within-pod
//!   lane-change closure, so no priority queue is needed and the run time is
//!   linear in the graph size.
//!
//! Both use the same deterministic tie-break (see [`parent_key`]), so their
//! outputs are identical down to the lane sequence and event list, not just
//! the cost.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::cost::CostTuple;
use crate::graph::{ArcIndex, ArcKind, LaneLevelGraph, NodeEnd, NodeId};

/// A maneuver along a traversal: any used arc other than a lane body. For
/// turn events `pod_index` is the boundary index (the turn leaves pod
/// `pod_index` and enters pod `pod_index + 1`); for lane changes it is the
/// pod in which the change happens.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TraversalEvent {
    pub pod_index: usize,
    pub kind: ArcKind,
    pub from_lane: u32,
    pub to_lane: u32,
}

/// A lane assignment for a whole path: one lane per segment, the summed arc
/// cost, and every non-body maneuver in travel order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Traversal {
    pub lane_sequence: Vec<u32>,
    pub total_cost: CostTuple,
    pub events: Vec<TraversalEvent>,
}

impl Traversal {
    /// A traversal is feasible iff it uses no forbidden turn.
    pub fn is_feasible(&self) -> bool {
        self.total_cost.infeasible == 0
    }
}

/// Per-node search state. A broken parent chain after settling is an
/// internal bug, and reconstruction treats it as a hard failure.
#[derive(Clone, Copy, Debug)]
struct Label {
    cost: Option<CostTuple>,
    parent: Option<ArcIndex>,
}

const UNREACHED: Label = Label { cost: None, parent: None };

const CHANGE_UNIT: CostTuple = ArcKind::LaneChange.cost();

/// Preference key for choosing among equal-cost parent arcs: non-change arcs
/// (turns, bodies) before lane changes, then the lower from-lane. The key
/// depends only on the arc itself, so the chosen parent is independent of
/// relaxation order; both solvers converge on the same parent forest and the
/// traversals they reconstruct are identical, which the greedy/oracle
/// comparisons and the determinism contract rely on.
fn parent_key(g: &LaneLevelGraph, arc: ArcIndex) -> (u8, u32) {
    let a = g.arc(arc);
    let class = matches!(a.kind, ArcKind::LaneChange) as u8;
    (class, g.node(a.from).lateral_index)
}

/// Multi-source multi-criteria Dijkstra: every entry lane of the first pod
/// starts in the queue at cost (0,0,0), and labels are ordered by the full
/// lexicographic tuple (no scalarization of the three components).
pub fn solve_dijkstra(g: &LaneLevelGraph) -> Traversal {
    let node_count = g.node_count() as usize;
    let mut labels = vec![UNREACHED; node_count];
    let mut settled = vec![false; node_count];
    let mut queue: BinaryHeap<Reverse<(CostTuple, NodeId)>> = BinaryHeap::new();

    for source in g.sources() {
        labels[source as usize].cost = Some(CostTuple::ZERO);
        queue.push(Reverse((CostTuple::ZERO, source)));
    }

    while let Some(Reverse((cost, node))) = queue.pop() {
        if settled[node as usize] {
            // Stale entry: the node was re-queued with a better cost earlier.
            continue;
        }
        settled[node as usize] = true;
        debug_assert_eq!(labels[node as usize].cost, Some(cost));

        for arc_idx in g.out_arcs(node) {
            let arc = g.arc(arc_idx);
            let cand = cost + arc.cost();
            let label = &mut labels[arc.to as usize];
            match label.cost {
                Some(existing) if cand > existing => {}
                Some(existing) if cand == existing => {
                    // Equal-cost alternative: keep the preferred parent.
                    // This fires even on settled nodes; zero-cost arcs can
                    // deliver an equal-cost parent after the node settled,
                    // and the canonical choice must consider every arc.
                    if let Some(current) = label.parent {
                        if parent_key(g, arc_idx) < parent_key(g, current) {
                            label.parent = Some(arc_idx);
                        }
                    }
                }
                _ => {
                    label.cost = Some(cand);
                    label.parent = Some(arc_idx);
                    queue.push(Reverse((cand, arc.to)));
                }
            }
        }
    }

    reconstruct(g, &labels)
}

/// Best cost into each lane after within-pod lane changes: the closure of
/// `pre` under steps of `CHANGE_UNIT` between adjacent lanes. Two
/// directional relaxation sweeps compute `out[l] = min over j of pre[j] +
/// (0,0,|l-j|)` in O(k): after the ascending pass `out[l]` holds the best
/// over j <= l, and the descending pass folds in j > l (a detour past `l`
/// and back can never beat the direct approach, so partial results compose).
pub(crate) fn lane_change_closure(pre: &[CostTuple], out: &mut Vec<CostTuple>) {
    out.clear();
    out.extend_from_slice(pre);
    let k = out.len();
    for l in 1..k {
        let cand = out[l - 1] + CHANGE_UNIT;
        if cand < out[l] {
            out[l] = cand;
        }
    }
    for l in (0..k.saturating_sub(1)).rev() {
        let cand = out[l + 1] + CHANGE_UNIT;
        if cand < out[l] {
            out[l] = cand;
        }
    }
}

/// Forward pod sweep. Processes pods in path order; for each pod it first
/// scans the incoming turn arcs (pre-closure entry costs), then settles the
/// entry nodes via the lane-change closure, then copies entry costs across
/// the zero-cost lane bodies. Each arc is visited a constant number of
/// times.
pub fn solve_sweep(g: &LaneLevelGraph) -> Traversal {
    let n = g.pod_count();
    let mut labels = vec![UNREACHED; g.node_count() as usize];

    let mut pre: Vec<CostTuple> = Vec::new();
    let mut turn_parent: Vec<Option<ArcIndex>> = Vec::new();
    let mut entry: Vec<CostTuple> = Vec::new();

    for i in 0..n {
        let k = g.pods()[i].lane_count() as usize;

        if i == 0 {
            // Multi-source start: every lane of the first segment at zero.
            pre.clear();
            pre.resize(k, CostTuple::ZERO);
            turn_parent.clear();
            turn_parent.resize(k, None);
        } else {
            pre.clear();
            pre.resize(k, CostTuple::new(u64::MAX, u64::MAX, u64::MAX));
            turn_parent.clear();
            turn_parent.resize(k, None);
            // Turn arcs are sorted by (exit lane, entry lane); strict
            // improvement therefore keeps the lowest exit lane among equal
            // turn candidates, matching the parent preference order.
            for idx in g.turn_arc_range(i - 1) {
                let arc = g.arc(idx as ArcIndex);
                let from_cost = labels[arc.from as usize]
                    .cost
                    .expect("upstream exit not settled");
                let cand = from_cost + arc.cost();
                let l = (arc.to - g.entry_node(i, 0)) as usize;
                if turn_parent[l].is_none() || cand < pre[l] {
                    pre[l] = cand;
                    turn_parent[l] = Some(idx as ArcIndex);
                }
            }
        }

        lane_change_closure(&pre, &mut entry);

        #[allow(clippy::needless_range_loop)] // l is an index into three buffers and a lane number
        for l in 0..k {
            // Parent preference (mirrors `parent_key`): a turn or source
            // achieving the final cost wins over any lane change; otherwise
            // a change from the left (lower from-lane) beats one from the
            // right.
            let parent = if entry[l] == pre[l] {
                turn_parent[l]
            } else if l > 0 && entry[l - 1] + CHANGE_UNIT == entry[l] {
                Some(g.lane_change_arc(i, l as u32 - 1, l as u32))
            } else {
                debug_assert!(l + 1 < k && entry[l + 1] + CHANGE_UNIT == entry[l]);
                Some(g.lane_change_arc(i, l as u32 + 1, l as u32))
            };
            let node = g.entry_node(i, l as u32);
            labels[node as usize] = Label { cost: Some(entry[l]), parent };
        }

        for (l, &cost) in entry.iter().enumerate() {
            let body = g.lane_body_arc(i, l as u32);
            let node = g.exit_node(i, l as u32);
            labels[node as usize] = Label { cost: Some(cost), parent: Some(body) };
        }
    }

    reconstruct(g, &labels)
}

/// Picks the best settled sink (lexicographically minimal cost, ties to the
/// lowest lateral index) and walks the parent chain back to a source.
fn reconstruct(g: &LaneLevelGraph, labels: &[Label]) -> Traversal {
    let mut best: Option<(CostTuple, NodeId)> = None;
    // Sink ids ascend with lateral index, so keeping the first strict
    // minimum implements the lowest-lateral tie-break.
    for sink in g.sinks() {
        let cost = labels[sink as usize]
            .cost
            .expect("sink unreachable: turn-layer completion violated");
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, sink));
        }
    }
    let (_, sink) = best.expect("graph has at least one sink");

    let mut walk: Vec<ArcIndex> = Vec::new();
    let mut node = sink;
    while let Some(parent) = labels[node as usize].parent {
        walk.push(parent);
        assert!(
            walk.len() <= g.arcs().len(),
            "parent chain cycle while reconstructing"
        );
        node = g.arc(parent).from;
    }
    let origin = g.node(node);
    assert!(
        origin.pod_index == 0 && origin.end == NodeEnd::Entry,
        "parent chain does not reach a source"
    );
    walk.reverse();
    traversal_from_arcs(g, &walk)
}

/// Builds the public traversal from a forward arc walk; the summed arc costs
/// are the cost accounting of record. Shared by both solvers and usable for
/// any explicit walk.
pub(crate) fn traversal_from_arcs(g: &LaneLevelGraph, arcs: &[ArcIndex]) -> Traversal {
    let mut lane_sequence = Vec::with_capacity(g.pod_count());
    let mut events = Vec::new();
    let mut total = CostTuple::ZERO;
    for &idx in arcs {
        let arc = g.arc(idx);
        total = total + arc.cost();
        let from = g.node(arc.from);
        let to = g.node(arc.to);
        match arc.kind {
            ArcKind::LaneBody => lane_sequence.push(from.lateral_index),
            kind => events.push(TraversalEvent {
                pod_index: from.pod_index,
                kind,
                from_lane: from.lateral_index,
                to_lane: to.lateral_index,
            }),
        }
    }
    debug_assert_eq!(lane_sequence.len(), g.pod_count(), "walk must drive every pod");
    debug_assert_eq!(total, event_cost_sum(&events), "events must re-sum to the total");
    Traversal { lane_sequence, total_cost: total, events }
}

/// Component-wise event tally; equals the traversal cost by construction.
pub fn event_cost_sum(events: &[TraversalEvent]) -> CostTuple {
    events
        .iter()
        .fold(CostTuple::ZERO, |acc, e| acc + e.kind.cost())
}
