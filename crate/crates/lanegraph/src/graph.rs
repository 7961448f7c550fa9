//! Lane-level graph construction.
//!
//! A validated path of n segments becomes a staged graph of n pods. Pod i
//! holds one Entry and one Exit node per lane of segment i, plus:
//!
//! - a LaneBody arc Entry(l) -> Exit(l) per lane (cost (0,0,0)),
//! - LaneChange arcs in both directions between laterally adjacent Entry
//!   nodes (cost (0,0,1) per hop); placed on the Entry side, so a driver
//!   changes lanes at the beginning of a segment, before the body,
//! - turn arcs Exit(u) of pod i -> Entry(l) of pod i+1 for every ordered
//!   lane pair (u, l): a declared connection yields FeasibleTurn (0,0,0) or
//!   UnwantedTurn (0,1,0) depending on its convenience, and every undeclared
//!   pair yields InfeasibleTurn (1,0,0). Completing the bipartite turn layer
//!   with infeasible arcs guarantees every source reaches every sink, so a
//!   best-effort traversal always exists even over broken map data.
//!
//! Entry nodes of pod 0 are the sources (the driver may start in any lane of
//! the first segment); Exit nodes of pod n-1 are the sinks.

use crate::cost::CostTuple;
use crate::model::{Convenience, Path, SegmentId, TurnTable, ValidatedPath};

pub type NodeId = u32;
pub type ArcIndex = u32;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeEnd {
    Entry,
    Exit,
}

/// Decoded identity of a graph node.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LaneNode {
    pub pod_index: usize,
    pub lateral_index: u32,
    pub end: NodeEnd,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    LaneBody,
    FeasibleTurn,
    UnwantedTurn,
    InfeasibleTurn,
    LaneChange,
}

impl ArcKind {
    /// Kind determines cost exactly; arcs carry no separate weight.
    pub const fn cost(self) -> CostTuple {
        match self {
            ArcKind::LaneBody | ArcKind::FeasibleTurn => CostTuple::ZERO,
            ArcKind::UnwantedTurn => CostTuple::new(0, 1, 0),
            ArcKind::InfeasibleTurn => CostTuple::new(1, 0, 0),
            ArcKind::LaneChange => CostTuple::new(0, 0, 1),
        }
    }

    pub const fn is_turn(self) -> bool {
        matches!(
            self,
            ArcKind::FeasibleTurn | ArcKind::UnwantedTurn | ArcKind::InfeasibleTurn
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Arc {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: ArcKind,
}

impl Arc {
    pub fn cost(&self) -> CostTuple {
        self.kind.cost()
    }
}

/// One pod: the lane nodes of one path segment plus the outgoing turn layer.
#[derive(Clone, Debug)]
pub struct Pod {
    segment_id: SegmentId,
    lane_count: u32,
    node_base: NodeId,
    arc_start: u32,
    /// Index of the first turn arc (equals the end of the within-pod arcs).
    turn_start: u32,
}

impl Pod {
    pub fn segment_id(&self) -> &SegmentId {
        &self.segment_id
    }

    pub fn lane_count(&self) -> u32 {
        self.lane_count
    }
}

/// Maximum number of arcs attributable to one pod boundary: the complete
/// bipartite turn layer plus the lane-change arcs of the downstream pod.
pub fn pod_arc_bound(k_out: u32, k_in: u32) -> u64 {
    debug_assert!(k_out >= 1 && k_in >= 1);
    k_out as u64 * k_in as u64 + 2 * (k_out.max(k_in) as u64 - 1)
}

/// The staged lane-level graph for one path. Immutable once built.
#[derive(Clone, Debug)]
pub struct LaneLevelGraph {
    pods: Vec<Pod>,
    /// All arcs, grouped by pod in a fixed layout: for pod i of k lanes,
    /// `arc_start..` holds k LaneBody arcs (by lane), k-1 ascending
    /// LaneChange arcs (l -> l+1, by l), k-1 descending ones (l+1 -> l, by
    /// l), then the boundary's turn arcs sorted by (from_lane, to_lane).
    arcs: Vec<Arc>,
    node_count: u32,
    /// CSR over outgoing arcs: `out_arcs[out_first[v]..out_first[v+1]]`.
    out_first: Vec<u32>,
    out_arcs: Vec<ArcIndex>,
}

impl LaneLevelGraph {
    /// Builds the staged graph for a validated path.
    pub fn build(path: &ValidatedPath<'_>) -> LaneLevelGraph {
        let network = path.network();
        let turns = TurnTable::build(network);
        let n = path.len();

        let mut pods = Vec::with_capacity(n);
        let mut node_base: NodeId = 0;
        let mut arc_start: u32 = 0;
        for i in 0..n {
            let k = path.lane_count(i);
            let within = k + 2 * (k - 1);
            let turn_count = if i + 1 < n {
                k * path.lane_count(i + 1)
            } else {
                0
            };
            pods.push(Pod {
                segment_id: path.segment(i).id.clone(),
                lane_count: k,
                node_base,
                arc_start,
                turn_start: arc_start + within,
            });
            node_base += 2 * k;
            arc_start = arc_start + within + turn_count;
        }
        let node_count = node_base;

        let mut arcs = Vec::with_capacity(arc_start as usize);
        for i in 0..n {
            let k = path.lane_count(i);
            let pod = &pods[i];
            for l in 0..k {
                arcs.push(Arc {
                    from: pod.node_base + l,
                    to: pod.node_base + k + l,
                    kind: ArcKind::LaneBody,
                });
            }
            for l in 0..k - 1 {
                arcs.push(Arc {
                    from: pod.node_base + l,
                    to: pod.node_base + l + 1,
                    kind: ArcKind::LaneChange,
                });
            }
            for l in 0..k - 1 {
                arcs.push(Arc {
                    from: pod.node_base + l + 1,
                    to: pod.node_base + l,
                    kind: ArcKind::LaneChange,
                });
            }
            if i + 1 < n {
                let k_in = path.lane_count(i + 1);
                let next_base = pods[i + 1].node_base;
                let from_idx = path.segment_index(i);
                let to_idx = path.segment_index(i + 1);
                for u in 0..k {
                    for l in 0..k_in {
                        let kind = match turns.lookup(from_idx, to_idx, u, l) {
                            Some(Convenience::Convenient) => ArcKind::FeasibleTurn,
                            Some(Convenience::Inconvenient) => ArcKind::UnwantedTurn,
                            None => ArcKind::InfeasibleTurn,
                        };
                        arcs.push(Arc {
                            from: pod.node_base + k + u,
                            to: next_base + l,
                            kind,
                        });
                    }
                }
            }
        }
        debug_assert_eq!(arcs.len(), arc_start as usize);

        // CSR: stable bucket fill keeps each node's arc list in arc-index
        // order, which downstream tie-breaking relies on being deterministic.
        let mut out_first = vec![0u32; node_count as usize + 1];
        for arc in &arcs {
            out_first[arc.from as usize + 1] += 1;
        }
        for v in 0..node_count as usize {
            out_first[v + 1] += out_first[v];
        }
        let mut cursor = out_first.clone();
        let mut out_arcs = vec![0 as ArcIndex; arcs.len()];
        for (idx, arc) in arcs.iter().enumerate() {
            let slot = cursor[arc.from as usize];
            out_arcs[slot as usize] = idx as ArcIndex;
            cursor[arc.from as usize] = slot + 1;
        }

        LaneLevelGraph { pods, arcs, node_count, out_first, out_arcs }
    }

    pub fn pod_count(&self) -> usize {
        self.pods.len()
    }

    pub fn pods(&self) -> &[Pod] {
        &self.pods
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, idx: ArcIndex) -> &Arc {
        &self.arcs[idx as usize]
    }

    pub fn entry_node(&self, pod: usize, lane: u32) -> NodeId {
        debug_assert!(lane < self.pods[pod].lane_count);
        self.pods[pod].node_base + lane
    }

    pub fn exit_node(&self, pod: usize, lane: u32) -> NodeId {
        let p = &self.pods[pod];
        debug_assert!(lane < p.lane_count);
        p.node_base + p.lane_count + lane
    }

    /// Decodes a raw node id back into (pod, lane, end).
    pub fn node(&self, id: NodeId) -> LaneNode {
        debug_assert!(id < self.node_count);
        let pod_index = match self.pods.binary_search_by(|p| p.node_base.cmp(&id)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let p = &self.pods[pod_index];
        let offset = id - p.node_base;
        if offset < p.lane_count {
            LaneNode { pod_index, lateral_index: offset, end: NodeEnd::Entry }
        } else {
            LaneNode {
                pod_index,
                lateral_index: offset - p.lane_count,
                end: NodeEnd::Exit,
            }
        }
    }

    pub fn lane_body_arc(&self, pod: usize, lane: u32) -> ArcIndex {
        debug_assert!(lane < self.pods[pod].lane_count);
        self.pods[pod].arc_start + lane
    }

    /// Arc for the single lateral hop `from -> to` (|from - to| must be 1).
    pub fn lane_change_arc(&self, pod: usize, from: u32, to: u32) -> ArcIndex {
        let p = &self.pods[pod];
        let k = p.lane_count;
        debug_assert!(from < k && to < k);
        let idx = if to == from + 1 {
            p.arc_start + k + from
        } else if from == to + 1 {
            p.arc_start + k + (k - 1) + to
        } else {
            panic!("lane change {from} -> {to} is not a single lateral hop");
        };
        debug_assert_eq!(self.arcs[idx as usize].kind, ArcKind::LaneChange);
        idx
    }

    /// Turn arc crossing `boundary` (between pods boundary and boundary+1)
    /// from exit lane `u` to entry lane `l`. The turn layer is complete, so
    /// the index is arithmetic.
    pub fn turn_arc(&self, boundary: usize, u: u32, l: u32) -> ArcIndex {
        let k_in = self.pods[boundary + 1].lane_count;
        debug_assert!(u < self.pods[boundary].lane_count && l < k_in);
        let idx = self.pods[boundary].turn_start + u * k_in + l;
        debug_assert!(self.arcs[idx as usize].kind.is_turn());
        idx
    }

    /// All turn arcs crossing `boundary`, sorted by (from_lane, to_lane).
    pub fn turn_arc_range(&self, boundary: usize) -> std::ops::Range<usize> {
        debug_assert!(boundary + 1 < self.pods.len());
        self.pods[boundary].turn_start as usize..self.pods[boundary + 1].arc_start as usize
    }

    /// Arcs attributable to `boundary`: its turn layer plus the downstream
    /// pod's lane-change arcs.
    pub fn boundary_arc_count(&self, boundary: usize) -> u64 {
        let turn = self.turn_arc_range(boundary).len() as u64;
        turn + 2 * (self.pods[boundary + 1].lane_count as u64 - 1)
    }

    pub fn out_arcs(&self, node: NodeId) -> impl Iterator<Item = ArcIndex> + '_ {
        let lo = self.out_first[node as usize] as usize;
        let hi = self.out_first[node as usize + 1] as usize;
        self.out_arcs[lo..hi].iter().copied()
    }

    /// Entry nodes of pod 0.
    pub fn sources(&self) -> impl Iterator<Item = NodeId> + '_ {
        let p = &self.pods[0];
        p.node_base..p.node_base + p.lane_count
    }

    /// Exit nodes of the last pod.
    pub fn sinks(&self) -> impl Iterator<Item = NodeId> + '_ {
        let p = self.pods.last().expect("graph has at least one pod");
        p.node_base + p.lane_count..p.node_base + 2 * p.lane_count
    }

    /// Checks every structural invariant of the staged graph; returns the
    /// first violation found. Used by tests and by `collapse`, whose
    /// bijectivity claim only holds on well-formed graphs.
    pub fn verify_invariants(&self) -> Result<(), String> {
        if self.pods.is_empty() {
            return Err("graph has no pods".into());
        }
        let n = self.pods.len();
        for (i, pod) in self.pods.iter().enumerate() {
            if pod.lane_count == 0 {
                return Err(format!("pod {i} has zero lanes"));
            }
            let expected_base = if i == 0 {
                0
            } else {
                self.pods[i - 1].node_base + 2 * self.pods[i - 1].lane_count
            };
            if pod.node_base != expected_base {
                return Err(format!("pod {i} node base mismatch"));
            }
        }

        for (idx, arc) in self.arcs.iter().enumerate() {
            let from = self.node(arc.from);
            let to = self.node(arc.to);
            let ok = match arc.kind {
                ArcKind::LaneBody => {
                    from.pod_index == to.pod_index
                        && from.lateral_index == to.lateral_index
                        && from.end == NodeEnd::Entry
                        && to.end == NodeEnd::Exit
                }
                ArcKind::LaneChange => {
                    from.pod_index == to.pod_index
                        && from.end == NodeEnd::Entry
                        && to.end == NodeEnd::Entry
                        && from.lateral_index.abs_diff(to.lateral_index) == 1
                }
                ArcKind::FeasibleTurn | ArcKind::UnwantedTurn | ArcKind::InfeasibleTurn => {
                    to.pod_index == from.pod_index + 1
                        && from.end == NodeEnd::Exit
                        && to.end == NodeEnd::Entry
                }
            };
            if !ok {
                return Err(format!(
                    "arc {idx} ({:?}) violates staging: {from:?} -> {to:?}",
                    arc.kind
                ));
            }
        }

        for i in 0..n {
            let k = self.pods[i].lane_count;
            for l in 0..k {
                let body = self.arc(self.lane_body_arc(i, l));
                if body.kind != ArcKind::LaneBody || body.from != self.entry_node(i, l) {
                    return Err(format!("pod {i} lane {l} body arc out of place"));
                }
            }
            for l in 0..k.saturating_sub(1) {
                for (a, b) in [(l, l + 1), (l + 1, l)] {
                    let arc = self.arc(self.lane_change_arc(i, a, b));
                    if arc.kind != ArcKind::LaneChange
                        || arc.from != self.entry_node(i, a)
                        || arc.to != self.entry_node(i, b)
                    {
                        return Err(format!("pod {i} lane change {a} -> {b} missing"));
                    }
                }
            }
        }

        for boundary in 0..n - 1 {
            let k_out = self.pods[boundary].lane_count;
            let k_in = self.pods[boundary + 1].lane_count;
            let range = self.turn_arc_range(boundary);
            if range.len() as u64 != k_out as u64 * k_in as u64 {
                return Err(format!(
                    "boundary {boundary}: {} turn arcs, expected {}",
                    range.len(),
                    k_out as u64 * k_in as u64
                ));
            }
            for (offset, idx) in range.enumerate() {
                let arc = &self.arcs[idx];
                if !arc.kind.is_turn() {
                    return Err(format!("boundary {boundary}: non-turn arc in turn range"));
                }
                let u = offset as u32 / k_in;
                let l = offset as u32 % k_in;
                if arc.from != self.exit_node(boundary, u)
                    || arc.to != self.entry_node(boundary + 1, l)
                {
                    return Err(format!(
                        "boundary {boundary}: turn arcs not in (from, to) order"
                    ));
                }
            }
            if self.boundary_arc_count(boundary) > pod_arc_bound(k_out, k_in) {
                return Err(format!("boundary {boundary} exceeds its arc bound"));
            }
        }

        Ok(())
    }

    /// Inverse of `build`: collapsing each pod to a single vertex and
    /// deduplicating the arcs between consecutive pods leaves one edge per
    /// path position, i.e. the original segment sequence. A malformed graph
    /// is a hard failure.
    pub fn collapse(&self) -> Path {
        if let Err(violation) = self.verify_invariants() {
            panic!("collapse on malformed lane-level graph: {violation}");
        }
        Path::new(self.pods.iter().map(|p| p.segment_id.clone()).collect())
    }
}
