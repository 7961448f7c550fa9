//! Randomized differential properties over generated instances: every layer
//! of the pipeline is checked against an independent witness (the raw
//! network for structure, the exhaustive oracle for costs, replay for
//! guidance) rather than against itself.

use std::collections::VecDeque;
use std::ops::RangeInclusive;

use lanegraph::{
    emit_instructions, gen_random, oracle_best, replay_instructions, solve_dijkstra, solve_greedy,
    solve_sweep,
    model::{validate_network, validate_path, PathError, RoadNetwork, Segment},
    ArcKind, GenSpec, LaneLevelGraph,
};
use lanegraph::format::{network_from_json, network_to_json, path_from_json, path_to_json};
use proptest::prelude::*;

/// Densities and fractions are quantized to tenths so shrinking walks a
/// small, reproducible lattice instead of arbitrary floats.
fn spec_strategy(
    segments: RangeInclusive<u32>,
    max_lanes: RangeInclusive<u32>,
) -> impl Strategy<Value = GenSpec> {
    (segments, max_lanes, 0u32..=10, 0u32..=10, any::<u64>()).prop_map(
        |(segments, max_lanes, density, inconvenient, seed)| GenSpec {
            segments,
            max_lanes,
            connection_density: f64::from(density) / 10.0,
            inconvenient_fraction: f64::from(inconvenient) / 10.0,
            seed,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Generated instances always pass both validators, and generation is a
    /// pure function of the spec.
    #[test]
    fn generated_instances_are_valid(spec in spec_strategy(1..=40, 1..=6)) {
        let (network, path) = gen_random(&spec);
        let report = validate_network(&network);
        prop_assert!(report.is_clean(), "unexpected issues: {report}");
        let vp = validate_path(&network, &path).expect("generated path resolves");
        prop_assert_eq!(vp.len(), spec.segments as usize);

        let (again_net, again_path) = gen_random(&spec);
        prop_assert_eq!(again_net, network);
        prop_assert_eq!(again_path, path);
    }

    /// Collapsing the graph recovers exactly the path it was built from, and
    /// the structural invariants (staging, completeness, arc-count bound)
    /// hold on every generated instance.
    #[test]
    fn graph_is_faithful_to_path(spec in spec_strategy(1..=40, 1..=6)) {
        let (network, path) = gen_random(&spec);
        let vp = validate_path(&network, &path).unwrap();
        let g = LaneLevelGraph::build(&vp);
        g.verify_invariants().map_err(TestCaseError::fail)?;
        prop_assert_eq!(g.collapse(), path);

        // Independent recount of the per-boundary bound, not via the graph's
        // own bookkeeping: count arcs that touch the boundary by kind.
        for b in 0..vp.len().saturating_sub(1) {
            let k_out = vp.lane_count(b);
            let k_in = vp.lane_count(b + 1);
            let turns = g
                .arcs()
                .iter()
                .filter(|a| {
                    a.kind.is_turn()
                        && g.node(a.from).pod_index == b
                        && g.node(a.to).pod_index == b + 1
                })
                .count() as u64;
            let downstream_changes = g
                .arcs()
                .iter()
                .filter(|a| a.kind == ArcKind::LaneChange && g.node(a.from).pod_index == b + 1)
                .count() as u64;
            prop_assert_eq!(turns, u64::from(k_out) * u64::from(k_in));
            prop_assert_eq!(
                turns + downstream_changes,
                g.boundary_arc_count(b)
            );
            prop_assert!(
                g.boundary_arc_count(b) <= lanegraph::pod_arc_bound(k_out, k_in)
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Every entry lane of the first pod reaches every exit lane of the last
    /// pod: undeclared turns are materialized as infeasible arcs, so the
    /// graph is connected regardless of the declared connections.
    #[test]
    fn every_source_reaches_every_sink(spec in spec_strategy(1..=8, 1..=4)) {
        let (network, path) = gen_random(&spec);
        let vp = validate_path(&network, &path).unwrap();
        let g = LaneLevelGraph::build(&vp);

        let mut seen = vec![false; g.node_count() as usize];
        let mut queue: VecDeque<_> = g.sources().collect();
        for node in &queue {
            seen[*node as usize] = true;
        }
        while let Some(node) = queue.pop_front() {
            for arc in g.out_arcs(node) {
                let to = g.arc(arc).to;
                if !seen[to as usize] {
                    seen[to as usize] = true;
                    queue.push_back(to);
                }
            }
        }
        for sink in g.sinks() {
            prop_assert!(seen[sink as usize], "sink {sink} unreachable");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    /// The two exact solvers agree on the full traversal (cost, lane
    /// sequence and event list), and the reported cost is exactly the sum of
    /// the event costs.
    #[test]
    fn solvers_agree_exactly(spec in spec_strategy(1..=50, 1..=6)) {
        let (network, path) = gen_random(&spec);
        let vp = validate_path(&network, &path).unwrap();
        let g = LaneLevelGraph::build(&vp);
        let dij = solve_dijkstra(&g);
        let sweep = solve_sweep(&g);
        prop_assert_eq!(&sweep, &dij);
        prop_assert_eq!(lanegraph::event_cost_sum(&dij.events), dij.total_cost);
        prop_assert_eq!(dij.lane_sequence.len(), vp.len());
        for (i, &lane) in dij.lane_sequence.iter().enumerate() {
            prop_assert!(lane < vp.lane_count(i));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    /// On instances small enough to enumerate, exhaustive search confirms
    /// the solver traversal outright, not just its cost.
    #[test]
    fn oracle_confirms_solver(spec in spec_strategy(1..=6, 1..=3)) {
        let (network, path) = gen_random(&spec);
        let vp = validate_path(&network, &path).unwrap();
        let g = LaneLevelGraph::build(&vp);
        let dij = solve_dijkstra(&g);
        let oracle = oracle_best(&vp, 10_000_000).expect("small instance fits the cap");
        prop_assert_eq!(&oracle.best, &dij);
        prop_assert!(oracle.evaluated >= 1);
        let space: u64 = (0..vp.len())
            .map(|i| u64::from(vp.lane_count(i)).pow(2))
            .product();
        prop_assert_eq!(oracle.search_space, space);
        prop_assert!(oracle.evaluated <= oracle.search_space);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    /// The windowed baseline is admissible (never better than exact) and its
    /// reported cost is consistent with its own event list.
    #[test]
    fn greedy_never_beats_exact(spec in spec_strategy(1..=20, 1..=4)) {
        let (network, path) = gen_random(&spec);
        let vp = validate_path(&network, &path).unwrap();
        let g = LaneLevelGraph::build(&vp);
        let exact = solve_dijkstra(&g).total_cost;
        for window in 1..=4 {
            let greedy = solve_greedy(&vp, window);
            prop_assert!(
                greedy.total_cost >= exact,
                "window {} cost {} below exact {}",
                window,
                greedy.total_cost,
                exact
            );
            prop_assert_eq!(lanegraph::event_cost_sum(&greedy.events), greedy.total_cost);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Instructions conserve the traversal's maneuvers (one change
    /// instruction per lane-change event, one warning per infeasible event)
    /// and replaying them recovers the exact lane sequence.
    #[test]
    fn guidance_conserves_and_replays(spec in spec_strategy(1..=30, 1..=5)) {
        let (network, path) = gen_random(&spec);
        let vp = validate_path(&network, &path).unwrap();
        let g = LaneLevelGraph::build(&vp);
        let traversal = solve_sweep(&g);
        let instructions = emit_instructions(&traversal, &vp);

        let changes = instructions
            .iter()
            .filter(|i| matches!(i, lanegraph::Instruction::ChangeLane { .. }))
            .count();
        let warnings = instructions
            .iter()
            .filter(|i| matches!(i, lanegraph::Instruction::InfeasibleWarning { .. }))
            .count();
        let change_events = traversal
            .events
            .iter()
            .filter(|e| e.kind == ArcKind::LaneChange)
            .count();
        let infeasible_events = traversal
            .events
            .iter()
            .filter(|e| e.kind == ArcKind::InfeasibleTurn)
            .count();
        prop_assert_eq!(changes, change_events);
        prop_assert_eq!(warnings, infeasible_events);

        let mut pods: Vec<usize> = instructions.iter().map(|i| i.pod_index()).collect();
        let sorted = {
            let mut s = pods.clone();
            s.sort_unstable();
            s
        };
        prop_assert_eq!(&mut pods, &sorted, "instructions out of travel order");

        let replayed = replay_instructions(&instructions, &vp)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(replayed, traversal.lane_sequence);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    /// JSON round-trips reproduce the exact in-memory network and path.
    #[test]
    fn json_roundtrip_is_identity(spec in spec_strategy(1..=15, 1..=5)) {
        let (network, path) = gen_random(&spec);
        let net_text = network_to_json(&network);
        let back = network_from_json(&net_text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back, network);

        let path_text = path_to_json(&path);
        let back = path_from_json(&path_text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back, path);
    }
}

/// Networks with arbitrary topology (not chains) for exercising path
/// validation: `pool` intersections, segments with random endpoints.
fn arbitrary_network(endpoints: &[(u8, u8)]) -> RoadNetwork {
    let pool: Vec<_> = (0..=endpoints
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .max()
        .unwrap_or(0))
        .map(|i| format!("x{i}").into())
        .collect();
    let segments = endpoints
        .iter()
        .enumerate()
        .map(|(j, &(a, b))| {
            Segment::new(format!("e{j}"), format!("x{a}"), format!("x{b}"), 1)
        })
        .collect();
    RoadNetwork::new(pool, segments, vec![])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    /// Path validation accepts a sequence iff every id resolves and each
    /// consecutive pair chains target-to-source; checked against a direct
    /// reimplementation of that rule on arbitrary topologies.
    #[test]
    fn path_validation_matches_manual_rule(
        endpoints in proptest::collection::vec((0u8..5, 0u8..5), 1..6),
        // Indices may go one past the segment list to exercise unknown ids.
        candidate in proptest::collection::vec(0usize..6, 0..6),
    ) {
        let network = arbitrary_network(&endpoints);
        let ids: Vec<lanegraph::model::SegmentId> = candidate
            .iter()
            .map(|&i| format!("e{i}").into())
            .collect();
        let path = lanegraph::model::Path::new(ids.clone());
        let got = validate_path(&network, &path);

        if candidate.is_empty() {
            prop_assert_eq!(got.unwrap_err(), PathError::Empty);
            return Ok(());
        }
        if let Some(bad) = ids.iter().find(|id| network.segment_index(id).is_none()) {
            prop_assert_eq!(got.unwrap_err(), PathError::UnknownSegment(bad.clone()));
            return Ok(());
        }
        let broken = (0..candidate.len() - 1).find(|&i| {
            endpoints[candidate[i]].1 != endpoints[candidate[i + 1]].0
        });
        match broken {
            Some(i) => prop_assert_eq!(got.unwrap_err(), PathError::DisconnectedAt(i)),
            None => {
                let vp = got.map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert_eq!(vp.to_path(), path);
            }
        }
    }
}
