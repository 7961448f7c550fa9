//! Synthetic instance generation: seeded random chains and the
//! dependency-chain family.
//!
//! Reproducibility contract: instances are drawn from ChaCha8 (a portable,
//! publicly specified stream cipher RNG with stable cross-platform output
//! for a given seed; rand_chacha's implementation is the reference one) in a
//! fixed draw order, so a `GenSpec` identifies one instance forever:
//!
//! 1. lane counts, one uniform draw in 1..=max_lanes per segment in order;
//! 2. per boundary in order, per (from_lane, to_lane) pair in lexicographic
//!    order: one Bernoulli(connection_density) draw for whether the pair is
//!    declared, then, only if declared, one Bernoulli(inconvenient_fraction)
//!    draw for its convenience.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Convenience, IntersectionId, Path, RoadNetwork, Segment, TurnConnection,
};

/// Parameters of one random instance. Identical specs (including the seed)
/// generate identical instances.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct GenSpec {
    pub segments: u32,
    pub max_lanes: u32,
    pub connection_density: f64,
    pub inconvenient_fraction: f64,
    pub seed: u64,
}

fn assert_valid(spec: &GenSpec) {
    assert!(spec.segments >= 1, "need at least one segment");
    assert!(spec.max_lanes >= 1, "need at least one lane");
    assert!(
        (0.0..=1.0).contains(&spec.connection_density),
        "connection_density must be a fraction"
    );
    assert!(
        (0.0..=1.0).contains(&spec.inconvenient_fraction),
        "inconvenient_fraction must be a fraction"
    );
}

/// Generates a random linear chain: intersections v0..v{n}, segments
/// s0..s{n-1}, lane counts uniform in 1..=max_lanes, every boundary lane
/// pair declared with probability `connection_density` and declared pairs
/// marked Inconvenient with probability `inconvenient_fraction`. The output
/// always passes network and path validation. Chains (each segment used
/// once) are the shape the traversal problem is defined over; widening the
/// network beyond the path would add nothing the solver can see.
pub fn gen_random(spec: &GenSpec) -> (RoadNetwork, Path) {
    assert_valid(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.segments as usize;

    let lane_counts: Vec<u32> =
        (0..n).map(|_| rng.random_range(1..=spec.max_lanes)).collect();

    let mut connections = Vec::new();
    for boundary in 0..n.saturating_sub(1) {
        for from_lane in 0..lane_counts[boundary] {
            for to_lane in 0..lane_counts[boundary + 1] {
                if !rng.random_bool(spec.connection_density) {
                    continue;
                }
                let convenience = if rng.random_bool(spec.inconvenient_fraction) {
                    Convenience::Inconvenient
                } else {
                    Convenience::Convenient
                };
                connections.push(TurnConnection {
                    from_segment: format!("s{boundary}").into(),
                    from_lane,
                    to_segment: format!("s{}", boundary + 1).into(),
                    to_lane,
                    convenience,
                });
            }
        }
    }

    chain_from_parts(&lane_counts, connections)
}

/// The dependency-chain family: `length` 2-lane segments where every
/// interior boundary connects lanes identity-wise (0->0 and 1->1, both
/// convenient) and the final boundary declares only 1->1. The optimum is
/// always (0,0,0) by entering lane 1 and never changing, but nothing before
/// the final boundary distinguishes the lanes, so any strategy whose
/// lookahead ends before it has no reason to leave lane 0: the correct first
/// decision depends on the very end of the path.
pub fn gen_dependency_chain(length: u32) -> (RoadNetwork, Path) {
    assert!(length >= 2, "dependency chain needs at least two segments");
    let n = length as usize;
    let mut connections = Vec::new();
    for boundary in 0..n - 2 {
        for lane in 0..2u32 {
            connections.push(TurnConnection {
                from_segment: format!("s{boundary}").into(),
                from_lane: lane,
                to_segment: format!("s{}", boundary + 1).into(),
                to_lane: lane,
                convenience: Convenience::Convenient,
            });
        }
    }
    connections.push(TurnConnection {
        from_segment: format!("s{}", n - 2).into(),
        from_lane: 1,
        to_segment: format!("s{}", n - 1).into(),
        to_lane: 1,
        convenience: Convenience::Convenient,
    });
    chain_from_parts(&vec![2; n], connections)
}

fn chain_from_parts(
    lane_counts: &[u32],
    connections: Vec<TurnConnection>,
) -> (RoadNetwork, Path) {
    let n = lane_counts.len();
    let intersections = (0..=n).map(|i| IntersectionId::from(format!("v{i}")));
    let segments: Vec<Segment> = lane_counts
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            Segment::new(format!("s{i}"), format!("v{i}"), format!("v{}", i + 1), k)
        })
        .collect();
    let path = Path::new(segments.iter().map(|s| s.id.clone()).collect());
    (RoadNetwork::new(intersections, segments, connections), path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostTuple;
    use crate::graph::LaneLevelGraph;
    use crate::model::{validate_network, validate_path};
    use crate::solver::{solve_dijkstra, solve_sweep};

    #[test]
    fn minimal_spec_is_one_valid_segment() {
        let spec = GenSpec {
            segments: 1,
            max_lanes: 1,
            connection_density: 1.0,
            inconvenient_fraction: 0.0,
            seed: 42,
        };
        let (net, path) = gen_random(&spec);
        assert_eq!(net.segments().len(), 1);
        assert!(validate_network(&net).is_clean());
        assert!(validate_path(&net, &path).is_ok());
    }

    #[test]
    fn zero_density_forces_one_infeasible_per_boundary() {
        let spec = GenSpec {
            segments: 5,
            max_lanes: 3,
            connection_density: 0.0,
            inconvenient_fraction: 0.0,
            seed: 7,
        };
        let (net, path) = gen_random(&spec);
        assert!(net.connections().is_empty());
        let valid = validate_path(&net, &path).unwrap();
        let g = LaneLevelGraph::build(&valid);
        assert_eq!(solve_sweep(&g).total_cost, CostTuple::new(4, 0, 0));
    }

    #[test]
    fn same_spec_reproduces_the_instance() {
        let spec = GenSpec {
            segments: 8,
            max_lanes: 4,
            connection_density: 0.7,
            inconvenient_fraction: 0.5,
            seed: 12345,
        };
        let (net_a, path_a) = gen_random(&spec);
        let (net_b, path_b) = gen_random(&spec);
        assert_eq!(net_a, net_b);
        assert_eq!(path_a, path_b);
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..20 {
            let spec = GenSpec {
                segments: 6,
                max_lanes: 4,
                connection_density: 0.5,
                inconvenient_fraction: 0.3,
                seed,
            };
            let (net, path) = gen_random(&spec);
            let report = validate_network(&net);
            assert!(report.is_clean(), "seed {seed}: {report}");
            assert!(validate_path(&net, &path).is_ok());
        }
    }

    #[test]
    fn dependency_chain_shape_and_optimum() {
        let (net, path) = gen_dependency_chain(2);
        assert_eq!(net.connections().len(), 1);
        let valid = validate_path(&net, &path).unwrap();
        let g = LaneLevelGraph::build(&valid);
        let best = solve_dijkstra(&g);
        assert_eq!(best.total_cost, CostTuple::ZERO);
        assert_eq!(best.lane_sequence, vec![1, 1]);

        let (net, path) = gen_dependency_chain(64);
        assert_eq!(net.connections().len(), 2 * 62 + 1);
        let valid = validate_path(&net, &path).unwrap();
        let g = LaneLevelGraph::build(&valid);
        let best = solve_sweep(&g);
        assert_eq!(best.total_cost, CostTuple::ZERO);
        assert_eq!(best.lane_sequence, vec![1; 64]);
        assert_eq!(g.collapse(), path);
    }
}
