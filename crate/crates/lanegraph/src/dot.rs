//! Graphviz DOT export of a lane-level graph, with the optimal traversal
//! optionally highlighted.
//!
//! Styling legend: feasible turns and lane bodies solid black, unwanted
//! turns blue, lane changes orange, infeasible turns dashed gray. Each pod
//! is a dashed cluster labeled with its segment id; traversal arcs get a
//! heavier pen width. Style is a function of the arc kind alone, so per-kind
//! arc counts can be audited from the text.

use std::fmt::Write;

use crate::graph::{ArcKind, LaneLevelGraph, NodeEnd, NodeId};
use crate::solver::Traversal;

fn node_name(g: &LaneLevelGraph, id: NodeId) -> String {
    let node = g.node(id);
    let end = match node.end {
        NodeEnd::Entry => "in",
        NodeEnd::Exit => "out",
    };
    format!("p{}_{}_{}", node.pod_index, end, node.lateral_index)
}

fn escape_label(raw: &str) -> String {
    raw.replace('\\', "\\\\").replace('"', "\\\"")
}

fn arc_attributes(kind: ArcKind) -> &'static str {
    match kind {
        ArcKind::LaneBody => "color=\"black\"",
        ArcKind::FeasibleTurn => "color=\"black\"",
        ArcKind::UnwantedTurn => "color=\"blue\"",
        ArcKind::LaneChange => "color=\"orange\"",
        ArcKind::InfeasibleTurn => "color=\"gray\", style=\"dashed\"",
    }
}

/// Arc indices used by a traversal, in travel order.
fn traversal_arcs(g: &LaneLevelGraph, traversal: &Traversal) -> Vec<bool> {
    let mut used = vec![false; g.arcs().len()];
    for (pod, &lane) in traversal.lane_sequence.iter().enumerate() {
        used[g.lane_body_arc(pod, lane) as usize] = true;
    }
    for event in &traversal.events {
        let idx = match event.kind {
            ArcKind::LaneChange => {
                g.lane_change_arc(event.pod_index, event.from_lane, event.to_lane)
            }
            _ => g.turn_arc(event.pod_index, event.from_lane, event.to_lane),
        };
        used[idx as usize] = true;
    }
    used
}

/// Renders the graph as a DOT digraph; pass the traversal to highlight its
/// arcs.
pub fn export_dot(g: &LaneLevelGraph, traversal: Option<&Traversal>) -> String {
    let used = traversal.map(|t| traversal_arcs(g, t));
    let mut out = String::new();
    out.push_str("digraph lanegraph {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle, fontsize=10];\n");

    for (i, pod) in g.pods().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_pod{i} {{");
        let _ = writeln!(out, "    label=\"{}\";", escape_label(pod.segment_id().as_str()));
        out.push_str("    style=dashed;\n");
        for lane in 0..pod.lane_count() {
            let _ = writeln!(
                out,
                "    {} [label=\"{lane}\"];",
                node_name(g, g.entry_node(i, lane))
            );
            let _ = writeln!(
                out,
                "    {} [label=\"{lane}'\"];",
                node_name(g, g.exit_node(i, lane))
            );
        }
        out.push_str("  }\n");
    }

    for (idx, arc) in g.arcs().iter().enumerate() {
        let highlight = match &used {
            Some(used) if used[idx] => ", penwidth=\"2.5\"",
            _ => "",
        };
        let _ = writeln!(
            out,
            "  {} -> {} [{}{}];",
            node_name(g, arc.from),
            node_name(g, arc.to),
            arc_attributes(arc.kind),
            highlight
        );
    }

    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::LaneLevelGraph;
    use crate::model::validate_path;
    use crate::solver::solve_sweep;

    fn count(haystack: &str, needle: &str) -> usize {
        haystack.matches(needle).count()
    }

    #[test]
    fn minimal_graph_renders_one_cluster_one_edge() {
        let (net, path) = fixtures::single_segment(1);
        let valid = validate_path(&net, &path).unwrap();
        let g = LaneLevelGraph::build(&valid);
        let dot = export_dot(&g, None);
        assert!(dot.starts_with("digraph lanegraph {"));
        assert!(dot.ends_with("}\n"));
        assert_eq!(count(&dot, "subgraph cluster_"), 1);
        assert_eq!(count(&dot, " -> "), 1);
    }

    #[test]
    fn style_census_matches_arc_kinds() {
        let (net, path) = fixtures::merge_funnel_instance();
        let valid = validate_path(&net, &path).unwrap();
        let g = LaneLevelGraph::build(&valid);
        let dot = export_dot(&g, None);
        let kind_count = |kind| g.arcs().iter().filter(|a| a.kind == kind).count();
        assert_eq!(count(&dot, "color=\"blue\""), kind_count(ArcKind::UnwantedTurn));
        assert_eq!(count(&dot, "color=\"orange\""), kind_count(ArcKind::LaneChange));
        assert_eq!(count(&dot, "style=\"dashed\""), kind_count(ArcKind::InfeasibleTurn));
        assert_eq!(
            count(&dot, "color=\"black\""),
            kind_count(ArcKind::LaneBody) + kind_count(ArcKind::FeasibleTurn)
        );
        assert_eq!(count(&dot, " -> "), g.arcs().len());
    }

    #[test]
    fn traversal_arcs_are_highlighted() {
        let (net, path) = fixtures::merge_funnel_instance();
        let valid = validate_path(&net, &path).unwrap();
        let g = LaneLevelGraph::build(&valid);
        let t = solve_sweep(&g);
        let dot = export_dot(&g, Some(&t));
        // One highlight per walk arc: a body per pod plus each event.
        assert_eq!(
            count(&dot, "penwidth"),
            t.lane_sequence.len() + t.events.len()
        );
    }

    #[test]
    fn labels_are_escaped() {
        let (net, _) = fixtures::single_segment(1);
        let mut segments = net.segments().to_vec();
        segments[0].id = "s\"quoted\"".into();
        let net = crate::model::RoadNetwork::new(
            net.intersections().iter().cloned(),
            segments,
            vec![],
        );
        let path = crate::model::Path::new(vec!["s\"quoted\"".into()]);
        let valid = validate_path(&net, &path).unwrap();
        let dot = export_dot(&LaneLevelGraph::build(&valid), None);
        assert!(dot.contains("label=\"s\\\"quoted\\\"\""));
    }

    #[test]
    fn braces_balance() {
        let (net, path) = fixtures::chain_no_connections(&[2, 3, 1]);
        let valid = validate_path(&net, &path).unwrap();
        let dot = export_dot(&LaneLevelGraph::build(&valid), None);
        assert_eq!(count(&dot, "{"), count(&dot, "}"));
    }
}
