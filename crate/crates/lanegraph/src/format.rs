//! JSON interchange formats: network, path, and result documents.
//!
//! All documents are UTF-8 JSON with a top-level `format_version: 1`.
//! Serialization is canonical (pretty-printed, stable field order, sorted
//! intersection list, metadata in sorted maps), so saving the same value
//! twice yields identical bytes and load(save(x)) == x.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::guidance::Instruction;
use crate::model::{
    Convenience, IntersectionId, Path, RoadNetwork, Segment, TurnConnection,
    ValidationReport, validate_network,
};
use crate::solver::Traversal;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported format_version {found} (this build reads version {FORMAT_VERSION})")]
    UnsupportedVersion { found: u64 },
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("validation failed: {0}")]
    ValidationFailed(ValidationReport),
}

impl From<serde_json::Error> for LoadError {
    fn from(err: serde_json::Error) -> Self {
        LoadError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    format_version: u32,
    network: NetworkDoc,
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    intersections: Vec<String>,
    segments: Vec<SegmentDoc>,
    connections: Vec<ConnectionDoc>,
}

/// Lanes are stored as a count (lateral indices are implicitly 0..k-1); lane
/// metadata, when any lane has some, is a parallel array of maps.
#[derive(Serialize, Deserialize)]
struct SegmentDoc {
    id: String,
    source: String,
    target: String,
    lanes: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lane_metadata: Option<Vec<BTreeMap<String, String>>>,
}

#[derive(Serialize, Deserialize)]
struct ConnectionDoc {
    from_segment: String,
    from_lane: u32,
    to_segment: String,
    to_lane: u32,
    convenience: Convenience,
}

#[derive(Serialize, Deserialize)]
struct PathFile {
    format_version: u32,
    path: PathDoc,
}

#[derive(Serialize, Deserialize)]
struct PathDoc {
    segments: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ResultFile {
    format_version: u32,
    result: ResultDocument,
}

/// Everything a solve run produces. `timing_ms` is informational only and
/// excluded from determinism comparisons.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ResultDocument {
    pub algorithm: String,
    pub traversal: Traversal,
    pub instructions: Vec<Instruction>,
    pub timing_ms: f64,
    pub input_digests: InputDigests,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct InputDigests {
    pub network: String,
    pub path: String,
}

/// Content digest of an input file, as recorded in result documents.
pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable document");
    text.push('\n');
    text
}

/// Parses the envelope and checks `format_version` before touching the
/// payload, so version mismatches are reported as such rather than as field
/// errors.
fn parse_versioned(text: &str) -> Result<serde_json::Value, LoadError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("format_version").and_then(|v| v.as_u64()) {
        Some(found) if found == FORMAT_VERSION as u64 => Ok(value),
        Some(found) => Err(LoadError::UnsupportedVersion { found }),
        None => Err(LoadError::Malformed("missing format_version".into())),
    }
}

fn network_to_doc(network: &RoadNetwork) -> NetworkDoc {
    NetworkDoc {
        intersections: network.intersections().iter().map(|i| i.0.clone()).collect(),
        segments: network
            .segments()
            .iter()
            .map(|seg| {
                let lane_metadata = if seg.lanes.iter().any(|l| !l.metadata.is_empty()) {
                    Some(seg.lanes.iter().map(|l| l.metadata.clone()).collect())
                } else {
                    None
                };
                SegmentDoc {
                    id: seg.id.0.clone(),
                    source: seg.source.0.clone(),
                    target: seg.target.0.clone(),
                    lanes: seg.lane_count(),
                    metadata: seg.metadata.clone(),
                    lane_metadata,
                }
            })
            .collect(),
        connections: network
            .connections()
            .iter()
            .map(|c| ConnectionDoc {
                from_segment: c.from_segment.0.clone(),
                from_lane: c.from_lane,
                to_segment: c.to_segment.0.clone(),
                to_lane: c.to_lane,
                convenience: c.convenience,
            })
            .collect(),
    }
}

fn network_from_doc(doc: NetworkDoc) -> Result<RoadNetwork, LoadError> {
    let mut segments = Vec::with_capacity(doc.segments.len());
    for seg in doc.segments {
        let mut built = Segment::new(seg.id, seg.source, seg.target, seg.lanes);
        built.metadata = seg.metadata;
        if let Some(lane_metadata) = seg.lane_metadata {
            if lane_metadata.len() != built.lanes.len() {
                return Err(LoadError::Malformed(format!(
                    "segment {:?}: lane_metadata has {} entries for {} lanes",
                    built.id,
                    lane_metadata.len(),
                    built.lanes.len()
                )));
            }
            for (lane, metadata) in built.lanes.iter_mut().zip(lane_metadata) {
                lane.metadata = metadata;
            }
        }
        segments.push(built);
    }
    let connections = doc
        .connections
        .into_iter()
        .map(|c| TurnConnection {
            from_segment: c.from_segment.into(),
            from_lane: c.from_lane,
            to_segment: c.to_segment.into(),
            to_lane: c.to_lane,
            convenience: c.convenience,
        })
        .collect();
    let network = RoadNetwork::new(
        doc.intersections.into_iter().map(IntersectionId::from),
        segments,
        connections,
    );
    let report = validate_network(&network);
    if report.has_errors() {
        return Err(LoadError::ValidationFailed(report));
    }
    Ok(network)
}

pub fn network_to_json(network: &RoadNetwork) -> String {
    to_canonical_json(&NetworkFile {
        format_version: FORMAT_VERSION,
        network: network_to_doc(network),
    })
}

/// Parses and fully validates a network document; validation errors are
/// collected into one report rather than failing on the first.
pub fn network_from_json(text: &str) -> Result<RoadNetwork, LoadError> {
    let value = parse_versioned(text)?;
    let file: NetworkFile = serde_json::from_value(value)?;
    network_from_doc(file.network)
}

pub fn load_network(path: &FsPath) -> Result<RoadNetwork, LoadError> {
    network_from_json(&fs::read_to_string(path)?)
}

pub fn save_network(path: &FsPath, network: &RoadNetwork) -> Result<(), LoadError> {
    Ok(fs::write(path, network_to_json(network))?)
}

pub fn path_to_json(path: &Path) -> String {
    to_canonical_json(&PathFile {
        format_version: FORMAT_VERSION,
        path: PathDoc {
            segments: path.segment_ids.iter().map(|s| s.0.clone()).collect(),
        },
    })
}

/// Parses a path document. Resolution against a network (unknown segments,
/// adjacency) is the caller's step via `validate_path`.
pub fn path_from_json(text: &str) -> Result<Path, LoadError> {
    let value = parse_versioned(text)?;
    let file: PathFile = serde_json::from_value(value)?;
    Ok(Path::new(file.path.segments.into_iter().map(Into::into).collect()))
}

pub fn load_path(path: &FsPath) -> Result<Path, LoadError> {
    path_from_json(&fs::read_to_string(path)?)
}

pub fn save_path(path: &FsPath, value: &Path) -> Result<(), LoadError> {
    Ok(fs::write(path, path_to_json(value))?)
}

pub fn result_to_json(result: &ResultDocument) -> String {
    to_canonical_json(&ResultFile { format_version: FORMAT_VERSION, result: result.clone() })
}

pub fn result_from_json(text: &str) -> Result<ResultDocument, LoadError> {
    let value = parse_versioned(text)?;
    let file: ResultFile = serde_json::from_value(value)?;
    Ok(file.result)
}

pub fn load_result(path: &FsPath) -> Result<ResultDocument, LoadError> {
    result_from_json(&fs::read_to_string(path)?)
}

pub fn save_result(path: &FsPath, result: &ResultDocument) -> Result<(), LoadError> {
    Ok(fs::write(path, result_to_json(result))?)
}

impl fmt::Display for ResultDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} cost={} lanes={:?}",
            self.algorithm, self.traversal.total_cost, self.traversal.lane_sequence
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::ArcKind;
    use crate::model::Severity;
    use crate::solver::TraversalEvent;

    #[test]
    fn minimal_document_loads_and_validates() {
        let text = r#"{
            "format_version": 1,
            "network": {
                "intersections": ["a", "b"],
                "segments": [{"id": "s1", "source": "a", "target": "b", "lanes": 1}],
                "connections": []
            }
        }"#;
        let net = network_from_json(text).unwrap();
        assert_eq!(net.segments().len(), 1);
        assert_eq!(net.segments()[0].lane_count(), 1);
    }

    #[test]
    fn network_round_trips_exactly() {
        let (mut net, _) = fixtures::merge_funnel_instance();
        // Exercise the optional fields too.
        net = {
            let mut segments = net.segments().to_vec();
            segments[0].metadata.insert("name".into(), "Main St".into());
            segments[0].metadata.insert("length_m".into(), "120".into());
            segments[1].lanes[1].metadata.insert("shape".into(), "curved".into());
            RoadNetwork::new(
                net.intersections().iter().cloned(),
                segments,
                net.connections().to_vec(),
            )
        };
        let text = network_to_json(&net);
        let reloaded = network_from_json(&text).unwrap();
        assert_eq!(reloaded, net);
        assert_eq!(network_to_json(&reloaded), text);
    }

    #[test]
    fn reloaded_network_revalidates_identically() {
        let (net, _) = fixtures::two_by_two_full();
        let reloaded = network_from_json(&network_to_json(&net)).unwrap();
        assert_eq!(validate_network(&net), validate_network(&reloaded));
    }

    #[test]
    fn path_round_trips() {
        let (_, path) = fixtures::merge_funnel_instance();
        let reloaded = path_from_json(&path_to_json(&path)).unwrap();
        assert_eq!(reloaded, path);
    }

    #[test]
    fn result_round_trips() {
        let result = ResultDocument {
            algorithm: "sweep".into(),
            traversal: Traversal {
                lane_sequence: vec![1, 1, 0],
                total_cost: crate::cost::CostTuple::new(0, 1, 2),
                events: vec![TraversalEvent {
                    pod_index: 0,
                    kind: ArcKind::UnwantedTurn,
                    from_lane: 1,
                    to_lane: 1,
                }],
            },
            instructions: vec![
                Instruction::UseLane { pod_index: 0, lane: 1 },
                Instruction::ChangeLane { pod_index: 1, from: 0, to: 1 },
                Instruction::InfeasibleWarning { pod_index: 2 },
            ],
            timing_ms: 1.25,
            input_digests: InputDigests {
                network: sha256_hex(b"net"),
                path: sha256_hex(b"path"),
            },
        };
        let text = result_to_json(&result);
        let reloaded = result_from_json(&text).unwrap();
        assert_eq!(reloaded, result);
        assert_eq!(result_to_json(&reloaded), text);
    }

    #[test]
    fn duplicate_segment_id_fails_validation() {
        let text = r#"{
            "format_version": 1,
            "network": {
                "intersections": ["a", "b"],
                "segments": [
                    {"id": "s1", "source": "a", "target": "b", "lanes": 1},
                    {"id": "s1", "source": "a", "target": "b", "lanes": 2}
                ],
                "connections": []
            }
        }"#;
        match network_from_json(text) {
            Err(LoadError::ValidationFailed(report)) => {
                assert!(report
                    .errors()
                    .any(|i| i.message.contains("duplicate segment id")));
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn non_adjacent_connection_fails_validation() {
        let text = r#"{
            "format_version": 1,
            "network": {
                "intersections": ["a", "b", "c", "d"],
                "segments": [
                    {"id": "s1", "source": "a", "target": "b", "lanes": 1},
                    {"id": "s2", "source": "c", "target": "d", "lanes": 1}
                ],
                "connections": [{
                    "from_segment": "s1", "from_lane": 0,
                    "to_segment": "s2", "to_lane": 0,
                    "convenience": "convenient"
                }]
            }
        }"#;
        match network_from_json(text) {
            Err(LoadError::ValidationFailed(report)) => {
                assert!(report
                    .errors()
                    .any(|i| i.message.contains("segments share no intersection")));
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn warnings_do_not_block_loading() {
        let text = r#"{
            "format_version": 1,
            "network": {
                "intersections": ["a", "b"],
                "segments": [{"id": "wide", "source": "a", "target": "b", "lanes": 30}],
                "connections": []
            }
        }"#;
        let net = network_from_json(text).unwrap();
        let report = validate_network(&net);
        assert!(report.issues.iter().all(|i| i.severity == Severity::Warning));
    }

    #[test]
    fn future_version_is_rejected() {
        let text = r#"{"format_version": 2, "network": {"intersections": [], "segments": [], "connections": []}}"#;
        match network_from_json(text) {
            Err(LoadError::UnsupportedVersion { found: 2 }) => {}
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        match network_from_json("{ not json") {
            Err(LoadError::Parse { line, column, .. }) => {
                assert!(line >= 1 && column >= 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_lane_metadata_is_malformed() {
        let text = r#"{
            "format_version": 1,
            "network": {
                "intersections": ["a", "b"],
                "segments": [{
                    "id": "s1", "source": "a", "target": "b", "lanes": 2,
                    "lane_metadata": [{}]
                }],
                "connections": []
            }
        }"#;
        assert!(matches!(network_from_json(text), Err(LoadError::Malformed(_))));
    }

    #[test]
    fn digest_is_stable_and_tagged() {
        assert_eq!(
            sha256_hex(b"abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
