//! Road network model: intersections, segments with lanes, lane-to-lane turn
//! connections, paths, and validation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Widest known motorway cross-section; lane counts above this are almost
/// certainly data errors, so the validator flags them (as a warning, since
/// nothing downstream breaks).
pub const MAX_EXPECTED_LANES: u32 = 26;

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", self.0)
            }
        }
    };
}

string_id!(
    /// Opaque identifier of an intersection (a node of the segment-level graph).
    IntersectionId
);
string_id!(
    /// Opaque identifier of a road segment (a directed edge of the segment-level graph).
    SegmentId
);

/// Whether a declared lane-to-lane turn is the kind of maneuver a driver
/// would want to take. Inconvenient turns are legal but undesirable (e.g.
/// crossing a solid line); which turns count as such is an input attribute,
/// not something the engine infers.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convenience {
    Convenient,
    Inconvenient,
}

/// A single lane of a segment. `lateral_index` must equal the lane's position
/// in its segment's lane list.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Lane {
    pub lateral_index: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl Lane {
    pub fn new(lateral_index: u32) -> Self {
        Lane { lateral_index, metadata: BTreeMap::new() }
    }
}

/// A directed road segment between two intersections, carrying an ordered
/// lane list. Metadata (road class, length, names) is opaque to the solver;
/// traversal costs count maneuvers only.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Segment {
    pub id: SegmentId,
    pub source: IntersectionId,
    pub target: IntersectionId,
    pub lanes: Vec<Lane>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl Segment {
    pub fn new(
        id: impl Into<SegmentId>,
        source: impl Into<IntersectionId>,
        target: impl Into<IntersectionId>,
        lane_count: u32,
    ) -> Self {
        Segment {
            id: id.into(),
            source: source.into(),
            target: target.into(),
            lanes: (0..lane_count).map(Lane::new).collect(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn lane_count(&self) -> u32 {
        self.lanes.len() as u32
    }
}

/// A declared lane-to-lane turn across an intersection. Absence of a record
/// for a lane pair means that lane-level turn is forbidden.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TurnConnection {
    pub from_segment: SegmentId,
    pub from_lane: u32,
    pub to_segment: SegmentId,
    pub to_lane: u32,
    pub convenience: Convenience,
}

/// The segment-level road network: intersections, directed segments and the
/// declared lane-to-lane connectivity between adjacent segments.
///
/// Immutable after construction; safe to share across concurrent solver runs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RoadNetwork {
    intersections: BTreeSet<IntersectionId>,
    segments: Vec<Segment>,
    connections: Vec<TurnConnection>,
    /// First occurrence wins for duplicate ids; duplicates are surfaced by
    /// `validate_network`, not hidden here.
    segment_index: HashMap<SegmentId, usize>,
}

impl RoadNetwork {
    pub fn new(
        intersections: impl IntoIterator<Item = IntersectionId>,
        segments: Vec<Segment>,
        connections: Vec<TurnConnection>,
    ) -> Self {
        let mut segment_index = HashMap::with_capacity(segments.len());
        for (i, seg) in segments.iter().enumerate() {
            segment_index.entry(seg.id.clone()).or_insert(i);
        }
        RoadNetwork {
            intersections: intersections.into_iter().collect(),
            segments,
            connections,
            segment_index,
        }
    }

    pub fn intersections(&self) -> &BTreeSet<IntersectionId> {
        &self.intersections
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn connections(&self) -> &[TurnConnection] {
        &self.connections
    }

    pub fn segment_index(&self, id: &SegmentId) -> Option<usize> {
        self.segment_index.get(id).copied()
    }

    pub fn segment(&self, id: &SegmentId) -> Option<&Segment> {
        self.segment_index(id).map(|i| &self.segments[i])
    }
}

/// A requested route: an ordered list of segment ids. Consecutive segments
/// must be chained head to tail; `validate_path` checks this.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Path {
    pub segment_ids: Vec<SegmentId>,
}

impl Path {
    pub fn new(segment_ids: Vec<SegmentId>) -> Self {
        Path { segment_ids }
    }

    pub fn len(&self) -> usize {
        self.segment_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segment_ids.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub message: String,
}

/// All invariant violations found in a network, in deterministic order
/// (segment checks first, then connection checks, each in input order).
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.issues.iter().any(|i| i.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    fn error(&mut self, message: String) {
        self.issues.push(ValidationIssue { severity: Severity::Error, message });
    }

    fn warning(&mut self, message: String) {
        self.issues.push(ValidationIssue { severity: Severity::Warning, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return f.write_str("no issues");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let tag = match issue.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            write!(f, "{}: {}", tag, issue.message)?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of the network and reports all
/// violations. Bad data is a report entry, never a panic.
pub fn validate_network(network: &RoadNetwork) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen_ids = HashSet::new();
    for seg in network.segments() {
        if !seen_ids.insert(&seg.id) {
            report.error(format!("duplicate segment id {:?}", seg.id));
        }
        for end in [&seg.source, &seg.target] {
            if !network.intersections.contains(end) {
                report.error(format!(
                    "segment {:?} references unknown intersection {:?}",
                    seg.id, end
                ));
            }
        }
        if seg.lanes.is_empty() {
            report.error(format!("segment {:?} has no lanes", seg.id));
        }
        for (pos, lane) in seg.lanes.iter().enumerate() {
            if lane.lateral_index as usize != pos {
                report.error(format!(
                    "segment {:?} lane at position {} has lateral index {}",
                    seg.id, pos, lane.lateral_index
                ));
                break;
            }
        }
        if seg.lane_count() > MAX_EXPECTED_LANES {
            report.warning(format!(
                "segment {:?} lane count exceeds {} ({} lanes)",
                seg.id,
                MAX_EXPECTED_LANES,
                seg.lane_count()
            ));
        }
    }

    let mut seen_connections = HashSet::new();
    for conn in network.connections() {
        let from = match network.segment(&conn.from_segment) {
            Some(seg) => seg,
            None => {
                report.error(format!(
                    "connection references unknown segment {:?}",
                    conn.from_segment
                ));
                continue;
            }
        };
        let to = match network.segment(&conn.to_segment) {
            Some(seg) => seg,
            None => {
                report.error(format!(
                    "connection references unknown segment {:?}",
                    conn.to_segment
                ));
                continue;
            }
        };
        if conn.from_lane >= from.lane_count() {
            report.error(format!(
                "connection {:?}:{} -> {:?}:{}: lane index out of bounds on {:?}",
                conn.from_segment, conn.from_lane, conn.to_segment, conn.to_lane, from.id
            ));
        }
        if conn.to_lane >= to.lane_count() {
            report.error(format!(
                "connection {:?}:{} -> {:?}:{}: lane index out of bounds on {:?}",
                conn.from_segment, conn.from_lane, conn.to_segment, conn.to_lane, to.id
            ));
        }
        if from.target != to.source {
            report.error(format!(
                "connection {:?} -> {:?}: segments share no intersection",
                conn.from_segment, conn.to_segment
            ));
        }
        let key =
            (&conn.from_segment, conn.from_lane, &conn.to_segment, conn.to_lane);
        if !seen_connections.insert(key) {
            report.error(format!(
                "duplicate connection {:?}:{} -> {:?}:{}",
                conn.from_segment, conn.from_lane, conn.to_segment, conn.to_lane
            ));
        }
    }

    report
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum PathError {
    #[error("path is empty")]
    Empty,
    #[error("path references unknown segment {0:?}")]
    UnknownSegment(SegmentId),
    #[error("path disconnected at position {0}: segments share no intersection")]
    DisconnectedAt(usize),
}

/// A path whose segments have been resolved against a network: every id
/// exists and consecutive segments chain head to tail. Holding one is proof
/// the path is traversable at segment level.
#[derive(Clone, Debug)]
pub struct ValidatedPath<'n> {
    network: &'n RoadNetwork,
    segment_indices: Vec<usize>,
}

impl<'n> ValidatedPath<'n> {
    pub fn network(&self) -> &'n RoadNetwork {
        self.network
    }

    /// Number of path segments (n >= 1).
    pub fn len(&self) -> usize {
        self.segment_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn segment_index(&self, position: usize) -> usize {
        self.segment_indices[position]
    }

    pub fn segment(&self, position: usize) -> &'n Segment {
        &self.network.segments()[self.segment_indices[position]]
    }

    pub fn lane_count(&self, position: usize) -> u32 {
        self.segment(position).lane_count()
    }

    pub fn segments(&self) -> impl Iterator<Item = &'n Segment> + '_ {
        self.segment_indices.iter().map(|&i| &self.network.segments()[i])
    }

    pub fn to_path(&self) -> Path {
        Path::new(self.segments().map(|s| s.id.clone()).collect())
    }
}

/// Resolves a path against a network. The network is assumed to have passed
/// `validate_network` without errors.
pub fn validate_path<'n>(
    network: &'n RoadNetwork,
    path: &Path,
) -> Result<ValidatedPath<'n>, PathError> {
    if path.is_empty() {
        return Err(PathError::Empty);
    }
    let mut segment_indices = Vec::with_capacity(path.len());
    for id in &path.segment_ids {
        let idx = network
            .segment_index(id)
            .ok_or_else(|| PathError::UnknownSegment(id.clone()))?;
        segment_indices.push(idx);
    }
    for i in 0..segment_indices.len() - 1 {
        let cur = &network.segments()[segment_indices[i]];
        let next = &network.segments()[segment_indices[i + 1]];
        if cur.target != next.source {
            return Err(PathError::DisconnectedAt(i));
        }
    }
    Ok(ValidatedPath { network, segment_indices })
}

/// Declared lane-to-lane connectivity indexed by segment pair, for quick
/// lookups along a path boundary.
#[derive(Debug)]
pub(crate) struct TurnTable {
    by_pair: HashMap<(usize, usize), HashMap<(u32, u32), Convenience>>,
}

impl TurnTable {
    pub(crate) fn build(network: &RoadNetwork) -> Self {
        let mut by_pair: HashMap<(usize, usize), HashMap<(u32, u32), Convenience>> =
            HashMap::new();
        for conn in network.connections() {
            let (Some(f), Some(t)) = (
                network.segment_index(&conn.from_segment),
                network.segment_index(&conn.to_segment),
            ) else {
                continue;
            };
            by_pair
                .entry((f, t))
                .or_default()
                .insert((conn.from_lane, conn.to_lane), conn.convenience);
        }
        TurnTable { by_pair }
    }

    /// Convenience of the declared turn (from_idx, from_lane) -> (to_idx,
    /// to_lane), or `None` if the lane pair is undeclared (forbidden).
    pub(crate) fn lookup(
        &self,
        from_idx: usize,
        to_idx: usize,
        from_lane: u32,
        to_lane: u32,
    ) -> Option<Convenience> {
        self.by_pair
            .get(&(from_idx, to_idx))?
            .get(&(from_lane, to_lane))
            .copied()
    }

    /// Sorted target lanes declared for `from_lane` across the given segment
    /// pair.
    pub(crate) fn fan(
        &self,
        from_idx: usize,
        to_idx: usize,
        from_lane: u32,
    ) -> Vec<u32> {
        let mut out: Vec<u32> = match self.by_pair.get(&(from_idx, to_idx)) {
            Some(map) => map
                .keys()
                .filter(|(f, _)| *f == from_lane)
                .map(|&(_, t)| t)
                .collect(),
            None => Vec::new(),
        };
        out.sort_unstable();
        out
    }

    /// True if `from_lane` has at least one declared outgoing turn across the
    /// given segment pair.
    pub(crate) fn has_outgoing(
        &self,
        from_idx: usize,
        to_idx: usize,
        from_lane: u32,
    ) -> bool {
        match self.by_pair.get(&(from_idx, to_idx)) {
            Some(map) => map.keys().any(|(f, _)| *f == from_lane),
            None => false,
        }
    }
}
