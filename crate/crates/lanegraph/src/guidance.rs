//! Driver-facing guidance derived from an optimal traversal.
//!
//! Guidance is deliberately minimal: a UseLane announcement only where the
//! driver could not stay on autopilot, one ChangeLane per lane-change event,
//! and one InfeasibleWarning per forbidden turn the traversal was forced
//! through (bad map data is surfaced, never hidden). UseLane is emitted at
//! the path start, wherever the set of usable lanes narrows (the classic
//! "lanes must merge/turn" announcement), and wherever the landing lane is
//! not implied by the previous segment's declared connectivity; the last
//! rule is what makes replay exact.

use serde::{Deserialize, Serialize};

use crate::graph::ArcKind;
use crate::model::{TurnTable, ValidatedPath};
use crate::solver::Traversal;

/// One guidance instruction. `pod_index` orders instructions along the
/// path; for InfeasibleWarning it names the boundary whose turn is
/// forbidden (the turn out of pod `pod_index`).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instruction {
    UseLane { pod_index: usize, lane: u32 },
    ChangeLane { pod_index: usize, from: u32, to: u32 },
    InfeasibleWarning { pod_index: usize },
}

impl Instruction {
    pub fn pod_index(&self) -> usize {
        match *self {
            Instruction::UseLane { pod_index, .. }
            | Instruction::ChangeLane { pod_index, .. }
            | Instruction::InfeasibleWarning { pod_index } => pod_index,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("no UseLane instruction for the first segment")]
    MissingStart,
    #[error("pod {0}: ChangeLane instructions do not chain")]
    BrokenChain(usize),
    #[error("pod {0}: UseLane disagrees with the ChangeLane chain")]
    Inconsistent(usize),
    #[error("pod {0}: entry lane is not implied by the previous segment")]
    AmbiguousEntry(usize),
}

/// Per-pod view of a traversal: the entry lane (where the turn landed) and
/// the driven lane (after any lane changes).
struct PodMoves {
    entry: u32,
    driven: u32,
    changes: Vec<(u32, u32)>,
    infeasible_turn_out: bool,
}

fn pod_moves(traversal: &Traversal, n: usize) -> Vec<PodMoves> {
    let mut pods: Vec<PodMoves> = traversal
        .lane_sequence
        .iter()
        .map(|&driven| PodMoves {
            entry: driven,
            driven,
            changes: Vec::new(),
            infeasible_turn_out: false,
        })
        .collect();
    for event in &traversal.events {
        match event.kind {
            ArcKind::LaneChange => {
                pods[event.pod_index].changes.push((event.from_lane, event.to_lane));
            }
            ArcKind::InfeasibleTurn => {
                pods[event.pod_index].infeasible_turn_out = true;
                pods[event.pod_index + 1].entry = event.to_lane;
            }
            ArcKind::FeasibleTurn | ArcKind::UnwantedTurn => {
                pods[event.pod_index + 1].entry = event.to_lane;
            }
            ArcKind::LaneBody => unreachable!("body arcs are not events"),
        }
    }
    // The first pod's entry is where the change chain starts (the solvers
    // never change lanes in pod 0, but the accounting stays general).
    if let Some(&(from, _)) = pods[0].changes.first() {
        pods[0].entry = from;
    }
    debug_assert_eq!(pods.len(), n);
    pods
}

/// Number of lanes of segment `i` a driver could legally be in: lanes with
/// at least one declared turn onward (for the last segment, every lane).
fn usable_lane_count(path: &ValidatedPath<'_>, turns: &TurnTable, i: usize) -> usize {
    let k = path.lane_count(i);
    if i + 1 == path.len() {
        return k as usize;
    }
    let f = path.segment_index(i);
    let t = path.segment_index(i + 1);
    (0..k).filter(|&lane| turns.has_outgoing(f, t, lane)).count()
}

/// Converts a traversal into ordered guidance instructions. A traversal
/// whose lane sequence does not cover the path is a hard failure.
pub fn emit_instructions(
    traversal: &Traversal,
    path: &ValidatedPath<'_>,
) -> Vec<Instruction> {
    let n = path.len();
    assert_eq!(
        traversal.lane_sequence.len(),
        n,
        "traversal does not cover the path"
    );
    let turns = TurnTable::build(path.network());
    let pods = pod_moves(traversal, n);

    let mut instructions = Vec::new();
    let mut prev_usable = 0;
    for (i, pod) in pods.iter().enumerate() {
        let usable = usable_lane_count(path, &turns, i);
        let announce = if i == 0 {
            true
        } else {
            let narrows = usable < prev_usable;
            // The entry lane is inferable iff the previously driven lane's
            // declared connectivity admits exactly the lane actually taken.
            let fan = turns.fan(
                path.segment_index(i - 1),
                path.segment_index(i),
                pods[i - 1].driven,
            );
            let inferable = fan == [pod.entry];
            narrows || !inferable
        };
        if announce {
            instructions.push(Instruction::UseLane { pod_index: i, lane: pod.driven });
        }
        for &(from, to) in &pod.changes {
            instructions.push(Instruction::ChangeLane { pod_index: i, from, to });
        }
        if pod.infeasible_turn_out {
            instructions.push(Instruction::InfeasibleWarning { pod_index: i });
        }
        prev_usable = usable;
    }
    instructions
}

/// Follows instructions the way a driver would and returns the resulting
/// lane per segment: change lanes as told, otherwise stay in lane; where the
/// next segment's lane is not announced it must be implied by the declared
/// connectivity of the lane currently driven. Produces exactly the
/// traversal's lane sequence for instructions from [`emit_instructions`].
pub fn replay_instructions(
    instructions: &[Instruction],
    path: &ValidatedPath<'_>,
) -> Result<Vec<u32>, ReplayError> {
    let n = path.len();
    let turns = TurnTable::build(path.network());

    let mut use_lane: Vec<Option<u32>> = vec![None; n];
    let mut changes: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for inst in instructions {
        match *inst {
            Instruction::UseLane { pod_index, lane } => use_lane[pod_index] = Some(lane),
            Instruction::ChangeLane { pod_index, from, to } => {
                changes[pod_index].push((from, to))
            }
            Instruction::InfeasibleWarning { .. } => {}
        }
    }

    let mut lanes = Vec::with_capacity(n);
    for i in 0..n {
        let entry = if let Some(&(from, _)) = changes[i].first() {
            from
        } else if let Some(lane) = use_lane[i] {
            lane
        } else if i == 0 {
            return Err(ReplayError::MissingStart);
        } else {
            // Stay on autopilot: the previous lane's declared connections
            // must leave no choice.
            let fan = turns.fan(
                path.segment_index(i - 1),
                path.segment_index(i),
                lanes[i - 1],
            );
            match fan.as_slice() {
                &[only] => only,
                _ => return Err(ReplayError::AmbiguousEntry(i)),
            }
        };

        let mut lane = entry;
        for &(from, to) in &changes[i] {
            if from != lane {
                return Err(ReplayError::BrokenChain(i));
            }
            lane = to;
        }
        if let Some(announced) = use_lane[i] {
            if announced != lane {
                return Err(ReplayError::Inconsistent(i));
            }
        }
        lanes.push(lane);
    }
    Ok(lanes)
}
