//! Lexicographic cost tuples for lane-level traversals.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// Cost of a traversal, counting infeasible turns, unwanted (inconvenient)
/// turns and lateral lane changes.
///
/// Ordering is lexicographic with `infeasible` most significant: a single
/// infeasible turn outweighs any number of unwanted turns, which in turn
/// outweigh any number of lane changes. The derived `Ord` relies on the field
/// order below, so the fields must stay in priority order.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct CostTuple {
    pub infeasible: u64,
    pub unwanted: u64,
    pub lane_changes: u64,
}

impl CostTuple {
    pub const ZERO: CostTuple = CostTuple::new(0, 0, 0);

    pub const fn new(infeasible: u64, unwanted: u64, lane_changes: u64) -> Self {
        CostTuple { infeasible, unwanted, lane_changes }
    }

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    /// Component-wise sum, `None` on overflow in any component.
    pub fn checked_add(self, rhs: CostTuple) -> Option<CostTuple> {
        Some(CostTuple {
            infeasible: self.infeasible.checked_add(rhs.infeasible)?,
            unwanted: self.unwanted.checked_add(rhs.unwanted)?,
            lane_changes: self.lane_changes.checked_add(rhs.lane_changes)?,
        })
    }
}

impl Add for CostTuple {
    type Output = CostTuple;

    /// Component-wise sum. Costs count maneuvers along a finite path, so an
    /// overflowing component means corrupted state, not a large input; we
    /// treat it as a hard failure rather than saturating silently.
    fn add(self, rhs: CostTuple) -> CostTuple {
        self.checked_add(rhs).expect("cost tuple component overflow")
    }
}

impl fmt::Display for CostTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.infeasible, self.unwanted, self.lane_changes)
    }
}

impl fmt::Debug for CostTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
