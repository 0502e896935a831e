//! Vehicle kinematics on a straight road, range-based adjacency and
//! link-life prediction.
//!
//! Nodes move along the x axis at constant speed. Each heading has its own
//! lane with a fixed y. Positions wrap around the road length, but radio
//! distance is measured on the open road, so a node leaving one end
//! re-enters at the other without links across the seam.

use alloc::collections::BTreeSet;

use crate::math;
use crate::{NodeId, Tick};

/// Default cap on predicted link life, in seconds.
pub const DEFAULT_MAX_LINK_LIFE: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Heading {
    #[default]
    Forward,
    Backward,
}

impl Heading {
    pub fn sign(self) -> f64 {
        match self {
            Heading::Forward => 1.0,
            Heading::Backward => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Heading::Forward => 1,
            Heading::Backward => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeKinematics {
    pub node: NodeId,
    pub x: f64,
    pub y: f64,
    /// Metres per second, zero for static nodes.
    pub speed: f64,
    pub heading: Heading,
    pub mobile: bool,
}

impl NodeKinematics {
    pub fn stationary(node: NodeId, x: f64, y: f64) -> Self {
        Self {
            node,
            x,
            y,
            speed: 0.0,
            heading: Heading::Forward,
            mobile: false,
        }
    }

    /// Signed velocity along the road axis.
    pub fn velocity(&self) -> f64 {
        if self.mobile {
            self.heading.sign() * self.speed
        } else {
            0.0
        }
    }

    /// Constant-velocity step. With `road_length` set, x wraps into
    /// `[0, road_length)`.
    pub fn step(&self, dt: f64, road_length: Option<f64>) -> Self {
        if !self.mobile {
            return *self;
        }
        let mut x = self.x + self.velocity() * dt;
        if let Some(len) = road_length {
            x = libm::fmod(x, len);
            if x < 0.0 {
                x += len;
            }
        }
        Self { x, ..*self }
    }

    pub fn distance_to(&self, other: &NodeKinematics) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        math::sqrt(dx * dx + dy * dy)
    }
}

/// Every other node within Euclidean distance `range` of `node`.
pub fn neighbours_in_range(node: NodeId, all: &[NodeKinematics], range: f64) -> BTreeSet<NodeId> {
    let Some(me) = all.iter().find(|k| k.node == node) else {
        return BTreeSet::new();
    };
    all.iter()
        .filter(|k| k.node != node && me.distance_to(k) <= range)
        .map(|k| k.node)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum MobilityError {
    #[error("nodes {a} and {b} are {separation} m apart, beyond range {range} m")]
    NotInRange {
        a: NodeId,
        b: NodeId,
        separation: f64,
        range: f64,
    },
}

/// Remaining seconds before the axial separation of `a` and `b` exceeds
/// `range`, capped at `max_life`.
///
/// A pair drifting apart breaks after `(range - d) / |dv|`. A pair closing
/// in first passes each other, so the gap has to close and then reopen:
/// `(d + range) / |dv|`. With no relative motion the link never breaks.
pub fn link_life(
    a: &NodeKinematics,
    b: &NodeKinematics,
    range: f64,
    max_life: f64,
) -> Result<f64, MobilityError> {
    let sep = a.x - b.x;
    let d = math::abs(sep);
    if d > range {
        return Err(MobilityError::NotInRange {
            a: a.node,
            b: b.node,
            separation: d,
            range,
        });
    }
    let rel = a.velocity() - b.velocity();
    if rel == 0.0 {
        return Ok(max_life);
    }
    let closing = (sep > 0.0 && rel < 0.0) || (sep < 0.0 && rel > 0.0);
    let gap = if closing { d + range } else { range - d };
    Ok((gap / math::abs(rel)).clamp(0.0, max_life))
}

/// A link-life prediction between two nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkEstimate {
    pub a: NodeId,
    pub b: NodeId,
    pub link_life: f64,
    pub computed_at: Tick,
}

impl LinkEstimate {
    pub fn between(
        a: &NodeKinematics,
        b: &NodeKinematics,
        range: f64,
        max_life: f64,
        now: Tick,
    ) -> Result<Self, MobilityError> {
        Ok(Self {
            a: a.node,
            b: b.node,
            link_life: link_life(a, b, range, max_life)?,
            computed_at: now,
        })
    }
}
