//! Attacker behaviours: packet droppers (Blackhole, Grayhole) and
//! recommendation liars (Bad-mouthing, Ballot-stuffing).

use alloc::vec::Vec;

use rand::Rng;

use crate::trust::{Claim, MassAssignment};
use crate::{NodeId, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AttackKind {
    Blackhole,
    Grayhole,
    BadMouthing,
    BallotStuffing,
}

impl AttackKind {
    pub fn drops_packets(self) -> bool {
        matches!(self, AttackKind::Blackhole | AttackKind::Grayhole)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AttackKind::Blackhole => "blackhole",
            AttackKind::Grayhole => "grayhole",
            AttackKind::BadMouthing => "bad_mouthing",
            AttackKind::BallotStuffing => "ballot_stuffing",
        }
    }
}

/// What drives a Grayhole's on/off phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PhaseClock {
    /// Phase follows the simulation tick.
    #[default]
    Time,
    /// Phase follows the number of relay requests the attacker has seen.
    PacketCount,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AttackerProfile {
    pub node: NodeId,
    pub kind: AttackKind,
    /// Cycle length of the Grayhole schedule.
    pub grayhole_period: u64,
    /// Fraction of each cycle spent dropping.
    pub grayhole_duty: f64,
    /// Per-packet drop probability inside the dropping phase.
    pub grayhole_drop_prob: f64,
    pub phase_clock: PhaseClock,
    /// Advertise the reward cap instead of the true downstream Q.
    pub lure: bool,
    /// Subjects the liar targets; `None` targets every eligible subject.
    pub targets: Option<Vec<NodeId>>,
}

impl AttackerProfile {
    /// Profile with the default Grayhole schedule and lure setting for
    /// `kind`.
    pub fn new(node: NodeId, kind: AttackKind) -> Self {
        Self {
            node,
            kind,
            grayhole_period: 200,
            grayhole_duty: 0.5,
            grayhole_drop_prob: 1.0,
            phase_clock: PhaseClock::Time,
            lure: kind.drops_packets(),
            targets: None,
        }
    }

    /// True while a Grayhole is in its dropping phase at `clock`.
    pub fn in_drop_phase(&self, clock: u64) -> bool {
        if self.grayhole_period == 0 {
            return false;
        }
        let phase = (clock % self.grayhole_period) as f64;
        phase < self.grayhole_duty * self.grayhole_period as f64
    }

    fn targets(&self, subject: NodeId) -> bool {
        match &self.targets {
            None => true,
            Some(list) => list.contains(&subject),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardDecision {
    Forward,
    Drop,
}

/// Whether a node relays a packet it was asked to forward.
///
/// `clock` is the tick for time-driven Grayholes and the relay-request
/// counter for packet-count ones. The rng is only touched for a Grayhole
/// in its dropping phase with a drop probability strictly inside (0, 1).
pub fn forward_decision<R: Rng + ?Sized>(
    profile: Option<&AttackerProfile>,
    clock: Tick,
    rng: &mut R,
) -> ForwardDecision {
    let Some(p) = profile else {
        return ForwardDecision::Forward;
    };
    match p.kind {
        AttackKind::Blackhole => ForwardDecision::Drop,
        AttackKind::Grayhole => {
            if !p.in_drop_phase(clock) {
                return ForwardDecision::Forward;
            }
            let drop = if p.grayhole_drop_prob >= 1.0 {
                true
            } else if p.grayhole_drop_prob <= 0.0 {
                false
            } else {
                rng.random::<f64>() < p.grayhole_drop_prob
            };
            if drop {
                ForwardDecision::Drop
            } else {
                ForwardDecision::Forward
            }
        }
        AttackKind::BadMouthing | AttackKind::BallotStuffing => ForwardDecision::Forward,
    }
}

/// The mass a recommender actually reports about `subject`.
///
/// `honest_mass` is what a truthful node would report, and
/// `own_trust_as_seen_by_querier` weights any forged claim.
pub fn recommendation(
    profile: Option<&AttackerProfile>,
    subject: NodeId,
    subject_is_attacker: bool,
    honest_mass: MassAssignment,
    own_trust_as_seen_by_querier: f64,
) -> MassAssignment {
    let Some(p) = profile else {
        return honest_mass;
    };
    let forged = match p.kind {
        AttackKind::BadMouthing if !subject_is_attacker && p.targets(subject) => Claim::Malicious,
        AttackKind::BallotStuffing if subject_is_attacker && p.targets(subject) => Claim::Normal,
        _ => return honest_mass,
    };
    MassAssignment::from_claim(own_trust_as_seen_by_querier, forged)
}

/// Downstream Q the node reports back to its upstream sender.
pub fn advertise_q(profile: Option<&AttackerProfile>, true_max_q: f64, q_cap: f64) -> f64 {
    match profile {
        Some(p) if p.lure => q_cap,
        _ => true_max_q,
    }
}
