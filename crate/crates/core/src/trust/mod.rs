//! Adaptive trust: Beta-posterior direct trust with a diminishing factor,
//! evidence-fused indirect trust, and a confidence-weighted total that gates
//! which neighbours may carry traffic.

mod counters;
pub mod evidence;
mod table;

use alloc::vec::Vec;

pub use counters::{InteractionCounters, COUNTER_FLOOR};
pub use evidence::{indirect_trust, Claim, FusionRule, Hypothesis, MassAssignment};
pub use table::{total_trust, TrustRecord, TrustTable};

use crate::{NodeId, Tick};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum TrustError {
    #[error("diminishing factor must lie strictly between 0 and 1, got {0}")]
    InvalidDiminishingFactor(f64),
    #[error("cannot decay to tick {now}: counters were last updated at {last_update}")]
    TimeReversal { now: Tick, last_update: Tick },
    #[error("invalid interaction counters alpha={alpha}, beta={beta}")]
    InvalidCounters { alpha: f64, beta: f64 },
    #[error("mass ({normal}, {malicious}, {unknown}) is not a probability assignment")]
    InvalidMass {
        normal: f64,
        malicious: f64,
        unknown: f64,
    },
    #[error("masses are in total contradiction")]
    TotalConflict,
    #[error("node {0} cannot hold a trust record about itself")]
    SelfReference(NodeId),
    #[error("trust threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),
}

/// Parameters of a trust evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrustParams {
    /// Diminishing factor applied per trust tick.
    pub c: f64,
    /// A neighbour is trusted when its total trust is strictly above this.
    pub threshold: f64,
    pub fusion_rule: FusionRule,
}

impl Default for TrustParams {
    fn default() -> Self {
        Self {
            c: 0.9,
            threshold: 0.5,
            fusion_rule: FusionRule::Normalized,
        }
    }
}

impl TrustParams {
    pub fn validate(&self) -> Result<(), TrustError> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(TrustError::InvalidDiminishingFactor(self.c));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(TrustError::InvalidThreshold(self.threshold));
        }
        Ok(())
    }
}

/// Direct trust after each step of a scripted behaviour.
///
/// `steps[t]` holds the packets forwarded and dropped during trust tick `t`.
/// Counters start at the prior, are decayed to `t`, then updated, and the
/// resulting direct trust is reported for that tick.
pub fn direct_trust_trace(steps: &[(u32, u32)], c: f64) -> Result<Vec<f64>, TrustError> {
    let mut counters = InteractionCounters::new(0);
    let mut out = Vec::with_capacity(steps.len());
    for (t, &(fwd, drop)) in steps.iter().enumerate() {
        counters = counters.decay(t as Tick, c)?.record(fwd, drop);
        out.push(counters.direct_trust());
    }
    Ok(out)
}
