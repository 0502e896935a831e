//! Per-node Q-table over (destination, neighbour) pairs with a
//! velocity-adaptive learning rate and link-life reward.

use alloc::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::math;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LearningParams {
    pub v_max: f64,
    pub v_min: f64,
    pub v_th: f64,
    /// Rate used when the speed difference is within `v_th`.
    pub lambda_fixed: f64,
    pub gamma: f64,
}

impl Default for LearningParams {
    fn default() -> Self {
        Self {
            v_max: 45.0,
            v_min: 5.0,
            v_th: 10.0,
            lambda_fixed: 0.1,
            gamma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum QError {
    #[error("reward must be non-negative, got {0}")]
    NegativeReward(f64),
    #[error("learning rate must lie in [0, 1], got {0}")]
    InvalidRate(f64),
    #[error("invalid learning parameters: {0}")]
    InvalidParams(&'static str),
}

impl LearningParams {
    pub fn validate(&self) -> Result<(), QError> {
        if self.v_max.is_nan() || self.v_min.is_nan() || self.v_max <= self.v_min {
            return Err(QError::InvalidParams("v_max must exceed v_min"));
        }
        if self.v_th.is_nan() || self.v_th < 0.0 {
            return Err(QError::InvalidParams("v_th must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.lambda_fixed) {
            return Err(QError::InvalidParams("lambda_fixed must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(QError::InvalidParams("gamma must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Learning rate for the link between nodes moving at `v_i` and `v_j`.
///
/// Above the velocity threshold the rate grows with the speed difference;
/// otherwise the fixed rate applies.
pub fn learning_rate(v_i: f64, v_j: f64, params: &LearningParams) -> f64 {
    let dv = math::abs(v_i - v_j);
    if dv > params.v_th {
        (dv / (params.v_max - params.v_min)).clamp(0.0, 1.0)
    } else {
        params.lambda_fixed
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QTable {
    owner: NodeId,
    values: BTreeMap<(NodeId, NodeId), f64>,
}

impl QTable {
    pub fn new(owner: NodeId) -> Self {
        Self {
            owner,
            values: BTreeMap::new(),
        }
    }

    pub fn owner(&self) -> NodeId {
        self.owner
    }

    /// Current value; entries that were never written read as 0.
    pub fn q(&self, dest: NodeId, neighbour: NodeId) -> f64 {
        self.values.get(&(dest, neighbour)).copied().unwrap_or(0.0)
    }

    /// All stored entries as `((destination, neighbour), q)`.
    pub fn entries(&self) -> impl Iterator<Item = (&(NodeId, NodeId), &f64)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `q <- (1 - lambda) q + lambda (reward + gamma * max_next_q)`; returns
    /// the new value.
    pub fn update(
        &mut self,
        dest: NodeId,
        neighbour: NodeId,
        reward: f64,
        max_next_q: f64,
        lambda: f64,
        gamma: f64,
    ) -> Result<f64, QError> {
        if reward.is_nan() || reward < 0.0 {
            return Err(QError::NegativeReward(reward));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(QError::InvalidRate(lambda));
        }
        let q = self.values.entry((dest, neighbour)).or_insert(0.0);
        *q = (1.0 - lambda) * *q + lambda * (reward + gamma * max_next_q);
        Ok(*q)
    }

    /// Largest value toward `dest` among `candidates`, 0 if there are none.
    pub fn max_q<'a, I>(&self, dest: NodeId, candidates: I) -> f64
    where
        I: IntoIterator<Item = &'a NodeId>,
    {
        candidates
            .into_iter()
            .map(|&n| self.q(dest, n))
            .fold(0.0, f64::max)
    }

    /// Greedy choice among `trusted`, lowest id on ties.
    pub fn best(&self, dest: NodeId, trusted: &BTreeSet<NodeId>) -> Option<NodeId> {
        let mut best: Option<(NodeId, f64)> = None;
        for &n in trusted {
            let q = self.q(dest, n);
            match best {
                Some((_, bq)) if q <= bq => {}
                _ => best = Some((n, q)),
            }
        }
        best.map(|(n, _)| n)
    }

    /// Epsilon-greedy next hop over the trusted set.
    pub fn select_next_hop<R: Rng + ?Sized>(
        &self,
        dest: NodeId,
        trusted: &BTreeSet<NodeId>,
        rng: &mut R,
        epsilon: f64,
    ) -> Option<NodeId> {
        if trusted.is_empty() {
            return None;
        }
        if epsilon > 0.0 && rng.random::<f64>() < epsilon {
            let pick = rng.random_range(0..trusted.len());
            return trusted.iter().nth(pick).copied();
        }
        self.best(dest, trusted)
    }

    /// Zeroes every entry routed through `neighbour`.
    pub fn reset_neighbour(&mut self, neighbour: NodeId) {
        for ((_, n), q) in self.values.iter_mut() {
            if *n == neighbour {
                *q = 0.0;
            }
        }
    }
}
