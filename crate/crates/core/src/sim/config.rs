use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::adversary::AttackerProfile;
use crate::mobility::{Heading, DEFAULT_MAX_LINK_LIFE};
use crate::qrouting::LearningParams;
use crate::trust::TrustParams;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Topology {
    #[default]
    Random,
    Grid,
}

/// When nodes re-run the trusted-neighbour evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TrustEvaluation {
    /// Each forwarding node evaluates its neighbours when it holds a packet.
    #[default]
    PerHop,
    /// Every node evaluates all neighbours at each HELLO; routing uses the
    /// cached result.
    PerHello,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrustConfig {
    pub params: TrustParams,
    pub evaluation: TrustEvaluation,
    /// Relay attempts each node overhears per neighbour per HELLO, on top of
    /// the routed packets.
    pub background_packets: u32,
}

impl Default for TrustConfig {
    fn default() -> Self {
        Self {
            params: TrustParams::default(),
            evaluation: TrustEvaluation::PerHop,
            background_packets: 1,
        }
    }
}

/// Linear annealing of the exploration rate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    /// Share of the run over which `start` moves to `end`.
    pub anneal_fraction: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self {
            start: 0.1,
            end: 0.01,
            anneal_fraction: 0.1,
        }
    }
}

impl EpsilonSchedule {
    pub fn at(&self, episode: usize, total: usize) -> f64 {
        let span = libm::ceil(self.anneal_fraction * total as f64) as usize;
        if span == 0 || episode >= span {
            return self.end;
        }
        self.start + (self.end - self.start) * (episode as f64 / span as f64)
    }
}

/// Per-node kinematic overrides applied after placement.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeOverride {
    pub node: NodeId,
    pub x: Option<f64>,
    pub speed: Option<f64>,
    pub heading: Option<Heading>,
    pub mobile: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioConfig {
    pub topology: Topology,
    pub n_nodes: usize,
    /// Metres; positions wrap at this length.
    pub road_length: f64,
    pub tx_range: f64,
    /// Speeds of mobile nodes are drawn uniformly from this range (m/s).
    pub velocity_range: (f64, f64),
    /// y of the backward lane; the forward lane sits at y = 0.
    pub lane_offset: f64,
    pub static_fraction: f64,
    pub overrides: Vec<NodeOverride>,
    pub attackers: Vec<AttackerProfile>,
    pub trust: TrustConfig,
    pub learning: LearningParams,
    pub epsilon: EpsilonSchedule,
    pub hello_interval: u64,
    pub hello_timeout: u64,
    pub ticks_per_episode: u64,
    /// Seconds per tick.
    pub dt: f64,
    pub max_link_life: f64,
    pub episodes: usize,
    pub topology_change_at: Option<usize>,
    pub trust_enabled: bool,
    pub seed: u64,
    /// Fixed (source, destination); the farthest honest pair otherwise.
    pub endpoints: Option<(NodeId, NodeId)>,
    /// Record trust, Q-table and position snapshots every this many episodes.
    pub snapshot_every: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            topology: Topology::Random,
            n_nodes: 16,
            road_length: 3200.0,
            tx_range: 300.0,
            velocity_range: (5.0, 35.0),
            lane_offset: 0.0,
            static_fraction: 0.0,
            overrides: Vec::new(),
            attackers: Vec::new(),
            trust: TrustConfig::default(),
            learning: LearningParams::default(),
            epsilon: EpsilonSchedule::default(),
            hello_interval: 10,
            hello_timeout: 30,
            ticks_per_episode: 10,
            dt: 0.1,
            max_link_life: DEFAULT_MAX_LINK_LIFE,
            episodes: 1000,
            topology_change_at: None,
            trust_enabled: true,
            seed: 0,
            endpoints: None,
            snapshot_every: None,
        }
    }
}

/// A rejected configuration value. `field` uses the dotted config-file key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::new(
                    field,
                    format!("must be positive, got {v}"),
                ))
            }
        };
        let unit = |field: &'static str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::new(
                    field,
                    format!("must lie in [0, 1], got {v}"),
                ))
            }
        };

        if self.n_nodes < 2 {
            return Err(ConfigError::new("network.n_nodes", "need at least 2 nodes"));
        }
        if self.n_nodes > u32::MAX as usize {
            return Err(ConfigError::new("network.n_nodes", "too many nodes"));
        }
        positive("network.road_length", self.road_length)?;
        positive("network.tx_range", self.tx_range)?;
        let (lo, hi) = self.velocity_range;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(ConfigError::new(
                "network.velocity_range",
                format!("expected 0 <= low <= high, got [{lo}, {hi}]"),
            ));
        }
        if !self.lane_offset.is_finite() {
            return Err(ConfigError::new("network.lane_offset", "must be finite"));
        }
        unit("network.static_fraction", self.static_fraction)?;

        let t = &self.trust.params;
        if !(t.c > 0.0 && t.c < 1.0) {
            return Err(ConfigError::new(
                "trust.c",
                format!("must lie strictly between 0 and 1, got {}", t.c),
            ));
        }
        unit("trust.T_th", t.threshold)?;

        let l = &self.learning;
        positive("network.v_max", l.v_max)?;
        if !(l.v_min >= 0.0 && l.v_max > l.v_min) {
            return Err(ConfigError::new(
                "network.v_min",
                format!(
                    "need 0 <= v_min < v_max, got v_min={} v_max={}",
                    l.v_min, l.v_max
                ),
            ));
        }
        if l.v_th.is_nan() || l.v_th < 0.0 {
            return Err(ConfigError::new("learning.v_th", "must be non-negative"));
        }
        unit("learning.lambda_fixed", l.lambda_fixed)?;
        unit("learning.gamma", l.gamma)?;
        if hi > l.v_max {
            return Err(ConfigError::new(
                "network.velocity_range",
                format!("upper speed {hi} exceeds v_max {}", l.v_max),
            ));
        }
        let e = &self.epsilon;
        for (field, v) in [
            ("learning.epsilon", e.start),
            ("learning.epsilon_final", e.end),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(ConfigError::new(
                    field,
                    format!("must lie in [0, 1), got {v}"),
                ));
            }
        }
        unit("learning.epsilon_anneal", e.anneal_fraction)?;

        if self.hello_interval == 0 {
            return Err(ConfigError::new(
                "network.hello_interval",
                "must be at least 1 tick",
            ));
        }
        if self.hello_timeout == 0 {
            return Err(ConfigError::new(
                "network.hello_timeout",
                "must be at least 1 tick",
            ));
        }
        if self.ticks_per_episode == 0 {
            return Err(ConfigError::new(
                "run.ticks_per_episode",
                "must be at least 1 tick",
            ));
        }
        positive("run.dt", self.dt)?;
        positive("learning.max_link_life", self.max_link_life)?;
        if self.episodes == 0 {
            return Err(ConfigError::new("run.episodes", "must be at least 1"));
        }
        if let Some(at) = self.topology_change_at {
            if at >= self.episodes {
                return Err(ConfigError::new(
                    "run.topology_change_at",
                    format!(
                        "episode {at} is beyond the run of {} episodes",
                        self.episodes
                    ),
                ));
            }
        }
        if self.snapshot_every == Some(0) {
            return Err(ConfigError::new("run.snapshot_every", "must be at least 1"));
        }

        let n = self.n_nodes as u32;
        let mut seen: Vec<NodeId> = Vec::new();
        for a in &self.attackers {
            if a.node.0 >= n {
                return Err(ConfigError::new(
                    "attackers.node",
                    format!("node {} does not exist in a {n}-node network", a.node),
                ));
            }
            if seen.contains(&a.node) {
                return Err(ConfigError::new(
                    "attackers.node",
                    format!("node {} has more than one attacker profile", a.node),
                ));
            }
            seen.push(a.node);
            unit("attackers.grayhole_duty", a.grayhole_duty)?;
            unit("attackers.grayhole_drop_prob", a.grayhole_drop_prob)?;
            if a.grayhole_period == 0 {
                return Err(ConfigError::new(
                    "attackers.grayhole_period",
                    "must be at least 1",
                ));
            }
        }
        if seen.len() + 2 > self.n_nodes {
            return Err(ConfigError::new(
                "attackers",
                "need at least two honest nodes for source and destination",
            ));
        }
        for o in &self.overrides {
            if o.node.0 >= n {
                return Err(ConfigError::new(
                    "overrides.node",
                    format!("node {} does not exist", o.node),
                ));
            }
            if let Some(s) = o.speed {
                if !(s >= 0.0 && s <= l.v_max) {
                    return Err(ConfigError::new(
                        "overrides.speed",
                        format!("speed {s} outside [0, v_max]"),
                    ));
                }
            }
        }
        if let Some((s, d)) = self.endpoints {
            if s == d {
                return Err(ConfigError::new(
                    "run.source",
                    "source and destination must differ",
                ));
            }
            if s.0 >= n || d.0 >= n {
                return Err(ConfigError::new("run.source", "endpoint does not exist"));
            }
            if seen.contains(&s) || seen.contains(&d) {
                return Err(ConfigError::new(
                    "run.source",
                    "endpoints must be honest nodes",
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::AttackKind;

    #[test]
    fn default_config_is_valid() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn threshold_out_of_range_names_the_field() {
        let mut cfg = ScenarioConfig::default();
        cfg.trust.params.threshold = 1.5;
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.field, "trust.T_th");
    }

    #[test]
    fn attackers_must_exist_and_be_unique() {
        let mut cfg = ScenarioConfig::default();
        cfg.attackers
            .push(AttackerProfile::new(NodeId(99), AttackKind::Blackhole));
        assert_eq!(cfg.validate().unwrap_err().field, "attackers.node");
        cfg.attackers.clear();
        cfg.attackers
            .push(AttackerProfile::new(NodeId(1), AttackKind::Blackhole));
        cfg.attackers
            .push(AttackerProfile::new(NodeId(1), AttackKind::Grayhole));
        assert_eq!(cfg.validate().unwrap_err().field, "attackers.node");
    }

    #[test]
    fn too_few_nodes_rejected() {
        let cfg = ScenarioConfig {
            n_nodes: 1,
            ..ScenarioConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().field, "network.n_nodes");
    }

    #[test]
    fn epsilon_schedule_anneals_linearly() {
        let s = EpsilonSchedule::default();
        assert_eq!(s.at(0, 1000), 0.1);
        assert!((s.at(50, 1000) - 0.055).abs() < 1e-12);
        assert_eq!(s.at(100, 1000), 0.01);
        assert_eq!(s.at(900, 1000), 0.01);
        let flat = EpsilonSchedule {
            start: 0.0,
            end: 0.0,
            anneal_fraction: 0.0,
        };
        assert_eq!(flat.at(0, 10), 0.0);
    }
}
