use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::mobility::Heading;
use crate::{NodeId, Tick};

/// Why an episode's packet did not reach the destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DropCause {
    AttackerDrop,
    NoTrustedNeighbour,
    TtlExceeded,
}

impl DropCause {
    pub fn as_str(self) -> &'static str {
        match self {
            DropCause::AttackerDrop => "attacker_drop",
            DropCause::NoTrustedNeighbour => "no_trusted_neighbour",
            DropCause::TtlExceeded => "ttl_exceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeRecord {
    pub episode: usize,
    /// Tick at which the packet was injected.
    pub tick: Tick,
    pub epsilon: f64,
    /// Source first; ends at the destination when delivered.
    pub path: Vec<NodeId>,
    pub drop_cause: Option<DropCause>,
    /// Sum of link-life rewards over the hops taken.
    pub reward: f64,
    /// Total trust of each chosen relay at the moment it was selected.
    pub hop_trust: Vec<f64>,
    /// Largest absolute Q change made during the episode.
    pub max_q_delta: f64,
}

impl EpisodeRecord {
    pub fn delivered(&self) -> bool {
        self.drop_cause.is_none()
    }

    pub fn hops(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    /// Nodes strictly between source and destination. A dropping relay that
    /// ends the path counts as an intermediate.
    pub fn intermediates(&self) -> &[NodeId] {
        if self.path.len() < 2 {
            return &[];
        }
        if self.delivered() {
            &self.path[1..self.path.len() - 1]
        } else {
            &self.path[1..]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DropTally {
    pub attacker_drop: u64,
    pub no_trusted_neighbour: u64,
    pub ttl_exceeded: u64,
}

impl DropTally {
    pub fn add(&mut self, cause: DropCause) {
        match cause {
            DropCause::AttackerDrop => self.attacker_drop += 1,
            DropCause::NoTrustedNeighbour => self.no_trusted_neighbour += 1,
            DropCause::TtlExceeded => self.ttl_exceeded += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.attacker_drop + self.no_trusted_neighbour + self.ttl_exceeded
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TopologyChange {
    /// Every Q entry routed through `relay` was zeroed before `episode`.
    Applied { episode: usize, relay: NodeId },
    /// No packet had been delivered yet, so there was no route to break.
    SkippedNoRoute { episode: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrustRow {
    pub episode: usize,
    pub tick: Tick,
    pub owner: NodeId,
    pub subject: NodeId,
    pub alpha: f64,
    pub beta: f64,
    pub direct: f64,
    pub indirect: f64,
    pub confidence: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QRow {
    pub episode: usize,
    pub tick: Tick,
    pub owner: NodeId,
    pub destination: NodeId,
    pub neighbour: NodeId,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PositionRow {
    pub episode: usize,
    pub tick: Tick,
    pub node: NodeId,
    pub x: f64,
    pub y: f64,
    pub speed: f64,
    pub heading: Heading,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Snapshots {
    pub trust: Vec<TrustRow>,
    pub qtable: Vec<QRow>,
    pub positions: Vec<PositionRow>,
}

/// Everything a run produces, apart from wall-clock timing.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub seed: u64,
    pub source: NodeId,
    pub destination: NodeId,
    pub attackers: Vec<NodeId>,
    pub episodes: Vec<EpisodeRecord>,
    pub topology_change: Option<TopologyChange>,
    pub snapshots: Snapshots,
    /// Q change below which an episode counts as quiet.
    pub convergence_tolerance: f64,
}

/// Consecutive quiet episodes required before the Q-tables count as settled.
pub const CONVERGENCE_WINDOW: usize = 50;

/// First episode at or after `from` that opens a run of `window` episodes
/// whose largest Q change stays below `tolerance`.
pub fn convergence_episode(
    deltas: &[f64],
    from: usize,
    window: usize,
    tolerance: f64,
) -> Option<usize> {
    let mut run = 0;
    for (i, &d) in deltas.iter().enumerate().skip(from) {
        if d < tolerance {
            run += 1;
            if run == window {
                return Some(i + 1 - window);
            }
        } else {
            run = 0;
        }
    }
    None
}

impl MetricsReport {
    pub fn packets_sent(&self) -> u64 {
        self.episodes.len() as u64
    }

    pub fn packets_received(&self) -> u64 {
        self.episodes.iter().filter(|e| e.delivered()).count() as u64
    }

    pub fn drops(&self) -> DropTally {
        let mut t = DropTally::default();
        for c in self.episodes.iter().filter_map(|e| e.drop_cause) {
            t.add(c);
        }
        t
    }

    pub fn delivery_ratio(&self) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        self.packets_received() as f64 / self.packets_sent() as f64
    }

    /// Times each node served as an intermediate over `range` of episodes.
    pub fn intermediate_counts(&self, range: core::ops::Range<usize>) -> BTreeMap<NodeId, u64> {
        let mut counts = BTreeMap::new();
        let end = range.end.min(self.episodes.len());
        let start = range.start.min(end);
        for e in &self.episodes[start..end] {
            for &n in e.intermediates() {
                *counts.entry(n).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Mean intermediate count over attackers during `range`.
    pub fn attacker_intermediate_count(&self, range: core::ops::Range<usize>) -> f64 {
        let counts = self.intermediate_counts(range);
        mean(
            self.attackers
                .iter()
                .map(|a| counts.get(a).copied().unwrap_or(0) as f64),
        )
    }

    /// Mean intermediate count during `range` over honest nodes other than
    /// the endpoints.
    pub fn honest_intermediate_count(&self, n_nodes: usize, range: core::ops::Range<usize>) -> f64 {
        let counts = self.intermediate_counts(range);
        mean(
            (0..n_nodes as u32)
                .map(NodeId)
                .filter(|n| {
                    *n != self.source && *n != self.destination && !self.attackers.contains(n)
                })
                .map(|n| counts.get(&n).copied().unwrap_or(0) as f64),
        )
    }

    pub fn mean_hops_delivered(&self) -> f64 {
        mean(
            self.episodes
                .iter()
                .filter(|e| e.delivered())
                .map(|e| e.hops() as f64),
        )
    }

    pub fn q_deltas(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.max_q_delta).collect()
    }

    pub fn convergence_from(&self, from: usize) -> Option<usize> {
        convergence_episode(
            &self.q_deltas(),
            from,
            CONVERGENCE_WINDOW,
            self.convergence_tolerance,
        )
    }

    pub fn convergence(&self) -> Option<usize> {
        self.convergence_from(0)
    }

    /// Episodes between the topology change and re-convergence.
    pub fn reconvergence_episodes(&self) -> Option<usize> {
        match self.topology_change? {
            TopologyChange::Applied { episode, .. } => {
                self.convergence_from(episode).map(|e| e - episode)
            }
            TopologyChange::SkippedNoRoute { .. } => None,
        }
    }

    /// Most frequent delivered path, earliest first on ties.
    pub fn modal_path(&self, upto: usize) -> Option<Vec<NodeId>> {
        modal_path(&self.episodes[..upto.min(self.episodes.len())])
    }
}

pub(crate) fn modal_path(episodes: &[EpisodeRecord]) -> Option<Vec<NodeId>> {
    let mut counts: BTreeMap<&[NodeId], (usize, usize)> = BTreeMap::new();
    for (i, e) in episodes.iter().enumerate().filter(|(_, e)| e.delivered()) {
        counts.entry(e.path.as_slice()).or_insert((0, i)).0 += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .map(|(p, _)| p.to_vec())
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ep(i: usize, path: &[u32], cause: Option<DropCause>) -> EpisodeRecord {
        EpisodeRecord {
            episode: i,
            tick: 0,
            epsilon: 0.0,
            path: path.iter().map(|&n| NodeId(n)).collect(),
            drop_cause: cause,
            reward: 0.0,
            hop_trust: vec![],
            max_q_delta: 0.0,
        }
    }

    #[test]
    fn intermediates_include_dropping_relay() {
        assert_eq!(
            ep(0, &[0, 1, 2, 3], None).intermediates(),
            &[NodeId(1), NodeId(2)]
        );
        assert_eq!(
            ep(0, &[0, 1, 2], Some(DropCause::AttackerDrop)).intermediates(),
            &[NodeId(1), NodeId(2)]
        );
        assert!(ep(0, &[0], Some(DropCause::NoTrustedNeighbour))
            .intermediates()
            .is_empty());
    }

    #[test]
    fn convergence_window() {
        let mut d = vec![1.0; 10];
        d.extend(vec![0.0; 5]);
        assert_eq!(convergence_episode(&d, 0, 5, 0.5), Some(10));
        assert_eq!(convergence_episode(&d, 0, 6, 0.5), None);
        d.push(1.0);
        d.extend(vec![0.0; 3]);
        assert_eq!(convergence_episode(&d, 11, 3, 0.5), Some(11));
        assert_eq!(convergence_episode(&d, 14, 3, 0.5), Some(16));
    }

    #[test]
    fn modal_path_prefers_frequent_then_earliest() {
        let eps = vec![
            ep(0, &[0, 2, 3], None),
            ep(1, &[0, 1, 3], None),
            ep(2, &[0, 1, 3], None),
            ep(3, &[0, 4], Some(DropCause::AttackerDrop)),
            ep(4, &[0, 2, 3], None),
        ];
        assert_eq!(
            modal_path(&eps[..3]),
            Some(vec![NodeId(0), NodeId(1), NodeId(3)])
        );
        assert_eq!(
            modal_path(&eps),
            Some(vec![NodeId(0), NodeId(2), NodeId(3)])
        );
        assert_eq!(modal_path(&eps[3..4]), None);
    }

    #[test]
    fn drop_tally() {
        let mut t = DropTally::default();
        t.add(DropCause::AttackerDrop);
        t.add(DropCause::TtlExceeded);
        assert_eq!(t.total(), 2);
    }
}
