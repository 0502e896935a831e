//! Discrete-time VANET simulation: HELLO-driven neighbour discovery,
//! trust-gated Q-routing of one packet per episode, and attacker
//! behaviour.

mod config;
mod episode;
mod metrics;
mod network;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng;

pub use config::{
    ConfigError, EpsilonSchedule, NodeOverride, ScenarioConfig, Topology, TrustConfig,
    TrustEvaluation,
};
pub use metrics::{
    convergence_episode, DropCause, DropTally, EpisodeRecord, MetricsReport, PositionRow, QRow,
    Snapshots, TopologyChange, TrustRow, CONVERGENCE_WINDOW,
};
pub use network::{build_topology, farthest_honest_pair, Network};

use crate::qrouting::QError;
use crate::trust::TrustError;
use crate::NodeId;

/// Q change, relative to the link-life cap, below which an episode is quiet.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Trust(#[from] TrustError),
    #[error(transparent)]
    Learning(#[from] QError),
    #[error("could not place nodes with degree 1..=3 after {attempts} resamples ({violating} nodes still violate)")]
    Placement { attempts: usize, violating: usize },
}

/// Runs a full scenario and collects its metrics.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MetricsReport, SimError> {
    let mut net = Network::new(cfg)?;
    let attackers: BTreeSet<NodeId> = cfg.attackers.iter().map(|a| a.node).collect();
    let (source, destination) = cfg
        .endpoints
        .unwrap_or_else(|| farthest_honest_pair(net.nodes(), &attackers));

    let mut report = MetricsReport {
        seed: cfg.seed,
        source,
        destination,
        attackers: attackers.iter().copied().collect(),
        episodes: Vec::with_capacity(cfg.episodes),
        topology_change: None,
        snapshots: Snapshots::default(),
        convergence_tolerance: CONVERGENCE_TOLERANCE * cfg.max_link_life,
    };

    for e in 0..cfg.episodes {
        if cfg.topology_change_at == Some(e) {
            report.topology_change = Some(break_route(&mut net, &report, e, source, destination));
        }
        let eps = cfg.epsilon.at(e, cfg.episodes);
        let rec = net.run_episode(e, source, destination, eps)?;
        report.episodes.push(rec);
        if let Some(k) = cfg.snapshot_every {
            if e % k == 0 || e + 1 == cfg.episodes {
                snapshot(&net, e, &mut report.snapshots);
            }
        }
        for _ in 0..cfg.ticks_per_episode {
            net.tick()?;
        }
    }
    Ok(report)
}

/// Breaks the route the network has settled on by wiping what every node
/// learned about one of its relays.
fn break_route(
    net: &mut Network,
    report: &MetricsReport,
    episode: usize,
    source: NodeId,
    dest: NodeId,
) -> TopologyChange {
    let interior: Vec<NodeId> = report
        .modal_path(episode)
        .map(|p| {
            p.into_iter()
                .filter(|&n| n != source && n != dest)
                .collect()
        })
        .unwrap_or_default();
    if interior.is_empty() {
        return TopologyChange::SkippedNoRoute { episode };
    }
    let relay = interior[net.streams.change.random_range(0..interior.len())];
    net.forget_relay(relay);
    TopologyChange::Applied { episode, relay }
}

fn snapshot(net: &Network, episode: usize, out: &mut Snapshots) {
    for table in &net.trust {
        for r in table.records() {
            out.trust.push(TrustRow {
                episode,
                tick: net.now(),
                owner: table.owner(),
                subject: r.subject,
                alpha: r.counters.alpha(),
                beta: r.counters.beta(),
                direct: r.direct,
                indirect: r.indirect,
                confidence: r.confidence,
                total: r.total,
            });
        }
    }
    for table in &net.q {
        for (&(destination, neighbour), &q) in table.entries() {
            out.qtable.push(QRow {
                episode,
                tick: net.now(),
                owner: table.owner(),
                destination,
                neighbour,
                q,
            });
        }
    }
    for k in net.nodes() {
        out.positions.push(PositionRow {
            episode,
            tick: net.now(),
            node: k.node,
            x: k.x,
            y: k.y,
            speed: k.speed,
            heading: k.heading,
        });
    }
}
