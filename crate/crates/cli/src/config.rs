//! Scenario files. TOML with one table per field group; every key is
//! optional and falls back to the built-in default.
//!
//! ```toml
//! [network]
//! topology = "random"
//! n_nodes = 64
//!
//! [trust]
//! T_th = 0.5
//!
//! [[attackers]]
//! kind = "grayhole"
//! nodes = [3, 9]
//! ```

use std::path::Path;

use serde::Deserialize;
use trustroute::adversary::{AttackKind, AttackerProfile, PhaseClock};
use trustroute::mobility::Heading;
use trustroute::sim::{NodeOverride, ScenarioConfig, Topology, TrustEvaluation};
use trustroute::trust::FusionRule;
use trustroute::NodeId;

use crate::error::{Error, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    network: RawNetwork,
    #[serde(default)]
    trust: RawTrust,
    #[serde(default)]
    learning: RawLearning,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    attackers: Vec<RawAttacker>,
    #[serde(default)]
    overrides: Vec<RawOverride>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    topology: Option<Topology>,
    n_nodes: Option<usize>,
    road_length: Option<f64>,
    tx_range: Option<f64>,
    velocity_range: Option<[f64; 2]>,
    v_max: Option<f64>,
    v_min: Option<f64>,
    lane_offset: Option<f64>,
    static_fraction: Option<f64>,
    hello_interval: Option<u64>,
    hello_timeout: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrust {
    c: Option<f64>,
    #[serde(rename = "T_th")]
    threshold: Option<f64>,
    fusion_rule: Option<FusionRule>,
    evaluation: Option<TrustEvaluation>,
    background_packets: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLearning {
    v_th: Option<f64>,
    lambda_fixed: Option<f64>,
    gamma: Option<f64>,
    epsilon: Option<f64>,
    epsilon_final: Option<f64>,
    epsilon_anneal: Option<f64>,
    max_link_life: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    episodes: Option<usize>,
    ticks_per_episode: Option<u64>,
    dt: Option<f64>,
    topology_change_at: Option<usize>,
    trust_enabled: Option<bool>,
    seed: Option<u64>,
    source: Option<u32>,
    destination: Option<u32>,
    snapshot_every: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttacker {
    kind: AttackKind,
    node: Option<u32>,
    nodes: Option<Vec<u32>>,
    period: Option<u64>,
    duty: Option<f64>,
    drop_prob: Option<f64>,
    phase_clock: Option<PhaseClock>,
    lure: Option<bool>,
    targets: Option<Vec<u32>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverride {
    node: u32,
    x: Option<f64>,
    speed: Option<f64>,
    heading: Option<Heading>,
    mobile: Option<bool>,
}

macro_rules! set {
    ($dst:expr, $src:expr) => {
        if let Some(v) = $src {
            $dst = v;
        }
    };
}

fn build(raw: RawFile) -> std::result::Result<ScenarioConfig, (&'static str, String)> {
    let mut cfg = ScenarioConfig::default();
    let n = raw.network;
    set!(cfg.topology, n.topology);
    set!(cfg.n_nodes, n.n_nodes);
    set!(cfg.road_length, n.road_length);
    set!(cfg.tx_range, n.tx_range);
    if let Some([lo, hi]) = n.velocity_range {
        cfg.velocity_range = (lo, hi);
    }
    set!(cfg.learning.v_max, n.v_max);
    set!(cfg.learning.v_min, n.v_min);
    set!(cfg.lane_offset, n.lane_offset);
    set!(cfg.static_fraction, n.static_fraction);
    set!(cfg.hello_interval, n.hello_interval);
    set!(cfg.hello_timeout, n.hello_timeout);

    let t = raw.trust;
    set!(cfg.trust.params.c, t.c);
    set!(cfg.trust.params.threshold, t.threshold);
    set!(cfg.trust.params.fusion_rule, t.fusion_rule);
    set!(cfg.trust.evaluation, t.evaluation);
    set!(cfg.trust.background_packets, t.background_packets);

    let l = raw.learning;
    set!(cfg.learning.v_th, l.v_th);
    set!(cfg.learning.lambda_fixed, l.lambda_fixed);
    set!(cfg.learning.gamma, l.gamma);
    set!(cfg.epsilon.start, l.epsilon);
    set!(cfg.epsilon.end, l.epsilon_final);
    set!(cfg.epsilon.anneal_fraction, l.epsilon_anneal);
    set!(cfg.max_link_life, l.max_link_life);

    let r = raw.run;
    set!(cfg.episodes, r.episodes);
    set!(cfg.ticks_per_episode, r.ticks_per_episode);
    set!(cfg.dt, r.dt);
    cfg.topology_change_at = r.topology_change_at;
    set!(cfg.trust_enabled, r.trust_enabled);
    set!(cfg.seed, r.seed);
    cfg.snapshot_every = r.snapshot_every;
    cfg.endpoints = match (r.source, r.destination) {
        (Some(s), Some(d)) => Some((NodeId(s), NodeId(d))),
        (None, None) => None,
        _ => {
            return Err((
                "run.source",
                "source and destination must be given together".into(),
            ))
        }
    };

    for a in raw.attackers {
        let ids: Vec<u32> = match (a.node, a.nodes) {
            (Some(n), None) => vec![n],
            (None, Some(ns)) => ns,
            _ => {
                return Err((
                    "attackers.node",
                    "each [[attackers]] entry needs exactly one of `node` or `nodes`".into(),
                ))
            }
        };
        for id in ids {
            let mut p = AttackerProfile::new(NodeId(id), a.kind);
            set!(p.grayhole_period, a.period);
            set!(p.grayhole_duty, a.duty);
            set!(p.grayhole_drop_prob, a.drop_prob);
            set!(p.phase_clock, a.phase_clock);
            set!(p.lure, a.lure);
            p.targets = a
                .targets
                .as_ref()
                .map(|ts| ts.iter().map(|&t| NodeId(t)).collect());
            cfg.attackers.push(p);
        }
    }
    for o in raw.overrides {
        cfg.overrides.push(NodeOverride {
            node: NodeId(o.node),
            x: o.x,
            speed: o.speed,
            heading: o.heading,
            mobile: o.mobile,
        });
    }
    Ok(cfg)
}

/// Parses and validates scenario text. `origin` only labels errors.
pub fn parse(text: &str, origin: &Path) -> Result<ScenarioConfig> {
    let raw: RawFile = toml::from_str(text).map_err(|e| Error::Config {
        path: origin.to_path_buf(),
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    let invalid = |field: &str, message: String| Error::Config {
        path: origin.to_path_buf(),
        line: locate(text, field),
        message: format!("{field}: {message}"),
    };
    let cfg = build(raw).map_err(|(f, m)| invalid(f, m))?;
    cfg.validate().map_err(|e| invalid(e.field, e.message))?;
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    parse(&text, path)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// 1-based line of `section.key`, or of the section header when the key is
/// absent (an invalid default), or `None`.
fn locate(text: &str, field: &str) -> Option<usize> {
    let (section, key) = field.split_once('.').unwrap_or((field, ""));
    let mut current = String::new();
    let mut header = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            current = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if current == section && header.is_none() {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section && !key.is_empty() {
            if let Some(rest) = t.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}
