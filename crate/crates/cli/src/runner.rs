//! Runs one scenario over many seeds and attaches wall-clock timing.

use std::time::Instant;

use rayon::prelude::*;
use trustroute::sim::{run_scenario, MetricsReport, ScenarioConfig};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub n_nodes: usize,
    pub report: MetricsReport,
    pub wall_time_s: f64,
}

/// `"7"` means seven seeds counting up from `base`; anything with a comma
/// is an explicit list.
pub fn parse_seeds(text: &str, base: u64) -> Result<Vec<u64>> {
    let text = text.trim();
    let seeds: Vec<u64> = if text.contains(',') {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::Seeds(format!("`{s}` is not a seed")))
            })
            .collect::<Result<_>>()?
    } else {
        let count: u64 = text
            .parse()
            .map_err(|_| Error::Seeds(format!("`{text}` is neither a count nor a list")))?;
        (0..count).map(|i| base.wrapping_add(i)).collect()
    };
    if seeds.is_empty() {
        return Err(Error::Seeds("no seeds given".into()));
    }
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Seeds(format!("seed {} appears twice", w[0])));
    }
    Ok(seeds)
}

pub fn run_one(cfg: &ScenarioConfig, seed: u64) -> Result<SeedRun> {
    let cfg = ScenarioConfig {
        seed,
        ..cfg.clone()
    };
    let start = Instant::now();
    let report = run_scenario(&cfg).map_err(|source| Error::Simulation { seed, source })?;
    let wall_time_s = start.elapsed().as_secs_f64();
    if let Some(trustroute::sim::TopologyChange::SkippedNoRoute { episode }) =
        report.topology_change
    {
        log::warn!("seed {seed}: no delivered route by episode {episode}, topology change skipped");
    }
    Ok(SeedRun {
        seed,
        n_nodes: cfg.n_nodes,
        report,
        wall_time_s,
    })
}

/// Runs every seed, at most `parallelism` at a time. Results come back in
/// seed-list order regardless of scheduling.
pub fn run_seeds(cfg: &ScenarioConfig, seeds: &[u64], parallelism: usize) -> Result<Vec<SeedRun>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .expect("thread pool");
    pool.install(|| seeds.par_iter().map(|&s| run_one(cfg, s)).collect())
}

/// Per-seed headline numbers, the rows of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub seed: u64,
    pub packets_received: u64,
    pub packets_dropped: u64,
    pub convergence_episode: Option<usize>,
    pub mean_hops: f64,
    pub attacker_intermediate_count: Option<f64>,
    pub normal_mean_intermediate_count: f64,
    pub wall_time_s: f64,
    pub dropped_attacker: u64,
    pub dropped_no_trusted_neighbour: u64,
    pub dropped_ttl: u64,
    pub reconvergence_episodes: Option<usize>,
}

impl Summary {
    pub const HEADER: [&'static str; 12] = [
        "seed",
        "packets_received",
        "packets_dropped",
        "convergence_episode",
        "mean_hops",
        "attacker_intermediate_count",
        "normal_mean_intermediate_count",
        "wall_time_s",
        "dropped_attacker_drop",
        "dropped_no_trusted_neighbour",
        "dropped_ttl_exceeded",
        "reconvergence_episodes",
    ];

    pub fn of(run: &SeedRun) -> Self {
        let r = &run.report;
        let all = 0..r.episodes.len();
        let drops = r.drops();
        Self {
            seed: run.seed,
            packets_received: r.packets_received(),
            packets_dropped: drops.total(),
            convergence_episode: r.convergence(),
            mean_hops: r.mean_hops_delivered(),
            attacker_intermediate_count: (!r.attackers.is_empty())
                .then(|| r.attacker_intermediate_count(all.clone())),
            normal_mean_intermediate_count: r.honest_intermediate_count(run.n_nodes, all),
            wall_time_s: run.wall_time_s,
            dropped_attacker: drops.attacker_drop,
            dropped_no_trusted_neighbour: drops.no_trusted_neighbour,
            dropped_ttl: drops.ttl_exceeded,
            reconvergence_episodes: r.reconvergence_episodes(),
        }
    }

    /// Values aligned with `HEADER`, `None` where the metric is undefined.
    pub fn values(&self) -> [Option<f64>; 12] {
        [
            Some(self.seed as f64),
            Some(self.packets_received as f64),
            Some(self.packets_dropped as f64),
            self.convergence_episode.map(|e| e as f64),
            Some(self.mean_hops),
            self.attacker_intermediate_count,
            Some(self.normal_mean_intermediate_count),
            Some(self.wall_time_s),
            Some(self.dropped_attacker as f64),
            Some(self.dropped_no_trusted_neighbour as f64),
            Some(self.dropped_ttl as f64),
            self.reconvergence_episodes.map(|e| e as f64),
        ]
    }
}
