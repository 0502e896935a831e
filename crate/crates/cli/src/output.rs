//! CSV writers. Every file has a header row; numbers go through
//! [`crate::format::num`].

use std::fs;
use std::path::{Path, PathBuf};

use trustroute::sim::MetricsReport;

use crate::aggregate::{aggregate, AggregateRow};
use crate::error::{Error, Result};
use crate::format::num;
use crate::runner::{SeedRun, Summary};

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(Error::csv(path))
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = writer(path)?;
    w.write_record(header).map_err(Error::csv(path))?;
    for row in rows {
        w.write_record(&row).map_err(Error::csv(path))?;
    }
    w.flush().map_err(Error::io(path))
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn ids<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_episodes(path: &Path, r: &MetricsReport) -> Result<()> {
    write_rows(
        path,
        &[
            "episode",
            "delivered",
            "hops",
            "reward_sum",
            "drop_cause",
            "path",
            "epsilon",
            "max_q_delta",
            "hop_trust",
        ],
        r.episodes.iter().map(|e| {
            vec![
                e.episode.to_string(),
                e.delivered().to_string(),
                e.hops().to_string(),
                num(e.reward),
                e.drop_cause.map_or("none", |c| c.as_str()).to_string(),
                ids(&e.path),
                num(e.epsilon),
                num(e.max_q_delta),
                e.hop_trust
                    .iter()
                    .map(|&t| num(t))
                    .collect::<Vec<_>>()
                    .join(" "),
            ]
        }),
    )
}

pub fn write_trust(path: &Path, r: &MetricsReport) -> Result<()> {
    write_rows(
        path,
        &[
            "episode",
            "tick",
            "owner",
            "subject",
            "alpha",
            "beta",
            "direct",
            "indirect",
            "confidence",
            "total",
        ],
        r.snapshots.trust.iter().map(|t| {
            vec![
                t.episode.to_string(),
                t.tick.to_string(),
                t.owner.to_string(),
                t.subject.to_string(),
                num(t.alpha),
                num(t.beta),
                num(t.direct),
                num(t.indirect),
                num(t.confidence),
                num(t.total),
            ]
        }),
    )
}

pub fn write_qtable(path: &Path, r: &MetricsReport) -> Result<()> {
    write_rows(
        path,
        &["episode", "tick", "owner", "destination", "neighbour", "q"],
        r.snapshots.qtable.iter().map(|q| {
            vec![
                q.episode.to_string(),
                q.tick.to_string(),
                q.owner.to_string(),
                q.destination.to_string(),
                q.neighbour.to_string(),
                num(q.q),
            ]
        }),
    )
}

pub fn write_positions(path: &Path, r: &MetricsReport) -> Result<()> {
    write_rows(
        path,
        &["episode", "tick", "node", "x", "y", "speed", "heading"],
        r.snapshots.positions.iter().map(|p| {
            vec![
                p.episode.to_string(),
                p.tick.to_string(),
                p.node.to_string(),
                num(p.x),
                num(p.y),
                num(p.speed),
                p.heading.as_i8().to_string(),
            ]
        }),
    )
}

pub fn write_summary(path: &Path, rows: &[Summary]) -> Result<()> {
    write_rows(
        path,
        &Summary::HEADER,
        rows.iter().map(|s| {
            let v = s.values();
            let mut out = vec![s.seed.to_string()];
            out.extend(v[1..].iter().map(|&x| opt(x)));
            out
        }),
    )
}

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    write_rows(
        path,
        &["metric", "n", "mean", "ci90_low", "ci90_high"],
        rows.iter().map(|a| {
            vec![
                a.metric.clone(),
                a.n.to_string(),
                opt(a.mean),
                opt(a.ci90.map(|c| c.0)),
                opt(a.ci90.map(|c| c.1)),
            ]
        }),
    )
}

/// Writes per-seed directories plus the cross-seed `summary.csv` and
/// `aggregate.csv`. Returns the aggregate rows.
pub fn write_run(out: &Path, runs: &[SeedRun]) -> Result<Vec<AggregateRow>> {
    fs::create_dir_all(out).map_err(Error::io(out))?;
    let mut summaries = Vec::with_capacity(runs.len());
    for run in runs {
        let dir: PathBuf = out.join(format!("seed-{}", run.seed));
        fs::create_dir_all(&dir).map_err(Error::io(&dir))?;
        let s = Summary::of(run);
        write_episodes(&dir.join("episodes.csv"), &run.report)?;
        write_trust(&dir.join("trust_timeseries.csv"), &run.report)?;
        write_qtable(&dir.join("qtable.csv"), &run.report)?;
        write_positions(&dir.join("positions.csv"), &run.report)?;
        write_summary(&dir.join("summary.csv"), std::slice::from_ref(&s))?;
        summaries.push(s);
    }
    write_summary(&out.join("summary.csv"), &summaries)?;
    let agg = aggregate(&summaries);
    write_aggregate(&out.join("aggregate.csv"), &agg)?;
    Ok(agg)
}
