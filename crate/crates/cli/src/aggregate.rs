//! Cross-seed statistics and run comparison.

use std::path::Path;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::format::num;
use crate::runner::Summary;

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub metric: String,
    /// Seeds for which the metric was defined.
    pub n: usize,
    pub mean: Option<f64>,
    /// Two-sided 90% Student-t interval; needs at least two samples.
    pub ci90: Option<(f64, f64)>,
}

pub fn mean_ci90(xs: &[f64]) -> (Option<f64>, Option<(f64, f64)>) {
    let n = xs.len();
    if n == 0 {
        return (None, None);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.95);
    let half = t * (var / n as f64).sqrt();
    (Some(mean), Some((mean - half, mean + half)))
}

/// One row per summary metric except the seed itself.
pub fn aggregate(rows: &[Summary]) -> Vec<AggregateRow> {
    Summary::HEADER
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &metric)| {
            let xs: Vec<f64> = rows.iter().filter_map(|r| r.values()[i]).collect();
            let (mean, ci90) = mean_ci90(&xs);
            AggregateRow {
                metric: metric.to_string(),
                n: xs.len(),
                mean,
                ci90,
            }
        })
        .collect()
}

fn read_mean(dir: &Path, metric: &str) -> Result<f64> {
    let path = dir.join("aggregate.csv");
    let mut rdr = csv::Reader::from_path(&path).map_err(Error::csv(&path))?;
    for rec in rdr.records() {
        let rec = rec.map_err(Error::csv(&path))?;
        if rec.get(0) == Some(metric) {
            if let Some(Ok(v)) = rec.get(2).map(str::parse::<f64>) {
                return Ok(v);
            }
        }
    }
    Err(Error::MissingMetric {
        metric: metric.to_string(),
        path,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub metric: String,
    pub mean_a: f64,
    pub mean_b: f64,
}

impl Comparison {
    pub fn ratio(&self) -> f64 {
        self.mean_b / self.mean_a
    }

    /// Change from `a` to `b`, in percent of `a`.
    pub fn change_pct(&self) -> f64 {
        (self.mean_b - self.mean_a) / self.mean_a * 100.0
    }

    pub fn describe(&self) -> String {
        format!(
            "{}: a={} b={} ratio={} change={}%",
            self.metric,
            num(self.mean_a),
            num(self.mean_b),
            num(self.ratio()),
            num(self.change_pct())
        )
    }
}

/// Compares `metric` between two run directories and writes
/// `compare.csv` into `out`.
pub fn compare(run_a: &Path, run_b: &Path, metric: &str, out: &Path) -> Result<Comparison> {
    let c = Comparison {
        metric: metric.to_string(),
        mean_a: read_mean(run_a, metric)?,
        mean_b: read_mean(run_b, metric)?,
    };
    std::fs::create_dir_all(out).map_err(Error::io(out))?;
    let path = out.join("compare.csv");
    let mut w = csv::Writer::from_path(&path).map_err(Error::csv(&path))?;
    w.write_record([
        "metric",
        "run_a",
        "run_b",
        "mean_a",
        "mean_b",
        "ratio",
        "change_pct",
    ])
    .map_err(Error::csv(&path))?;
    w.write_record([
        metric.to_string(),
        run_a.display().to_string(),
        run_b.display().to_string(),
        num(c.mean_a),
        num(c.mean_b),
        num(c.ratio()),
        num(c.change_pct()),
    ])
    .map_err(Error::csv(&path))?;
    w.flush().map_err(Error::io(&path))?;
    Ok(c)
}
