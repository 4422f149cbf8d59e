//! Univariate mutual-information filtering and relative mutual information.
//!
//! Features are discretized into equal-frequency bins by rank, so the
//! estimate depends only on the ordering of the values: any strictly
//! increasing transform of a feature leaves its score unchanged. Tied values
//! always share a bin.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{by_sensor, Configuration, FeatureName, FeatureTable, SegmentFeatures};
use crate::ingestion::{AttackKind, SensorKind};
use crate::segmentation::InteractionSegment;

pub const BINS: usize = 10;
pub const TOP_K: usize = 20;

/// Bin index per value. With at most `bins` distinct values each distinct
/// value is its own bin; otherwise a value whose first occurrence has rank
/// `r` (0-based, ascending) lands in bin `floor(r * bins / n)`.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut distinct = 0usize;
    let mut first_rank = vec![0usize; n];
    let mut dense = vec![0usize; n];
    let mut start = 0;
    for (r, &i) in order.iter().enumerate() {
        if r > 0 && values[order[r - 1]] != values[i] {
            start = r;
            distinct += 1;
        }
        first_rank[i] = start;
        dense[i] = distinct;
    }
    let distinct = if n == 0 { 0 } else { distinct + 1 };
    if distinct <= bins {
        dense
    } else {
        first_rank.iter().map(|&r| r * bins / n).collect()
    }
}

fn entropy_of_counts<'a>(counts: impl Iterator<Item = &'a usize>, n: usize) -> f64 {
    let n = n as f64;
    -counts
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

fn dense_labels<L: std::hash::Hash + Eq + Copy>(labels: &[L]) -> (Vec<usize>, usize) {
    let mut ids = HashMap::new();
    let dense = labels
        .iter()
        .map(|l| {
            let k = ids.len();
            *ids.entry(*l).or_insert(k)
        })
        .collect();
    (dense, ids.len())
}

/// Entropy (nats) of a label sequence.
pub fn label_entropy(labels: &[usize]) -> f64 {
    let (dense, k) = dense_labels(labels);
    let mut counts = vec![0usize; k];
    for c in dense {
        counts[c] += 1;
    }
    entropy_of_counts(counts.iter(), labels.len())
}

fn check(values: &[f64], labels: &[usize]) -> Result<()> {
    if values.len() != labels.len() {
        return Err(Error::validation(format!(
            "feature has {} values but {} labels",
            values.len(),
            labels.len()
        )));
    }
    if values.len() < 2 {
        return Err(Error::validation("mutual information needs at least two samples"));
    }
    Ok(())
}

fn mi_binned(bins: &[usize], labels: &[usize]) -> f64 {
    let n = bins.len();
    let (classes, k) = dense_labels(labels);
    let nb = bins.iter().max().map_or(0, |m| m + 1);
    let mut joint = vec![0usize; nb * k];
    let mut pb = vec![0usize; nb];
    let mut pc = vec![0usize; k];
    for (&b, &c) in bins.iter().zip(&classes) {
        joint[b * k + c] += 1;
        pb[b] += 1;
        pc[c] += 1;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for b in 0..nb {
        for c in 0..k {
            let j = joint[b * k + c];
            if j == 0 {
                continue;
            }
            let pj = j as f64 / nf;
            mi += pj * ((j as f64 * nf) / (pb[b] as f64 * pc[c] as f64)).ln();
        }
    }
    mi.max(0.0)
}

/// Plug-in mutual information (nats) between a binned feature and class labels.
pub fn mutual_information(values: &[f64], labels: &[usize]) -> Result<f64> {
    check(values, labels)?;
    Ok(mi_binned(&equal_frequency_bins(values, BINS), labels))
}

/// `(H(user) - H(user | binned feature)) / H(user)`, clamped to `[0, 1]`.
pub fn rmi(values: &[f64], labels: &[usize]) -> Result<f64> {
    check(values, labels)?;
    let h = label_entropy(labels);
    if !(h > 0.0) {
        return Err(Error::validation("zero label entropy"));
    }
    Ok((mutual_information(values, labels)? / h).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiScore {
    pub feature: FeatureName,
    pub mi_nats: f64,
    pub rmi: f64,
}

/// The top features of one object under one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeatureSet {
    pub object_id: String,
    pub config: Configuration,
    pub features: Vec<FeatureName>,
    /// Column of each selected feature in the table it was fit on.
    pub columns: Vec<usize>,
    pub mi_nats: Vec<f64>,
}

impl SelectedFeatureSet {
    /// Projects a full row onto the selected columns.
    pub fn project(&self, row: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|&j| row[j]).collect()
    }
}

/// Ranks every column by MI with `labels` and keeps the best `k`. Ties go to
/// the column that comes first, which is the canonical name order.
pub fn select_top_k(table: &FeatureTable, rows: &[usize], labels: &[usize], k: usize) -> Result<SelectedFeatureSet> {
    if table.names.is_empty() {
        return Err(Error::validation("no feature columns to select from"));
    }
    let scores: Vec<f64> = (0..table.names.len())
        .into_par_iter()
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|&r| table.rows[r][j]).collect();
            mutual_information(&col, labels)
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k.min(order.len()));
    Ok(SelectedFeatureSet {
        object_id: table.object_id.clone(),
        config: table.config,
        features: order.iter().map(|&j| table.names[j].clone()).collect(),
        mi_nats: order.iter().map(|&j| scores[j]).collect(),
        columns: order,
    })
}

/// Maximum RMI (percent) per object and sensor kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RmiReport {
    pub config: Option<Configuration>,
    pub rows: BTreeMap<String, BTreeMap<SensorKind, f64>>,
}

/// Column order of `rmi_report.csv`.
pub const RMI_COLUMNS: [(SensorKind, &str); 4] = [
    (SensorKind::Acc, "ACC"),
    (SensorKind::Mag, "MAG"),
    (SensorKind::Gyro, "GYRO"),
    (SensorKind::MicSpl, "MIC"),
];

/// Labels are user identities over all non-attack segments of each object.
pub fn rmi_report(
    segments: &[InteractionSegment],
    features: &[SegmentFeatures],
    config: Configuration,
) -> Result<RmiReport> {
    let objects: std::collections::BTreeSet<&str> =
        segments.iter().map(|s| s.object_id.as_str()).collect();
    let mut report = RmiReport {
        config: Some(config),
        rows: BTreeMap::new(),
    };
    for object in objects {
        let Some(table) = FeatureTable::build(object, config, segments, features)? else {
            log::warn!("{object}: no {config} sensors, skipped in RMI report");
            continue;
        };
        let rows: Vec<usize> = (0..table.rows.len())
            .filter(|&r| segments[table.segments[r]].attack == AttackKind::None)
            .collect();
        let users: Vec<&str> = rows
            .iter()
            .map(|&r| segments[table.segments[r]].user_id.as_str())
            .collect();
        let (labels, _) = dense_labels(&users);
        let mut row = BTreeMap::new();
        for (sensor, cols) in by_sensor(&table.names) {
            let best = cols
                .par_iter()
                .map(|&j| {
                    let col: Vec<f64> = rows.iter().map(|&r| table.rows[r][j]).collect();
                    rmi(&col, &labels)
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            row.insert(sensor, 100.0 * best);
        }
        report.rows.insert(object.to_string(), row);
    }
    Ok(report)
}

pub fn write_rmi_csv<W: Write>(report: &RmiReport, out: W) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    let io = |e| Error::io("<rmi_report.csv>", e);
    write!(out, "object").map_err(io)?;
    for (_, name) in RMI_COLUMNS {
        write!(out, ",{name}").map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    for (object, row) in &report.rows {
        write!(out, "{object}").map_err(io)?;
        for (kind, _) in RMI_COLUMNS {
            match row.get(&kind) {
                Some(v) => write!(out, ",{v:.2}").map_err(io)?,
                None => write!(out, ",NA").map_err(io)?,
            }
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}
