//! Contact-event pairs to padded interaction windows.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingestion::{AttackKind, Dataset, Interaction, SensorKind, SensorRecording};

/// Seconds added on both sides of `[t0, t1]`.
pub const PADDING: f64 = 1.0;

/// Samples of one sensor inside a window, stored column by column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    #[serde(rename = "t")]
    pub times: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

impl Matrix {
    fn from_window(rec: &SensorRecording, lo: f64, hi: f64) -> Self {
        let range = rec.window(lo, hi);
        let m = rec.kind.components();
        let columns = (0..m)
            .map(|a| {
                range
                    .clone()
                    .map(|i| rec.values[i * m + a])
                    .collect::<Vec<_>>()
            })
            .collect();
        Matrix {
            times: rec.times[range].to_vec(),
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub type SensorMatrices = BTreeMap<SensorKind, Matrix>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionSegment {
    pub object_id: String,
    pub run_id: String,
    pub user_id: String,
    pub attack: AttackKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub victim_id: Option<String>,
    pub t0: f64,
    pub t1: f64,
    /// Every sensor of the object's own device; empty when the device carries
    /// no sensors.
    pub on_object: SensorMatrices,
    /// Every sensor of every co-located device, keyed by device id. A matrix
    /// may be empty when the device recorded nothing inside the window.
    pub co_located: BTreeMap<String, SensorMatrices>,
}

impl InteractionSegment {
    pub fn window(&self) -> (f64, f64) {
        (self.t0 - PADDING, self.t1 + PADDING)
    }

    /// Drops the signal matrices, keeping labels and timing.
    pub fn strip_signals(&mut self) {
        self.on_object.clear();
        self.co_located.clear();
    }

    /// Checks the window-containment invariant on every matrix row.
    pub fn is_contained(&self) -> bool {
        let (lo, hi) = self.window();
        self.on_object
            .values()
            .chain(self.co_located.values().flat_map(|m| m.values()))
            .all(|m| m.times.iter().all(|&t| lo <= t && t <= hi))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedSegment {
    pub object_id: String,
    pub run_id: String,
    pub t0: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Segmentation {
    /// Sorted by object id, then `t0`.
    pub segments: Vec<InteractionSegment>,
    pub dropped: Vec<DroppedSegment>,
}

fn matrices(dataset: &Dataset, device: &str, lo: f64, hi: f64) -> SensorMatrices {
    dataset
        .recordings_of(device)
        .map(|rec| (rec.kind, Matrix::from_window(rec, lo, hi)))
        .collect()
}

fn build(dataset: &Dataset, it: &Interaction) -> Result<InteractionSegment, DroppedSegment> {
    let run = &dataset.runs[it.run];
    let (lo, hi) = (it.t0 - PADDING, it.t1 + PADDING);
    let on_object = matrices(dataset, &it.object_id, lo, hi);
    if !on_object.is_empty() && on_object.values().all(Matrix::is_empty) {
        return Err(DroppedSegment {
            object_id: it.object_id.clone(),
            run_id: run.run_id.clone(),
            t0: it.t0,
            reason: "empty window on the object's own sensors".into(),
        });
    }
    let co_located = dataset
        .colocation
        .get(&it.object_id)
        .into_iter()
        .flatten()
        .map(|d| (d.clone(), matrices(dataset, d, lo, hi)))
        .filter(|(_, m)| !m.is_empty())
        .collect();
    Ok(InteractionSegment {
        object_id: it.object_id.clone(),
        run_id: run.run_id.clone(),
        user_id: run.user_id.clone(),
        attack: run.attack,
        victim_id: run.victim_id.clone(),
        t0: it.t0,
        t1: it.t1,
        on_object,
        co_located,
    })
}

/// One segment per OPEN/CLOSE pair, windowed to `[t0 - 1, t1 + 1]` (closed).
pub fn segment(dataset: &Dataset) -> Segmentation {
    let results: Vec<_> = dataset
        .interactions()
        .par_iter()
        .map(|it| build(dataset, it))
        .collect();
    let mut out = Segmentation::default();
    for r in results {
        match r {
            Ok(s) => out.segments.push(s),
            Err(d) => {
                log::warn!(
                    "dropping segment {} run {} t0={}: {}",
                    d.object_id,
                    d.run_id,
                    d.t0,
                    d.reason
                );
                out.dropped.push(d);
            }
        }
    }
    out.segments
        .sort_by(|a, b| a.object_id.cmp(&b.object_id).then(a.t0.total_cmp(&b.t0)));
    out
}

/// Segment indices partitioned relative to one victim.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VictimSplit {
    /// The victim's own non-attack segments.
    pub positives: Vec<usize>,
    /// Other users' non-attack segments (the zero-effort pool).
    pub negatives: Vec<usize>,
    /// Attack segments aimed at this victim, per attack kind.
    pub attacks: BTreeMap<AttackKind, Vec<usize>>,
    /// Attack segments aimed at some other victim.
    pub excluded: Vec<usize>,
}

pub fn segments_by_victim(segments: &[InteractionSegment], victim_id: &str) -> Result<VictimSplit> {
    if !segments
        .iter()
        .any(|s| s.attack == AttackKind::None && s.user_id == victim_id)
    {
        return Err(Error::validation(format!("unknown victim {victim_id}")));
    }
    let mut split = VictimSplit::default();
    for (i, s) in segments.iter().enumerate() {
        match (s.attack, s.victim_id.as_deref()) {
            (AttackKind::None, _) if s.user_id == victim_id => split.positives.push(i),
            (AttackKind::None, _) => split.negatives.push(i),
            (kind, Some(v)) if v == victim_id => split.attacks.entry(kind).or_default().push(i),
            _ => split.excluded.push(i),
        }
    }
    Ok(split)
}

/// Debug dump, one segment per line.
pub fn write_segments<W: Write>(segments: &[InteractionSegment], out: W) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    for s in segments {
        serde_json::to_writer(&mut out, s)?;
        out.write_all(b"\n").map_err(|e| Error::io("<segments>", e))?;
    }
    out.flush().map_err(|e| Error::io("<segments>", e))
}
