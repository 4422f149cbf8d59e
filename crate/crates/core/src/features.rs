//! The fixed battery of fifteen per-column feature functions and their
//! assembly into named feature vectors.
//!
//! Every function is total: empty and too-short inputs map to a degenerate
//! value (0, or 1 for the shape factor of a constant non-zero series) so that
//! vectors keep a fixed length and stay finite.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ingestion::SensorKind;
use crate::segmentation::{InteractionSegment, Matrix, SensorMatrices};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureFunction {
    Min,
    Max,
    Mean,
    Median,
    Std,
    Var,
    Kurtosis,
    Skewness,
    ShapeFactor,
    AbsEnergy,
    MeanSecondDerivativeCentral,
    MeanAbsChange,
    SumAbsChange,
    PeakCount,
    FourierEntropy,
}

impl FeatureFunction {
    pub const ALL: [FeatureFunction; 15] = [
        FeatureFunction::Min,
        FeatureFunction::Max,
        FeatureFunction::Mean,
        FeatureFunction::Median,
        FeatureFunction::Std,
        FeatureFunction::Var,
        FeatureFunction::Kurtosis,
        FeatureFunction::Skewness,
        FeatureFunction::ShapeFactor,
        FeatureFunction::AbsEnergy,
        FeatureFunction::MeanSecondDerivativeCentral,
        FeatureFunction::MeanAbsChange,
        FeatureFunction::SumAbsChange,
        FeatureFunction::PeakCount,
        FeatureFunction::FourierEntropy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureFunction::Min => "min",
            FeatureFunction::Max => "max",
            FeatureFunction::Mean => "mean",
            FeatureFunction::Median => "median",
            FeatureFunction::Std => "std",
            FeatureFunction::Var => "var",
            FeatureFunction::Kurtosis => "kurtosis",
            FeatureFunction::Skewness => "skewness",
            FeatureFunction::ShapeFactor => "shape_factor",
            FeatureFunction::AbsEnergy => "abs_energy",
            FeatureFunction::MeanSecondDerivativeCentral => "mean_second_derivative_central",
            FeatureFunction::MeanAbsChange => "mean_abs_change",
            FeatureFunction::SumAbsChange => "sum_abs_change",
            FeatureFunction::PeakCount => "peak_count",
            FeatureFunction::FourierEntropy => "fourier_entropy",
        }
    }

    pub fn apply(self, x: &[f64]) -> f64 {
        match self {
            FeatureFunction::Min => min(x),
            FeatureFunction::Max => max(x),
            FeatureFunction::Mean => mean(x),
            FeatureFunction::Median => median(x),
            FeatureFunction::Std => std(x),
            FeatureFunction::Var => var(x),
            FeatureFunction::Kurtosis => kurtosis(x),
            FeatureFunction::Skewness => skewness(x),
            FeatureFunction::ShapeFactor => shape_factor(x),
            FeatureFunction::AbsEnergy => abs_energy(x),
            FeatureFunction::MeanSecondDerivativeCentral => mean_second_derivative_central(x),
            FeatureFunction::MeanAbsChange => mean_abs_change(x),
            FeatureFunction::SumAbsChange => sum_abs_change(x),
            FeatureFunction::PeakCount => peak_count(x),
            FeatureFunction::FourierEntropy => fourier_entropy(x),
        }
    }
}

impl FromStr for FeatureFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown feature function {s}")))
    }
}

pub fn min(x: &[f64]) -> f64 {
    x.iter().copied().reduce(f64::min).unwrap_or(0.0)
}

pub fn max(x: &[f64]) -> f64 {
    x.iter().copied().reduce(f64::max).unwrap_or(0.0)
}

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        0.0
    } else {
        x.iter().sum::<f64>() / x.len() as f64
    }
}

pub fn median(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn is_constant(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[0] == w[1])
}

/// Central moments m2, m3, m4 (population).
fn central_moments(x: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mu = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Population variance.
pub fn var(x: &[f64]) -> f64 {
    if x.len() < 2 || is_constant(x) {
        return 0.0;
    }
    central_moments(x).0
}

pub fn std(x: &[f64]) -> f64 {
    var(x).sqrt()
}

/// Adjusted Fisher-Pearson skewness, `G1 = g1 * sqrt(n (n - 1)) / (n - 2)`.
pub fn skewness(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 3 || is_constant(x) {
        return 0.0;
    }
    let (m2, m3, _) = central_moments(x);
    let g1 = m3 / m2.powf(1.5);
    let n = n as f64;
    g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
}

/// Adjusted Fisher excess kurtosis,
/// `G2 = ((n + 1) g2 + 6) (n - 1) / ((n - 2)(n - 3))` with `g2 = m4 / m2² - 3`.
pub fn kurtosis(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 || is_constant(x) {
        return 0.0;
    }
    let (m2, _, m4) = central_moments(x);
    let g2 = m4 / (m2 * m2) - 3.0;
    let n = n as f64;
    ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0))
}

/// RMS divided by mean absolute value.
pub fn shape_factor(x: &[f64]) -> f64 {
    let mean_abs = mean_of(x.iter().map(|v| v.abs()), x.len());
    if mean_abs == 0.0 {
        return 0.0;
    }
    let rms = (abs_energy(x) / x.len() as f64).sqrt();
    rms / mean_abs
}

fn mean_of(it: impl Iterator<Item = f64>, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        it.sum::<f64>() / n as f64
    }
}

pub fn abs_energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn mean_second_derivative_central(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 3 {
        return 0.0;
    }
    let s: f64 = x.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).sum();
    s / (2.0 * (n - 2) as f64)
}

pub fn sum_abs_change(x: &[f64]) -> f64 {
    x.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

pub fn mean_abs_change(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    sum_abs_change(x) / (x.len() - 1) as f64
}

/// Strict one-neighbour local maxima; plateaus do not count.
pub fn peak_count(x: &[f64]) -> f64 {
    x.windows(3).filter(|w| w[0] < w[1] && w[1] > w[2]).count() as f64
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_for(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

/// Shannon entropy (nats) of the normalized periodogram over the positive
/// frequencies `1..=n/2` of the mean-removed series.
pub fn fourier_entropy(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 || is_constant(x) {
        return 0.0;
    }
    let mu = mean(x);
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v - mu, 0.0)).collect();
    fft_for(n).process(&mut buf);
    let power: Vec<f64> = buf[1..=n / 2].iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return 0.0;
    }
    -power
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| {
            let q = p / total;
            q * q.ln()
        })
        .sum::<f64>()
}

/// Canonical name of one feature: `device/sensor/component/function`.
///
/// Ordering follows the field order, which is the canonical order of every
/// feature vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureName {
    pub source_device: String,
    pub sensor: SensorKind,
    pub component: usize,
    pub function: FeatureFunction,
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}/{}",
            self.source_device,
            self.sensor,
            self.component,
            self.function.as_str()
        )
    }
}

impl FromStr for FeatureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation(format!("malformed feature name {s}"));
        let mut parts = s.rsplitn(4, '/');
        let function = parts.next().ok_or_else(bad)?.parse()?;
        let component: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let sensor = SensorKind::parse(parts.next().ok_or_else(bad)?).ok_or_else(bad)?;
        let source_device = parts.next().ok_or_else(bad)?.to_string();
        if component >= sensor.components() {
            return Err(bad());
        }
        Ok(FeatureName {
            source_device,
            sensor,
            component,
            function,
        })
    }
}

impl Serialize for FeatureName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Configuration {
    OnObject,
    OffObject,
    Combined,
}

impl Configuration {
    pub const ALL: [Configuration; 3] = [
        Configuration::OnObject,
        Configuration::OffObject,
        Configuration::Combined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Configuration::OnObject => "onobject",
            Configuration::OffObject => "offobject",
            Configuration::Combined => "combined",
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown configuration {s}")))
    }
}

/// Feature values of one device inside one segment, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceBlock {
    pub device: String,
    pub on_object: bool,
    pub entries: Vec<(FeatureName, f64)>,
}

fn block(device: &str, on_object: bool, matrices: &SensorMatrices) -> SourceBlock {
    let mut entries = Vec::new();
    for (&sensor, m) in matrices {
        push_matrix(&mut entries, device, sensor, m);
    }
    SourceBlock {
        device: device.to_string(),
        on_object,
        entries,
    }
}

fn push_matrix(out: &mut Vec<(FeatureName, f64)>, device: &str, sensor: SensorKind, m: &Matrix) {
    for (component, col) in m.columns.iter().enumerate() {
        for function in FeatureFunction::ALL {
            out.push((
                FeatureName {
                    source_device: device.to_string(),
                    sensor,
                    component,
                    function,
                },
                function.apply(col),
            ));
        }
    }
}

/// All per-device feature blocks of a segment, computed once and reused for
/// the three configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentFeatures {
    /// Sorted by device id.
    pub blocks: Vec<SourceBlock>,
}

impl SegmentFeatures {
    pub fn compute(segment: &InteractionSegment) -> Self {
        let mut blocks = Vec::with_capacity(segment.co_located.len() + 1);
        if !segment.on_object.is_empty() {
            blocks.push(block(&segment.object_id, true, &segment.on_object));
        }
        for (device, m) in &segment.co_located {
            blocks.push(block(device, false, m));
        }
        blocks.sort_by(|a, b| a.device.cmp(&b.device));
        SegmentFeatures { blocks }
    }

    fn in_scope(config: Configuration, on_object: bool) -> bool {
        match config {
            Configuration::OnObject => on_object,
            Configuration::OffObject => !on_object,
            Configuration::Combined => true,
        }
    }

    pub fn vector(&self, config: Configuration) -> Result<Vec<(FeatureName, f64)>> {
        let entries: Vec<_> = self
            .blocks
            .iter()
            .filter(|b| Self::in_scope(config, b.on_object))
            .flat_map(|b| b.entries.iter().cloned())
            .collect();
        if entries.is_empty() {
            return Err(Error::validation(format!(
                "no sensor sources in scope for configuration {config}"
            )));
        }
        Ok(entries)
    }

    pub fn has_sources(&self, config: Configuration) -> bool {
        self.blocks
            .iter()
            .any(|b| Self::in_scope(config, b.on_object) && !b.entries.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub object_id: String,
    pub run_id: String,
    pub config: Configuration,
    pub entries: Vec<(FeatureName, f64)>,
}

pub fn extract(segment: &InteractionSegment, config: Configuration) -> Result<FeatureVector> {
    let entries = SegmentFeatures::compute(segment).vector(config)?;
    Ok(FeatureVector {
        object_id: segment.object_id.clone(),
        run_id: segment.run_id.clone(),
        config,
        entries,
    })
}

/// Computes [`SegmentFeatures`] for every segment, in input order.
pub fn compute_all(segments: &[InteractionSegment]) -> Vec<SegmentFeatures> {
    segments.par_iter().map(SegmentFeatures::compute).collect()
}

/// Row-major feature matrix of one object under one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub object_id: String,
    pub config: Configuration,
    pub names: Vec<FeatureName>,
    /// Index into the segment list each row came from.
    pub segments: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    /// Collects the rows for `object_id` from precomputed features. Returns
    /// `Ok(None)` when the configuration has no sources for this object.
    pub fn build(
        object_id: &str,
        config: Configuration,
        segments: &[InteractionSegment],
        features: &[SegmentFeatures],
    ) -> Result<Option<Self>> {
        let mut table = FeatureTable {
            object_id: object_id.to_string(),
            config,
            names: Vec::new(),
            segments: Vec::new(),
            rows: Vec::new(),
        };
        for (i, (s, f)) in segments.iter().zip(features).enumerate() {
            if s.object_id != object_id {
                continue;
            }
            if !f.has_sources(config) {
                return Ok(None);
            }
            let entries = f.vector(config)?;
            if table.rows.is_empty() {
                table.names = entries.iter().map(|(n, _)| n.clone()).collect();
            } else if table.names.len() != entries.len()
                || table.names.iter().zip(&entries).any(|(a, (b, _))| a != b)
            {
                return Err(Error::validation(format!(
                    "segment {} of {object_id} has a different feature layout",
                    s.run_id
                )));
            }
            table.segments.push(i);
            table.rows.push(entries.into_iter().map(|(_, v)| v).collect());
        }
        Ok((!table.rows.is_empty()).then_some(table))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

/// Feature matrix export: `run_id,user_id,object_id,label,<names...>`.
pub fn write_csv<W: Write>(
    table: &FeatureTable,
    segments: &[InteractionSegment],
    label: impl Fn(&InteractionSegment) -> String,
    out: W,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    let io = |e| Error::io("<features.csv>", e);
    write!(out, "run_id,user_id,object_id,label").map_err(io)?;
    for n in &table.names {
        write!(out, ",{n}").map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    for (&i, row) in table.segments.iter().zip(&table.rows) {
        let s = &segments[i];
        write!(out, "{},{},{},{}", s.run_id, s.user_id, s.object_id, label(s)).map_err(io)?;
        for v in row {
            write!(out, ",{v}").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Feature names grouped by the sensor kind they come from.
pub fn by_sensor(names: &[FeatureName]) -> BTreeMap<SensorKind, Vec<usize>> {
    let mut out: BTreeMap<SensorKind, Vec<usize>> = BTreeMap::new();
    for (j, n) in names.iter().enumerate() {
        out.entry(n.sensor).or_default().push(j);
    }
    out
}
