//! Recordings, contact events, run metadata and co-location, parsed from the
//! line-delimited on-disk formats into a validated [`Dataset`].
//!
//! `recordings.jsonl` carries one record per line:
//!
//! ```text
//! {"session_epoch":"2021-06-01T09:00:00Z","version":1}          optional header
//! {"device":"O4","sensor":"GYRO","t":12.503,"v":[0.01,-0.32,1.2]}
//! {"device":"O4","event":"open","t":12.0}
//! ```
//!
//! `runs.jsonl` carries one run per line; `start`/`end` (seconds) bound the
//! run in time and are required once a session holds more than one run:
//!
//! ```text
//! {"run":"r01","user":"U1","attack":"none","start":0.0,"end":48.5}
//! {"run":"a03","user":"U7","attack":"video","victim":"U1","start":900.0,"end":950.0}
//! ```
//!
//! `colocation.json` maps each object to the devices considered co-located
//! with it; when the file is absent every device is co-located with every
//! other one.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RECORDINGS_FILE: &str = "recordings.jsonl";
pub const RUNS_FILE: &str = "runs.jsonl";
pub const COLOCATION_FILE: &str = "colocation.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SensorKind {
    #[serde(rename = "ACC")]
    Acc,
    #[serde(rename = "GYRO")]
    Gyro,
    #[serde(rename = "MAG")]
    Mag,
    #[serde(rename = "MIC_SPL")]
    MicSpl,
}

impl SensorKind {
    pub const ALL: [SensorKind; 4] = [
        SensorKind::Acc,
        SensorKind::Gyro,
        SensorKind::Mag,
        SensorKind::MicSpl,
    ];

    pub fn components(self) -> usize {
        match self {
            SensorKind::Acc | SensorKind::Gyro | SensorKind::Mag => 3,
            SensorKind::MicSpl => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SensorKind::Acc => "ACC",
            SensorKind::Gyro => "GYRO",
            SensorKind::Mag => "MAG",
            SensorKind::MicSpl => "MIC_SPL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for SensorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One timestamped multi-component stream from a single sensor of a device.
///
/// Samples are stored flat: `values[i * components .. (i + 1) * components]`
/// belongs to `times[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorRecording {
    pub device_id: String,
    pub kind: SensorKind,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SensorRecording {
    pub fn new(device_id: impl Into<String>, kind: SensorKind) -> Self {
        SensorRecording {
            device_id: device_id.into(),
            kind,
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sample(&self, i: usize) -> (f64, &[f64]) {
        let m = self.kind.components();
        (self.times[i], &self.values[i * m..(i + 1) * m])
    }

    pub fn push(&mut self, t: f64, v: &[f64]) {
        debug_assert_eq!(v.len(), self.kind.components());
        self.times.push(t);
        self.values.extend_from_slice(v);
    }

    /// Index range of samples with `lo <= t <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.times.partition_point(|&t| t < lo);
        let end = self.times.partition_point(|&t| t <= hi);
        start..end.max(start)
    }

    fn validate(&self) -> Result<()> {
        let m = self.kind.components();
        if self.values.len() != self.times.len() * m {
            return Err(Error::validation(format!(
                "{}/{}: expected {m} components per sample",
                self.device_id, self.kind
            )));
        }
        for w in self.times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::validation(format!(
                    "{}/{}: non-monotonic timestamps ({} then {})",
                    self.device_id, self.kind, w[0], w[1]
                )));
            }
        }
        if self.times.iter().chain(&self.values).any(|x| !x.is_finite()) {
            return Err(Error::validation(format!(
                "{}/{}: non-finite sample",
                self.device_id, self.kind
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContactKind {
    Open,
    Close,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactEvent {
    pub device_id: String,
    pub kind: ContactKind,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    None,
    ZeroEffort,
    Video,
    InPerson,
}

impl AttackKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttackKind::None => "none",
            AttackKind::ZeroEffort => "zero_effort",
            AttackKind::Video => "video",
            AttackKind::InPerson => "in_person",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    #[serde(rename = "run")]
    pub run_id: String,
    #[serde(rename = "user")]
    pub user_id: String,
    #[serde(rename = "attack")]
    pub attack: AttackKind,
    #[serde(rename = "victim", default, skip_serializing_if = "Option::is_none")]
    pub victim_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
}

impl RunMetadata {
    fn validate(&self) -> Result<()> {
        match (&self.attack, &self.victim_id) {
            (AttackKind::None, Some(_)) => Err(Error::validation(format!(
                "run {}: victim given for a non-attack run",
                self.run_id
            ))),
            (AttackKind::None, None) => Ok(()),
            (_, None) => Err(Error::validation(format!(
                "run {}: attack run without a victim",
                self.run_id
            ))),
            (_, Some(v)) if *v == self.user_id => Err(Error::validation(format!(
                "run {}: attacker and victim are both {}",
                self.run_id, v
            ))),
            _ => Ok(()),
        }?;
        match (self.start, self.end) {
            (Some(s), Some(e)) if !(s.is_finite() && e.is_finite() && s <= e) => Err(
                Error::validation(format!("run {}: invalid time span", self.run_id)),
            ),
            (Some(_), None) | (None, Some(_)) => Err(Error::validation(format!(
                "run {}: start and end must be given together",
                self.run_id
            ))),
            _ => Ok(()),
        }
    }

    fn contains(&self, t: f64) -> bool {
        match (self.start, self.end) {
            (Some(s), Some(e)) => s <= t && t <= e,
            _ => true,
        }
    }
}

/// Object id to the set of devices whose sensors are co-located with it.
pub type CoLocationMap = BTreeMap<String, BTreeSet<String>>;

/// One OPEN/CLOSE pair on an object, attributed to a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub object_id: String,
    pub t0: f64,
    pub t1: f64,
    pub run: usize,
}

/// Validated, immutable in-memory session.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub session_epoch: Option<String>,
    /// Sorted by (device, sensor kind).
    pub recordings: Vec<SensorRecording>,
    /// Sorted by (device, time).
    pub contacts: Vec<ContactEvent>,
    pub runs: Vec<RunMetadata>,
    pub colocation: CoLocationMap,
    interactions: Vec<Interaction>,
}

impl Dataset {
    /// Validates every invariant and pairs contact events into interactions.
    /// An empty `colocation` is replaced by [`default_colocation`].
    pub fn new(
        session_epoch: Option<String>,
        mut recordings: Vec<SensorRecording>,
        mut contacts: Vec<ContactEvent>,
        runs: Vec<RunMetadata>,
        colocation: CoLocationMap,
    ) -> Result<Self> {
        recordings.sort_by(|a, b| (&a.device_id, a.kind).cmp(&(&b.device_id, b.kind)));
        for w in recordings.windows(2) {
            if w[0].device_id == w[1].device_id && w[0].kind == w[1].kind {
                return Err(Error::validation(format!(
                    "duplicate stream {}/{}",
                    w[0].device_id, w[0].kind
                )));
            }
        }
        for rec in &recordings {
            rec.validate()?;
        }
        for c in &contacts {
            if !c.t.is_finite() {
                return Err(Error::validation(format!(
                    "{}: non-finite contact timestamp",
                    c.device_id
                )));
            }
        }
        contacts.sort_by(|a, b| a.device_id.cmp(&b.device_id).then(a.t.total_cmp(&b.t)));

        let mut seen = BTreeSet::new();
        for r in &runs {
            r.validate()?;
            if !seen.insert(r.run_id.as_str()) {
                return Err(Error::validation(format!("duplicate run id {}", r.run_id)));
            }
        }
        if runs.len() > 1 && runs.iter().any(|r| r.start.is_none()) {
            return Err(Error::validation(
                "runs need start/end spans when a session holds more than one run",
            ));
        }

        let mut dataset = Dataset {
            session_epoch,
            recordings,
            contacts,
            runs,
            colocation: CoLocationMap::new(),
            interactions: Vec::new(),
        };
        dataset.interactions = dataset.pair_contacts()?;

        let devices = dataset.devices();
        let colocation = if colocation.is_empty() {
            if devices.len() >= 2 {
                default_colocation(&dataset)?
            } else {
                CoLocationMap::new()
            }
        } else {
            colocation
        };
        for (object, others) in &colocation {
            if !devices.contains(object) {
                return Err(Error::validation(format!("unknown device reference {object}")));
            }
            for d in others {
                if d == object {
                    return Err(Error::validation(format!(
                        "object {object} is co-located with itself"
                    )));
                }
                if !devices.contains(d) {
                    return Err(Error::validation(format!("unknown device reference {d}")));
                }
            }
        }
        dataset.colocation = colocation;
        Ok(dataset)
    }

    fn pair_contacts(&self) -> Result<Vec<Interaction>> {
        let mut out = Vec::new();
        let mut open: Option<&ContactEvent> = None;
        let mut device: Option<&str> = None;
        for c in &self.contacts {
            if device != Some(c.device_id.as_str()) {
                if let Some(o) = open {
                    return Err(unmatched(o));
                }
                device = Some(&c.device_id);
            }
            match (c.kind, open) {
                (ContactKind::Open, None) => open = Some(c),
                (ContactKind::Close, Some(o)) => {
                    if !(c.t > o.t) {
                        return Err(unmatched(c));
                    }
                    let run = self.run_at(o.t).ok_or_else(|| {
                        Error::validation(format!(
                            "contact event on {} at t={} lies outside every run",
                            o.device_id, o.t
                        ))
                    })?;
                    out.push(Interaction {
                        object_id: o.device_id.clone(),
                        t0: o.t,
                        t1: c.t,
                        run,
                    });
                    open = None;
                }
                _ => return Err(unmatched(c)),
            }
        }
        if let Some(o) = open {
            return Err(unmatched(o));
        }
        Ok(out)
    }

    fn run_at(&self, t: f64) -> Option<usize> {
        let mut hits = self.runs.iter().enumerate().filter(|(_, r)| r.contains(t));
        let first = hits.next()?;
        if hits.next().is_some() {
            return None;
        }
        Some(first.0)
    }

    /// Every device that recorded samples or contact events, sorted.
    pub fn devices(&self) -> BTreeSet<String> {
        self.recordings
            .iter()
            .map(|r| r.device_id.clone())
            .chain(self.contacts.iter().map(|c| c.device_id.clone()))
            .collect()
    }

    /// Devices with at least one contact event, sorted.
    pub fn objects(&self) -> BTreeSet<String> {
        self.contacts.iter().map(|c| c.device_id.clone()).collect()
    }

    pub fn users(&self) -> BTreeSet<String> {
        self.runs.iter().map(|r| r.user_id.clone()).collect()
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn recordings_of<'a>(
        &'a self,
        device: &'a str,
    ) -> impl Iterator<Item = &'a SensorRecording> + 'a {
        let start = self.recordings.partition_point(|r| r.device_id.as_str() < device);
        self.recordings[start..]
            .iter()
            .take_while(move |r| r.device_id == device)
    }

    /// Sensor kinds a device carries, in canonical order.
    pub fn sensor_kinds(&self, device: &str) -> Vec<SensorKind> {
        self.recordings_of(device).map(|r| r.kind).collect()
    }

    pub fn run(&self, run_id: &str) -> Option<&RunMetadata> {
        self.runs.iter().find(|r| r.run_id == run_id)
    }
}

fn unmatched(c: &ContactEvent) -> Error {
    Error::validation(format!(
        "unmatched contact event: {:?} on {} at t={}",
        c.kind, c.device_id, c.t
    ))
}

/// Every device co-located with every other device.
pub fn default_colocation(dataset: &Dataset) -> Result<CoLocationMap> {
    let devices = dataset.devices();
    if devices.len() < 2 {
        return Err(Error::validation(
            "default co-location needs at least two devices",
        ));
    }
    Ok(devices
        .iter()
        .map(|d| {
            let others = devices.iter().filter(|o| *o != d).cloned().collect();
            (d.clone(), others)
        })
        .collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecordLine<'a> {
    #[serde(borrow, default)]
    device: Option<std::borrow::Cow<'a, str>>,
    #[serde(default)]
    sensor: Option<SensorKind>,
    #[serde(default)]
    event: Option<ContactKind>,
    #[serde(default)]
    t: Option<Option<f64>>,
    #[serde(default)]
    v: Option<Vec<Option<f64>>>,
    #[serde(default)]
    session_epoch: Option<String>,
    #[serde(default)]
    version: Option<u32>,
}

/// Replaces the non-JSON tokens `NaN`, `Infinity` and `-Infinity` outside of
/// strings with `null`, so that such lines are rejected as non-finite samples
/// rather than as syntax errors.
fn nullify_non_finite(line: &str) -> Option<String> {
    let mut out = String::with_capacity(line.len());
    let mut in_string = false;
    let mut escaped = false;
    let mut changed = false;
    let mut rest = line;
    while let Some(c) = rest.chars().next() {
        if !in_string {
            if let Some(tok) = ["-Infinity", "Infinity", "NaN"]
                .into_iter()
                .find(|tok| rest.starts_with(tok))
            {
                out.push_str("null");
                rest = &rest[tok.len()..];
                changed = true;
                continue;
            }
            in_string = c == '"';
        } else if escaped {
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == '"' {
            in_string = false;
        }
        out.push(c);
        rest = &rest[c.len_utf8()..];
    }
    changed.then_some(out)
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub struct ParsedRecordings {
    pub session_epoch: Option<String>,
    pub recordings: Vec<SensorRecording>,
    pub contacts: Vec<ContactEvent>,
}

pub fn read_recordings(path: &Path) -> Result<ParsedRecordings> {
    let reader = open(path)?;
    let mut streams: Vec<SensorRecording> = Vec::new();
    let mut index: HashMap<(String, SensorKind), usize> = HashMap::new();
    let mut last: Option<(usize, SensorKind, usize)> = None;
    let mut contacts = Vec::new();
    let mut epoch = None;
    let mut buf = Vec::new();

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fixed;
        let rec: RawRecordLine = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => match nullify_non_finite(&line) {
                Some(f) => {
                    fixed = f;
                    serde_json::from_str(&fixed).map_err(|e| parse_err(path, lineno, e.to_string()))?
                }
                None => return Err(parse_err(path, lineno, e.to_string())),
            },
        };

        if rec.session_epoch.is_some() || rec.version.is_some() {
            if lineno != 1 || rec.device.is_some() {
                return Err(parse_err(path, lineno, "header must be the first line"));
            }
            epoch = rec.session_epoch;
            continue;
        }
        let device = rec
            .device
            .ok_or_else(|| parse_err(path, lineno, "missing \"device\""))?;
        let t = match rec.t {
            Some(Some(t)) if t.is_finite() => t,
            Some(_) => return Err(parse_err(path, lineno, "non-finite timestamp")),
            None => return Err(parse_err(path, lineno, "missing \"t\"")),
        };
        match (rec.sensor, rec.event, rec.v) {
            (Some(kind), None, Some(v)) => {
                if v.len() != kind.components() {
                    return Err(parse_err(
                        path,
                        lineno,
                        format!(
                            "{kind} expects {} components, got {}",
                            kind.components(),
                            v.len()
                        ),
                    ));
                }
                buf.clear();
                for x in v {
                    match x {
                        Some(x) if x.is_finite() => buf.push(x),
                        _ => return Err(parse_err(path, lineno, "non-finite sample")),
                    }
                }
                let idx = match last {
                    Some((idx, k, _)) if k == kind && streams[idx].device_id == *device => idx,
                    _ => *index
                        .entry((device.to_string(), kind))
                        .or_insert_with(|| {
                            streams.push(SensorRecording::new(device.to_string(), kind));
                            streams.len() - 1
                        }),
                };
                let stream = &mut streams[idx];
                if let Some(&prev) = stream.times.last() {
                    if !(t > prev) {
                        return Err(parse_err(
                            path,
                            lineno,
                            format!("non-monotonic timestamps on {device}/{kind}: {t} after {prev}"),
                        ));
                    }
                }
                stream.push(t, &buf);
                last = Some((idx, kind, lineno));
            }
            (None, Some(kind), None) => contacts.push(ContactEvent {
                device_id: device.to_string(),
                kind,
                t,
            }),
            _ => {
                return Err(parse_err(
                    path,
                    lineno,
                    "expected either a sample (sensor, v) or a contact event (event)",
                ))
            }
        }
    }
    Ok(ParsedRecordings {
        session_epoch: epoch,
        recordings: streams,
        contacts,
    })
}

pub fn read_runs(path: &Path) -> Result<Vec<RunMetadata>> {
    let reader = open(path)?;
    let mut runs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let run: RunMetadata = serde_json::from_str(&line)
            .map_err(|e| parse_err(path, lineno + 1, e.to_string()))?;
        run.validate()
            .map_err(|e| parse_err(path, lineno + 1, e.to_string()))?;
        runs.push(run);
    }
    Ok(runs)
}

pub fn read_colocation(path: &Path) -> Result<CoLocationMap> {
    let reader = open(path)?;
    serde_json::from_reader(reader).map_err(|e| parse_err(path, e.line(), e.to_string()))
}

/// Loads and validates a session. A missing `colocation_path` (or a path that
/// does not exist) falls back to [`default_colocation`].
pub fn load_dataset(
    recordings_path: &Path,
    metadata_path: &Path,
    colocation_path: Option<&Path>,
) -> Result<Dataset> {
    let parsed = read_recordings(recordings_path)?;
    let runs = read_runs(metadata_path)?;
    let colocation = match colocation_path {
        Some(p) if p.exists() => read_colocation(p)?,
        _ => CoLocationMap::new(),
    };
    Dataset::new(
        parsed.session_epoch,
        parsed.recordings,
        parsed.contacts,
        runs,
        colocation,
    )
}

/// Loads `recordings.jsonl`, `runs.jsonl` and (if present) `colocation.json`
/// from one directory.
pub fn load_dir(dir: &Path) -> Result<Dataset> {
    load_dataset(
        &dir.join(RECORDINGS_FILE),
        &dir.join(RUNS_FILE),
        Some(&dir.join(COLOCATION_FILE)),
    )
}

#[derive(Serialize)]
struct SampleLine<'a> {
    device: &'a str,
    sensor: SensorKind,
    t: f64,
    v: &'a [f64],
}

#[derive(Serialize)]
struct EventLine<'a> {
    device: &'a str,
    event: ContactKind,
    t: f64,
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Cursor {
    // Min-heap on (time, stream order); contacts sort before samples at equal t.
    t: std::cmp::Reverse<OrdF64>,
    source: std::cmp::Reverse<usize>,
    pos: usize,
}

#[derive(PartialEq, PartialOrd)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Writes the session as `recordings.jsonl` records merged in time order.
pub fn write_recordings<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    let io = |e| Error::io("<recordings>", e);
    if let Some(epoch) = &dataset.session_epoch {
        serde_json::to_writer(
            &mut out,
            &serde_json::json!({"session_epoch": epoch, "version": 1}),
        )?;
        out.write_all(b"\n").map_err(io)?;
    }
    // Source 0 is the contact list; source i + 1 is recording i.
    let mut heap = BinaryHeap::new();
    let time_of = |source: usize, pos: usize| -> Option<f64> {
        if source == 0 {
            dataset.contacts.get(pos).map(|c| c.t)
        } else {
            dataset.recordings[source - 1].times.get(pos).copied()
        }
    };
    let mut contacts_sorted: Vec<usize> = (0..dataset.contacts.len()).collect();
    contacts_sorted.sort_by(|&a, &b| {
        dataset.contacts[a]
            .t
            .total_cmp(&dataset.contacts[b].t)
            .then(a.cmp(&b))
    });
    let contact_time = |pos: usize| contacts_sorted.get(pos).map(|&i| dataset.contacts[i].t);
    for source in 0..=dataset.recordings.len() {
        let t = if source == 0 {
            contact_time(0)
        } else {
            time_of(source, 0)
        };
        if let Some(t) = t {
            heap.push(Cursor {
                t: std::cmp::Reverse(OrdF64(t)),
                source: std::cmp::Reverse(source),
                pos: 0,
            });
        }
    }
    while let Some(cur) = heap.pop() {
        let source = cur.source.0;
        let next_t = if source == 0 {
            let c = &dataset.contacts[contacts_sorted[cur.pos]];
            serde_json::to_writer(
                &mut out,
                &EventLine {
                    device: &c.device_id,
                    event: c.kind,
                    t: c.t,
                },
            )?;
            contact_time(cur.pos + 1)
        } else {
            let rec = &dataset.recordings[source - 1];
            let (t, v) = rec.sample(cur.pos);
            serde_json::to_writer(
                &mut out,
                &SampleLine {
                    device: &rec.device_id,
                    sensor: rec.kind,
                    t,
                    v,
                },
            )?;
            time_of(source, cur.pos + 1)
        };
        out.write_all(b"\n").map_err(io)?;
        if let Some(t) = next_t {
            heap.push(Cursor {
                t: std::cmp::Reverse(OrdF64(t)),
                source: cur.source,
                pos: cur.pos + 1,
            });
        }
    }
    out.flush().map_err(io)?;
    Ok(())
}

pub fn write_runs<W: Write>(runs: &[RunMetadata], out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    for r in runs {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| Error::io("<runs>", e))?;
    }
    out.flush().map_err(|e| Error::io("<runs>", e))?;
    Ok(())
}

/// Writes the three session files into `dir`.
pub fn write_dir(dataset: &Dataset, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let create = |name: &str| -> Result<(File, PathBuf)> {
        let p = dir.join(name);
        File::create(&p).map(|f| (f, p.clone())).map_err(|e| Error::io(p, e))
    };
    let (f, _) = create(RECORDINGS_FILE)?;
    write_recordings(dataset, f)?;
    let (f, _) = create(RUNS_FILE)?;
    write_runs(&dataset.runs, f)?;
    let (f, p) = create(COLOCATION_FILE)?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, &dataset.colocation)?;
    w.write_all(b"\n").map_err(|e| Error::io(&p, e))?;
    w.flush().map_err(|e| Error::io(&p, e))?;
    Ok(())
}
