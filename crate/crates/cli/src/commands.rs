use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use interact_auth::evaluation::{
    ensemble_study, evaluate_bank, write_frr_csv, EvaluationReport, DEFAULT_FAR_TARGETS, DEFAULT_MAX_ENSEMBLE,
};
use interact_auth::experiment::Experiment;
use interact_auth::features::{write_csv, Configuration, FeatureTable};
use interact_auth::fusion::{
    build_configuration, build_with_folds, out_of_fold_scores, train_stacking, EnsembleKind, EnsembleModel, MinMax,
    RunFolds,
};
use interact_auth::ingestion::{load_dir, AttackKind, Dataset};
use interact_auth::learners::{ModelFamily, TrainedBaseModel, Tuning};
use interact_auth::segmentation::segment;
use interact_auth::selection::{rmi_report, write_rmi_csv};
use interact_auth::synth::{self, SynthConfig};
use interact_auth::Result;
use serde::Serialize;

use crate::manifest::{hash_dir, read, Outputs};
use crate::{validation, Cli, Command};

pub const DATA_DIR: &str = "data";
pub const MODEL_FORMAT: &str = "interact-auth-model";
pub const ENSEMBLE_FORMAT: &str = "interact-auth-ensemble";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 13)]
    pub users: usize,
    #[arg(long, default_value_t = 8)]
    pub objects: usize,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Target of the mimicry attacks.
    #[arg(long, default_value = "U1")]
    pub victim: String,
    /// Generate zero-effort runs only.
    #[arg(long)]
    pub no_attacks: bool,
    #[arg(long, default_value_t = 5)]
    pub attack_runs: usize,
    #[arg(long, default_value_t = 0.7)]
    pub alpha_video: f64,
    #[arg(long, default_value_t = 0.6)]
    pub alpha_in_person: f64,
    #[arg(long, default_value_t = 0.05)]
    pub attack_jitter: f64,
    #[arg(long, default_value_t = 1.0)]
    pub spread: f64,
    /// Output directory; defaults to `<run-dir>/data`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    /// Session directory; defaults to `<run-dir>/data`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output directory; defaults to `<run-dir>/<command>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FeaturesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub io: DataArgs,
    #[arg(long)]
    pub config: Configuration,
    /// Only this object.
    #[arg(long)]
    pub object: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct RmiArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub io: DataArgs,
    #[arg(long)]
    pub config: Configuration,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub io: DataArgs,
    #[arg(long)]
    pub victim: String,
    #[arg(long)]
    pub config: Configuration,
    #[arg(long, default_value = "forest")]
    pub family: ModelFamily,
    /// `grid` sweeps the hyperparameter space; `fixed` uses one point.
    #[arg(long, default_value = "grid")]
    pub tuning: Tuning,
    /// Root of every random choice; required for reproducibility.
    #[arg(long)]
    pub seed: u64,
}

impl ModelArgs {
    fn tag(&self) -> String {
        format!("{}-{}-{}", self.victim, self.config, self.family)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Also build an ensemble of this kind.
    #[arg(long)]
    pub ensemble: Option<EnsembleKind>,
    /// Ensemble members (object ids); defaults to every trained object.
    #[arg(long, value_delimiter = ',')]
    pub members: Vec<String>,
    /// FAR used to calibrate voting thresholds.
    #[arg(long, default_value_t = 0.01)]
    pub far: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_FAR_TARGETS)]
    pub far: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct EnsembleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_FAR_TARGETS)]
    pub far: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values = ["voting", "stacking"])]
    pub kinds: Vec<EnsembleKind>,
    #[arg(long, default_value_t = DEFAULT_MAX_ENSEMBLE)]
    pub max_size: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Report files; defaults to every `report.json` under
    /// `<run-dir>/evaluate` and `<run-dir>/ensemble`.
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(a) => synth_cmd(cli, a),
        Command::Ingest(a) => ingest(cli, a),
        Command::Features(a) => features(cli, a),
        Command::Rmi(a) => rmi(cli, a),
        Command::Train(a) => train(cli, a),
        Command::Evaluate(a) => evaluate(cli, a),
        Command::Ensemble(a) => ensemble(cli, a),
        Command::Report(a) => report(cli, a),
    }
}

fn data_dir(cli: &Cli, io: &DataArgs) -> PathBuf {
    io.data.clone().unwrap_or_else(|| cli.run_dir.join(DATA_DIR))
}

fn out_dir(cli: &Cli, io: &DataArgs, command: &str, tag: Option<String>) -> PathBuf {
    io.out.clone().unwrap_or_else(|| {
        let base = cli.run_dir.join(command);
        match tag {
            Some(t) => base.join(t),
            None => base,
        }
    })
}

fn load(dir: &Path) -> Result<(Dataset, BTreeMap<String, String>)> {
    let dataset = load_dir(dir)?;
    Ok((dataset, hash_dir(dir)?))
}

fn check_targets(targets: &[f64]) -> Result<()> {
    if targets.is_empty() || targets.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(validation(format!("FAR targets must lie in (0, 1], got {targets:?}")));
    }
    Ok(())
}

fn synth_cmd(cli: &Cli, a: &SynthArgs) -> Result<()> {
    let config = SynthConfig {
        seed: a.seed,
        users: a.users,
        objects: a.objects,
        runs: a.runs,
        victim: (!a.no_attacks).then(|| a.victim.clone()),
        attack_runs: a.attack_runs,
        alpha_video: a.alpha_video,
        alpha_in_person: a.alpha_in_person,
        attack_jitter: a.attack_jitter,
        spread: a.spread,
        ..SynthConfig::default()
    };
    let session = synth::generate(&config)?;
    let dir = a.out.clone().unwrap_or_else(|| cli.run_dir.join(DATA_DIR));
    synth::write_session(&session, &dir)?;
    let mut out = Outputs::create(dir.clone())?;
    for (name, _) in hash_dir(&dir)? {
        if name != crate::manifest::MANIFEST_FILE {
            out.track(&name);
        }
    }
    log::info!(
        "wrote {} runs, {} interactions to {}",
        session.dataset.runs.len(),
        session.dataset.interactions().len(),
        dir.display()
    );
    out.finish("synth", a, Some(a.seed), BTreeMap::new())
}

#[derive(Serialize)]
struct IngestSummary {
    devices: usize,
    objects: Vec<String>,
    users: Vec<String>,
    runs: usize,
    attack_runs: BTreeMap<AttackKind, usize>,
    interactions: usize,
    segments: usize,
    dropped: Vec<interact_auth::segmentation::DroppedSegment>,
}

fn ingest(cli: &Cli, a: &DataArgs) -> Result<()> {
    let dir = data_dir(cli, a);
    let (dataset, inputs) = load(&dir)?;
    let seg = segment(&dataset);
    let mut attack_runs = BTreeMap::new();
    for r in &dataset.runs {
        *attack_runs.entry(r.attack).or_insert(0) += 1;
    }
    let summary = IngestSummary {
        devices: dataset.devices().len(),
        objects: dataset.objects().into_iter().collect(),
        users: dataset.users().into_iter().collect(),
        runs: dataset.runs.len(),
        attack_runs,
        interactions: dataset.interactions().len(),
        segments: seg.segments.len(),
        dropped: seg.dropped,
    };
    let mut out = Outputs::create(out_dir(cli, a, "ingest", None))?;
    out.write_json("summary.json", &summary)?;
    out.finish("ingest", &resolved(a, &dir), None, inputs)
}

/// Arguments with the data directory filled in, for the manifest.
fn resolved<T: Serialize>(args: &T, data: &Path) -> serde_json::Value {
    let mut v = serde_json::to_value(args).unwrap_or(serde_json::Value::Null);
    if let Some(m) = v.as_object_mut() {
        m.insert("data".into(), serde_json::Value::String(data.display().to_string()));
        m.remove("out");
    }
    v
}

fn features(cli: &Cli, a: &FeaturesArgs) -> Result<()> {
    let dir = data_dir(cli, &a.io);
    let (dataset, inputs) = load(&dir)?;
    let exp = experiment_for(&dataset, a.object.as_deref())?;
    let mut out = Outputs::create(out_dir(cli, &a.io, "features", Some(a.config.to_string())))?;
    for object in exp.objects() {
        let Some(table) = FeatureTable::build(&object, a.config, &exp.segments, &exp.features)? else {
            log::warn!("{object}: no {} sources", a.config);
            continue;
        };
        let mut buf = Vec::new();
        write_csv(&table, &exp.segments, |s| s.attack.as_str().to_string(), &mut buf)?;
        out.write(&format!("{object}.csv"), &buf)?;
    }
    out.finish("features", &resolved(a, &dir), None, inputs)
}

fn experiment_for(dataset: &Dataset, object: Option<&str>) -> Result<Experiment> {
    let seg = segment(dataset);
    let mut segments = seg.segments;
    if let Some(o) = object {
        segments.retain(|s| s.object_id == o);
        if segments.is_empty() {
            return Err(validation(format!("no segments for object {o}")));
        }
    }
    Ok(Experiment::from_segments(segments, seg.dropped))
}

fn rmi(cli: &Cli, a: &RmiArgs) -> Result<()> {
    let dir = data_dir(cli, &a.io);
    let (dataset, inputs) = load(&dir)?;
    let exp = Experiment::from_dataset(&dataset);
    let report = rmi_report(&exp.segments, &exp.features, a.config)?;
    let mut out = Outputs::create(out_dir(cli, &a.io, "rmi", Some(a.config.to_string())))?;
    let mut csv = Vec::new();
    write_rmi_csv(&report, &mut csv)?;
    out.write("rmi_report.csv", &csv)?;
    out.write_json("rmi_report.json", &report)?;
    out.finish("rmi", &resolved(a, &dir), None, inputs)
}

#[derive(Serialize)]
struct ModelBundle<'a> {
    format: &'static str,
    version: u32,
    victim_id: &'a str,
    model: &'a TrainedBaseModel,
    normalization: MinMax,
}

#[derive(Serialize)]
struct EnsembleBundle<'a> {
    format: &'static str,
    version: u32,
    victim_id: &'a str,
    config: Configuration,
    family: ModelFamily,
    /// Model bundle of each member, relative to this file.
    member_files: Vec<String>,
    ensemble: &'a EnsembleModel,
}

fn train(cli: &Cli, a: &TrainArgs) -> Result<()> {
    let m = &a.model;
    check_targets(&[a.far])?;
    let dir = data_dir(cli, &m.io);
    let (dataset, inputs) = load(&dir)?;
    let exp = Experiment::from_dataset(&dataset);
    if !exp.users().contains(&m.victim) {
        return Err(validation(format!("unknown victim {}", m.victim)));
    }
    let folds = RunFolds::all_training(&exp, &m.victim);
    let bank = build_with_folds(&exp, &m.victim, m.config, m.family, m.tuning, m.seed, folds)?;
    let mut out = Outputs::create(out_dir(cli, &m.io, "train", Some(m.tag())))?;
    for (object, ob) in &bank.objects {
        let fm = &ob.folds[0];
        let bundle = ModelBundle {
            format: MODEL_FORMAT,
            version: FORMAT_VERSION,
            victim_id: &m.victim,
            model: &fm.model,
            normalization: fm.normalization,
        };
        out.write_json(&format!("models/{object}.json"), &bundle)?;
    }
    if let Some(kind) = a.ensemble {
        let members: Vec<String> = if a.members.is_empty() {
            bank.objects.keys().cloned().collect()
        } else {
            a.members.clone()
        };
        for id in &members {
            if !bank.objects.contains_key(id) {
                return Err(validation(format!("ensemble member {id} has no trained model")));
            }
        }
        let model = match kind {
            EnsembleKind::Voting => {
                let refs: Vec<&TrainedBaseModel> = members.iter().map(|id| &bank.objects[id].folds[0].model).collect();
                EnsembleModel::voting(&refs, a.far)?
            }
            EnsembleKind::Stacking => {
                let oof = out_of_fold_scores(&bank)?;
                let ids: Vec<&str> = members.iter().map(String::as_str).collect();
                let (cols, y) = oof.design(&ids, 0)?;
                train_stacking(&cols, &y)?
            }
        };
        let bundle = EnsembleBundle {
            format: ENSEMBLE_FORMAT,
            version: FORMAT_VERSION,
            victim_id: &m.victim,
            config: m.config,
            family: m.family,
            member_files: model.members.iter().map(|id| format!("models/{id}.json")).collect(),
            ensemble: &model,
        };
        out.write_json("ensemble.json", &bundle)?;
    }
    out.finish("train", &resolved(a, &dir), Some(m.seed), inputs)
}

fn evaluate(cli: &Cli, a: &EvaluateArgs) -> Result<()> {
    let m = &a.model;
    check_targets(&a.far)?;
    let dir = data_dir(cli, &m.io);
    let (dataset, inputs) = load(&dir)?;
    let exp = Experiment::from_dataset(&dataset);
    let bank = build_configuration(&exp, &m.victim, m.config, m.family, m.tuning, m.seed)?;
    let ev = evaluate_bank(&bank, &a.far)?;
    let mut out = Outputs::create(out_dir(cli, &m.io, "evaluate", Some(m.tag())))?;
    write_report(&mut out, &ev.report)?;
    for (object, curves) in &ev.curves {
        for (kind, curve) in curves {
            let mut buf = Vec::new();
            curve.write_csv(&mut buf)?;
            out.write(&format!("roc_points/{object}_{}.csv", kind.as_str()), &buf)?;
        }
    }
    out.finish("evaluate", &resolved(a, &dir), Some(m.seed), inputs)
}

fn write_report(out: &mut Outputs, report: &EvaluationReport) -> Result<()> {
    out.write("report.json", report.to_json()?.as_bytes())?;
    let mut csv = Vec::new();
    write_frr_csv(std::slice::from_ref(report), &mut csv)?;
    out.write("frr_at_far.csv", &csv)
}

fn ensemble(cli: &Cli, a: &EnsembleArgs) -> Result<()> {
    let m = &a.model;
    check_targets(&a.far)?;
    if a.kinds.is_empty() {
        return Err(validation("no ensemble kinds requested"));
    }
    let dir = data_dir(cli, &m.io);
    let (dataset, inputs) = load(&dir)?;
    let exp = Experiment::from_dataset(&dataset);
    let bank = build_configuration(&exp, &m.victim, m.config, m.family, m.tuning, m.seed)?;
    let mut report = evaluate_bank(&bank, &a.far)?.report;
    let study = ensemble_study(&bank, &a.kinds, a.max_size, &a.far)?;
    let mut out = Outputs::create(out_dir(cli, &m.io, "ensemble", Some(m.tag())))?;
    out.write("ensemble_frr.csv", &ensemble_csv(&[&study], &a.far)?)?;
    report.ensembles = Some(study);
    write_report(&mut out, &report)?;
    out.finish("ensemble", &resolved(a, &dir), Some(m.seed), inputs)
}

/// `kind,size,attack,far,frr,subsets,failed`, averaged over the studies.
fn ensemble_csv(studies: &[&interact_auth::evaluation::EnsembleStudy], targets: &[f64]) -> Result<Vec<u8>> {
    let mut cells: BTreeMap<(EnsembleKind, usize, AttackKind, usize), (f64, usize, usize, usize)> = BTreeMap::new();
    for s in studies {
        for size in &s.summary {
            for (&attack, means) in &size.mean {
                for mean in means {
                    let Some(ti) = targets.iter().position(|&t| t == mean.far_target) else {
                        continue;
                    };
                    let c = cells.entry((size.kind, size.size, attack, ti)).or_insert((0.0, 0, 0, 0));
                    if mean.count > 0 {
                        c.0 += mean.frr;
                        c.1 += 1;
                    }
                    c.2 += size.subsets;
                    c.3 += size.failed;
                }
            }
        }
    }
    let mut buf = Vec::new();
    let io = |e| interact_auth::Error::Io { path: "<ensemble_frr.csv>".into(), source: e };
    writeln!(buf, "kind,size,attack,far,frr,subsets,failed").map_err(io)?;
    for ((kind, size, attack, ti), (sum, n, subsets, failed)) in cells {
        let frr = if n > 0 { format!("{:.4}", sum / n as f64) } else { "NA".into() };
        writeln!(buf, "{},{size},{},{},{frr},{subsets},{failed}", kind.as_str(), attack.as_str(), targets[ti])
            .map_err(io)?;
    }
    Ok(buf)
}

fn find_reports(cli: &Cli) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for command in ["evaluate", "ensemble"] {
        let base = cli.run_dir.join(command);
        let Ok(entries) = std::fs::read_dir(&base) else { continue };
        for e in entries.flatten() {
            let p = e.path().join("report.json");
            if p.is_file() {
                found.push(p);
            }
        }
    }
    found.sort();
    Ok(found)
}

fn report(cli: &Cli, a: &ReportArgs) -> Result<()> {
    let paths = if a.inputs.is_empty() { find_reports(cli)? } else { a.inputs.clone() };
    if paths.is_empty() {
        return Err(validation("no report.json files to aggregate"));
    }
    let mut inputs = BTreeMap::new();
    let mut reports = Vec::new();
    for p in &paths {
        let bytes = read(p)?;
        inputs.insert(p.display().to_string(), crate::manifest::sha256_hex(&bytes));
        let r: EvaluationReport = serde_json::from_slice(&bytes)?;
        reports.push(r);
    }
    let mut out = Outputs::create(a.out.clone().unwrap_or_else(|| cli.run_dir.join("report")))?;
    let mut csv = Vec::new();
    write_frr_csv(&reports, &mut csv)?;
    out.write("frr_at_far.csv", &csv)?;
    let studies: Vec<_> = reports.iter().filter_map(|r| r.ensembles.as_ref()).collect();
    if !studies.is_empty() {
        let mut targets: Vec<f64> = reports.iter().flat_map(|r| r.far_targets.iter().copied()).collect();
        targets.sort_by(f64::total_cmp);
        targets.dedup();
        out.write("ensemble_frr.csv", &ensemble_csv(&studies, &targets)?)?;
    }
    let summary: Vec<_> = reports
        .iter()
        .map(|r| {
            serde_json::json!({
                "victim_id": r.victim_id,
                "config": r.config,
                "family": r.family,
                "seed": r.seed,
                "average": r.average,
            })
        })
        .collect();
    out.write_json("summary.json", &summary)?;
    out.finish("report", a, None, inputs)
}
