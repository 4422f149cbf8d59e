//! Biometric error rates per object under zero-effort and mimicry attacks,
//! and the ensemble-subset study.
//!
//! Outer folds are assigned per run. Genuine and impostor test scores are
//! pooled across folds into one curve; attack segments are scored by every
//! fold model and pooled. Each fold model's scores are min-max normalized by
//! its own training-score range before pooling.

pub mod metrics;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use metrics::{frr_at_far, roc, RocCurve, RocPoint};

use crate::error::{Error, Result};
use crate::experiment::Experiment;
use crate::features::Configuration;
use crate::fusion::{
    build_configuration, out_of_fold_scores, train_stacking, ConfigurationBank, Decision, EnsembleKind,
    EnsembleModel, ObjectBank, OutOfFold, RowRole, Slot,
};
use crate::ingestion::AttackKind;
use crate::learners::{ModelFamily, ModelParams, Tuning};
use crate::selection::RmiReport;

pub const DEFAULT_FAR_TARGETS: [f64; 2] = [0.01, 0.10];
pub const DEFAULT_MAX_ENSEMBLE: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrrAtFar {
    pub far_target: f64,
    pub frr: f64,
    /// FAR actually achieved at the chosen threshold.
    pub far: f64,
    /// `None` when only rejecting everything meets the target.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub genuine: usize,
    pub impostor: usize,
    pub points: Vec<FrrAtFar>,
}

impl CurveSummary {
    pub fn frr(&self, far_target: f64) -> Option<f64> {
        self.points.iter().find(|p| p.far_target == far_target).map(|p| p.frr)
    }
}

pub fn summarize(curve: &RocCurve, genuine: usize, impostor: usize, targets: &[f64]) -> Result<CurveSummary> {
    let points = targets
        .iter()
        .map(|&t| {
            let p = curve.operating_point(t)?;
            Ok(FrrAtFar {
                far_target: t,
                frr: p.frr,
                far: p.far,
                threshold: p.threshold.is_finite().then_some(p.threshold),
            })
        })
        .collect::<Result<_>>()?;
    Ok(CurveSummary {
        genuine,
        impostor,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectResult {
    pub object_id: String,
    /// Hyperparameters chosen in each outer fold.
    pub params: Vec<ModelParams>,
    /// Keyed by the impostor population; `zero_effort` is always present.
    pub attacks: BTreeMap<AttackKind, CurveSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFrr {
    pub far_target: f64,
    pub frr: f64,
    /// Number of values averaged.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardVotePoint {
    pub far_target: f64,
    pub far: f64,
    pub frr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetResult {
    pub kind: EnsembleKind,
    pub members: Vec<String>,
    /// Mean-score (voting) or meta-probability (stacking) curve summaries.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attacks: BTreeMap<AttackKind, CurveSummary>,
    /// Hard-vote operating points with member thresholds calibrated per target.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hard_vote: Vec<HardVotePoint>,
    /// Slots where some but not all members have a segment.
    pub dropped_slots: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub kind: EnsembleKind,
    pub size: usize,
    pub subsets: usize,
    pub failed: usize,
    pub mean: BTreeMap<AttackKind, Vec<MeanFrr>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStudy {
    pub max_size: usize,
    pub summary: Vec<SizeSummary>,
    pub subsets: Vec<SubsetResult>,
}

impl EnsembleStudy {
    pub fn mean_frr(&self, kind: EnsembleKind, size: usize, attack: AttackKind, far_target: f64) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.kind == kind && s.size == size)?
            .mean
            .get(&attack)?
            .iter()
            .find(|m| m.far_target == far_target)
            .map(|m| m.frr)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub victim_id: String,
    pub config: Configuration,
    pub family: ModelFamily,
    pub tuning: Tuning,
    pub seed: u64,
    pub folds: usize,
    pub far_targets: Vec<f64>,
    pub objects: Vec<ObjectResult>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub skipped_objects: BTreeMap<String, String>,
    /// Mean over objects, per impostor population.
    pub average: BTreeMap<AttackKind, Vec<MeanFrr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensembles: Option<EnsembleStudy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rmi: Option<RmiReport>,
}

impl EvaluationReport {
    pub fn object(&self, object_id: &str) -> Option<&ObjectResult> {
        self.objects.iter().find(|o| o.object_id == object_id)
    }

    pub fn mean_frr(&self, attack: AttackKind, far_target: f64) -> Option<f64> {
        self.average
            .get(&attack)?
            .iter()
            .find(|m| m.far_target == far_target)
            .map(|m| m.frr)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Report plus the pooled curves behind it.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: EvaluationReport,
    /// object -> impostor population -> curve.
    pub curves: BTreeMap<String, BTreeMap<AttackKind, RocCurve>>,
    pub bank: ConfigurationBank,
}

/// Raw scores of every fold model on the rows it is evaluated on; NaN
/// elsewhere. Indexed `[fold][row]`.
fn score_cache(ob: &ObjectBank) -> Vec<Vec<f64>> {
    (0..ob.folds.len())
        .into_par_iter()
        .map(|f| {
            (0..ob.roles.len())
                .map(|r| match ob.roles[r] {
                    RowRole::Pool { fold, .. } if fold == f => ob.raw_score(f, r),
                    RowRole::Attack(_) => ob.raw_score(f, r),
                    _ => f64::NAN,
                })
                .collect()
        })
        .collect()
}

fn validate_targets(targets: &[f64]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::validation("at least one FAR target is required"));
    }
    if let Some(t) = targets.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::validation(format!("FAR target {t} outside (0, 1]")));
    }
    Ok(())
}

/// Genuine scores and impostor scores per population, for one member set.
/// `score(fold, rows)` combines the members' rows of one slot.
struct Pools {
    genuine: Vec<f64>,
    impostor: BTreeMap<AttackKind, Vec<f64>>,
    dropped: usize,
}

/// Slots aligned across `members`. Zero-effort test slots are scored by
/// their fold's model, attack slots by every fold model.
fn pooled_scores(
    members: &[&ObjectBank],
    k: usize,
    mut score: impl FnMut(usize, &[usize]) -> Result<f64>,
) -> Result<Pools> {
    let index: Vec<BTreeMap<&Slot, usize>> = members
        .iter()
        .map(|ob| ob.slots.iter().enumerate().map(|(r, s)| (s, r)).collect())
        .collect();
    let mut all: BTreeMap<&Slot, usize> = BTreeMap::new();
    for ix in &index {
        for s in ix.keys() {
            *all.entry(s).or_default() += 1;
        }
    }
    let mut pools = Pools {
        genuine: Vec::new(),
        impostor: BTreeMap::from([(AttackKind::ZeroEffort, Vec::new())]),
        dropped: 0,
    };
    let lead = members[0];
    for (slot, count) in all {
        if count != members.len() {
            pools.dropped += 1;
            continue;
        }
        let rows: Vec<usize> = index.iter().map(|ix| ix[slot]).collect();
        match lead.roles[rows[0]] {
            RowRole::Pool { fold, victim } => {
                let s = score(fold, &rows)?;
                if victim {
                    pools.genuine.push(s);
                } else {
                    pools.impostor.entry(AttackKind::ZeroEffort).or_default().push(s);
                }
            }
            RowRole::Attack(kind) => {
                for f in 0..k {
                    let s = score(f, &rows)?;
                    pools.impostor.entry(kind).or_default().push(s);
                }
            }
            RowRole::Excluded => {}
        }
    }
    Ok(pools)
}

fn curves_from(pools: &Pools, targets: &[f64]) -> Result<(BTreeMap<AttackKind, CurveSummary>, BTreeMap<AttackKind, RocCurve>)> {
    let mut summaries = BTreeMap::new();
    let mut curves = BTreeMap::new();
    for (&kind, imp) in &pools.impostor {
        if imp.is_empty() {
            continue;
        }
        let c = roc(&pools.genuine, imp)?;
        summaries.insert(kind, summarize(&c, pools.genuine.len(), imp.len(), targets)?);
        curves.insert(kind, c);
    }
    Ok((summaries, curves))
}

fn average_frr<'a>(results: impl Iterator<Item = &'a BTreeMap<AttackKind, CurveSummary>>, targets: &[f64]) -> BTreeMap<AttackKind, Vec<MeanFrr>> {
    let mut sums: BTreeMap<AttackKind, Vec<(f64, usize)>> = BTreeMap::new();
    for attacks in results {
        for (&kind, summary) in attacks {
            let acc = sums.entry(kind).or_insert_with(|| vec![(0.0, 0); targets.len()]);
            for (i, &t) in targets.iter().enumerate() {
                if let Some(v) = summary.frr(t) {
                    acc[i].0 += v;
                    acc[i].1 += 1;
                }
            }
        }
    }
    sums.into_iter()
        .map(|(kind, acc)| {
            let means = targets
                .iter()
                .zip(acc)
                .map(|(&t, (s, n))| MeanFrr {
                    far_target: t,
                    frr: if n > 0 { s / n as f64 } else { f64::NAN },
                    count: n,
                })
                .collect();
            (kind, means)
        })
        .collect()
}

/// Per-object curves and averages for a trained bank.
pub fn evaluate_bank(bank: &ConfigurationBank, targets: &[f64]) -> Result<Evaluation> {
    validate_targets(targets)?;
    let caches: BTreeMap<&str, Vec<Vec<f64>>> = bank
        .objects
        .values()
        .map(|ob| (ob.object_id(), score_cache(ob)))
        .collect();
    let mut objects = Vec::new();
    let mut curves = BTreeMap::new();
    for ob in bank.objects.values() {
        let cache = &caches[ob.object_id()];
        let pools = pooled_scores(&[ob], bank.folds.k, |f, rows| {
            Ok(ob.folds[f].normalization.apply(cache[f][rows[0]]))
        })?;
        let (attacks, c) = curves_from(&pools, targets)?;
        objects.push(ObjectResult {
            object_id: ob.object_id().to_string(),
            params: ob.folds.iter().map(|f| f.model.params).collect(),
            attacks,
        });
        curves.insert(ob.object_id().to_string(), c);
    }
    let average = average_frr(objects.iter().map(|o| &o.attacks), targets);
    Ok(Evaluation {
        report: EvaluationReport {
            victim_id: bank.victim.clone(),
            config: bank.config,
            family: bank.family,
            tuning: bank.tuning,
            seed: bank.seed,
            folds: bank.folds.k,
            far_targets: targets.to_vec(),
            objects,
            skipped_objects: bank.skipped.clone(),
            average,
            ensembles: None,
            rmi: None,
        },
        curves,
        bank: bank.clone(),
    })
}

/// Trains the bank for one victim and configuration, then evaluates it.
pub fn evaluate_victim(
    exp: &Experiment,
    victim: &str,
    config: Configuration,
    family: ModelFamily,
    tuning: Tuning,
    seed: u64,
    targets: &[f64],
) -> Result<Evaluation> {
    validate_targets(targets)?;
    let bank = build_configuration(exp, victim, config, family, tuning, seed)?;
    evaluate_bank(&bank, targets)
}

/// All subsets of `0..n` with `size` elements, in lexicographic order.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        go(0, n, size, &mut Vec::with_capacity(size), &mut out);
    }
    out
}

fn evaluate_subset(
    bank: &ConfigurationBank,
    members: &[&ObjectBank],
    caches: &BTreeMap<&str, Vec<Vec<f64>>>,
    kind: EnsembleKind,
    oof: Option<&OutOfFold>,
    targets: &[f64],
) -> SubsetResult {
    let names: Vec<String> = members.iter().map(|m| m.object_id().to_string()).collect();
    let mut result = SubsetResult {
        kind,
        members: names.clone(),
        attacks: BTreeMap::new(),
        hard_vote: Vec::new(),
        dropped_slots: 0,
        error: None,
    };
    let run = || -> Result<SubsetResult> {
        let k = bank.folds.k;
        let raw = |f: usize, rows: &[usize]| -> Vec<f64> {
            members
                .iter()
                .zip(rows)
                .map(|(m, &r)| caches[m.object_id()][f][r])
                .collect()
        };
        // One ensemble per fold (and per target for hard votes).
        let ensembles: Vec<Vec<EnsembleModel>> = match kind {
            EnsembleKind::Voting => (0..k)
                .map(|f| {
                    let models: Vec<_> = members.iter().map(|m| &m.folds[f].model).collect();
                    targets.iter().map(|&t| EnsembleModel::voting(&models, t)).collect()
                })
                .collect::<Result<_>>()?,
            EnsembleKind::Stacking => {
                let oof = oof.ok_or_else(|| Error::Training("stacking needs out-of-fold scores".into()))?;
                let ids: Vec<&str> = names.iter().map(String::as_str).collect();
                (0..k)
                    .map(|f| {
                        let (cols, y) = oof.design(&ids, f)?;
                        Ok(vec![train_stacking(&cols, &y)?])
                    })
                    .collect::<Result<_>>()?
            }
        };
        let pools = pooled_scores(members, k, |f, rows| ensembles[f][0].score(&raw(f, rows)))?;
        let mut out = result.clone();
        out.dropped_slots = pools.dropped;
        out.attacks = curves_from(&pools, targets)?.0;
        if kind == EnsembleKind::Voting {
            for (ti, &t) in targets.iter().enumerate() {
                let (mut acc_imp, mut n_imp, mut rej_gen, mut n_gen) = (0usize, 0usize, 0usize, 0usize);
                pooled_scores(members, k, |f, rows| {
                    let d = ensembles[f][ti].decide(&raw(f, rows))?;
                    Ok(if d == Decision::Victim { 1.0 } else { 0.0 })
                })
                .map(|p| {
                    n_gen = p.genuine.len();
                    rej_gen = p.genuine.iter().filter(|&&v| v == 0.0).count();
                    let imp = &p.impostor[&AttackKind::ZeroEffort];
                    n_imp = imp.len();
                    acc_imp = imp.iter().filter(|&&v| v == 1.0).count();
                })?;
                out.hard_vote.push(HardVotePoint {
                    far_target: t,
                    far: acc_imp as f64 / n_imp.max(1) as f64,
                    frr: rej_gen as f64 / n_gen.max(1) as f64,
                });
            }
        }
        Ok(out)
    };
    match run() {
        Ok(r) => r,
        Err(e) => {
            log::warn!("{} ensemble {:?} failed: {e}", kind.as_str(), names);
            result.error = Some(e.to_string());
            result
        }
    }
}

/// Every subset of 1 to `max_size` objects, combined by each requested
/// kind, evaluated on run-aligned slots and averaged per subset size.
pub fn ensemble_study(
    bank: &ConfigurationBank,
    kinds: &[EnsembleKind],
    max_size: usize,
    targets: &[f64],
) -> Result<EnsembleStudy> {
    validate_targets(targets)?;
    if max_size == 0 {
        return Err(Error::validation("ensemble size must be at least 1"));
    }
    let objects: Vec<&ObjectBank> = bank.objects.values().collect();
    if objects.len() < max_size {
        return Err(Error::InsufficientData(format!(
            "ensembles of {max_size} need that many objects, only {} usable",
            objects.len()
        )));
    }
    let oof = if kinds.contains(&EnsembleKind::Stacking) {
        Some(out_of_fold_scores(bank)?)
    } else {
        None
    };
    let caches: BTreeMap<&str, Vec<Vec<f64>>> = objects
        .iter()
        .map(|ob| (ob.object_id(), score_cache(ob)))
        .collect();
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();
    let n = objects.len();
    let jobs: Vec<(EnsembleKind, Vec<usize>)> = kinds
        .iter()
        .flat_map(|&kind| {
            (1..=max_size).flat_map(move |size| combinations(n, size).into_iter().map(move |c| (kind, c)))
        })
        .collect();
    let subsets: Vec<SubsetResult> = jobs
        .par_iter()
        .map(|(kind, idx)| {
            let members: Vec<&ObjectBank> = idx.iter().map(|&i| objects[i]).collect();
            evaluate_subset(bank, &members, &caches, *kind, oof.as_ref(), targets)
        })
        .collect();
    let mut summary = Vec::new();
    for &kind in &kinds {
        for size in 1..=max_size {
            let group: Vec<&SubsetResult> = subsets
                .iter()
                .filter(|s| s.kind == kind && s.members.len() == size)
                .collect();
            let ok: Vec<&SubsetResult> = group.iter().copied().filter(|s| s.error.is_none()).collect();
            summary.push(SizeSummary {
                kind,
                size,
                subsets: group.len(),
                failed: group.len() - ok.len(),
                mean: average_frr(ok.iter().map(|s| &s.attacks), targets),
            });
        }
    }
    Ok(EnsembleStudy {
        max_size,
        summary,
        subsets,
    })
}

/// Curve points for one object and impostor population.
pub fn write_roc_csv<W: Write>(curve: &RocCurve, out: W) -> Result<()> {
    curve.write_csv(out)
}

/// One row per FAR target; one column per configuration and impostor
/// population, averaged over objects and over the given reports.
pub fn write_frr_csv<W: Write>(reports: &[EvaluationReport], out: W) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    let io = |e| Error::io("<frr_at_far.csv>", e);
    let mut targets: Vec<f64> = reports.iter().flat_map(|r| r.far_targets.iter().copied()).collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let mut cells: BTreeMap<(Configuration, AttackKind), BTreeMap<usize, (f64, usize)>> = BTreeMap::new();
    for r in reports {
        for (&kind, means) in &r.average {
            for m in means {
                if let Some(ti) = targets.iter().position(|&t| t == m.far_target) {
                    if m.count > 0 {
                        let c = cells.entry((r.config, kind)).or_default().entry(ti).or_insert((0.0, 0));
                        c.0 += m.frr;
                        c.1 += 1;
                    }
                }
            }
        }
    }
    write!(out, "far").map_err(io)?;
    for (config, kind) in cells.keys() {
        write!(out, ",{}/{}", config.as_str(), kind.as_str()).map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    for (ti, t) in targets.iter().enumerate() {
        write!(out, "{t}").map_err(io)?;
        for col in cells.values() {
            match col.get(&ti) {
                Some((s, n)) => write!(out, ",{:.4}", s / *n as f64).map_err(io)?,
                None => write!(out, ",NA").map_err(io)?,
            }
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}
