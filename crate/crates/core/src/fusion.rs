//! Decision-level fusion of per-object base models, plus the per-fold bank of
//! base models that fusion and evaluation share.
//!
//! Voting takes the mode of member hard labels (ties reject) and scores with
//! the mean of min-max normalized member scores. Stacking fits a logistic
//! regression on out-of-fold member scores.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::metrics::roc;
use crate::experiment::Experiment;
use crate::features::{Configuration, FeatureTable};
use crate::ingestion::AttackKind;
use crate::learners::base::{fit_base, fit_base_with, TrainedBaseModel, Tuning};
use crate::learners::cv::stratified_kfold;
use crate::learners::logreg::{train_logreg, LogisticModel};
use crate::learners::ModelFamily;
use crate::segmentation::segments_by_victim;
use crate::{labels, seed};

pub const OUTER_FOLDS: usize = 10;
pub const STACKING_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Victim,
    Other,
}

/// Affine map of training scores onto `[0, 1]`. Test scores may fall outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub min: f64,
    pub max: f64,
}

impl MinMax {
    pub fn fit(scores: &[f64]) -> Self {
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min.is_finite() && max.is_finite() {
            MinMax { min, max }
        } else {
            MinMax { min: 0.0, max: 1.0 }
        }
    }

    /// A degenerate range only shifts.
    pub fn apply(&self, score: f64) -> f64 {
        let span = self.max - self.min;
        if span > 0.0 {
            (score - self.min) / span
        } else {
            score - self.min
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePrediction {
    pub object_id: String,
    pub score: f64,
    pub normalized: f64,
    /// `None` rejects every score.
    pub threshold: Option<f64>,
    pub hard_label: Decision,
}

impl BasePrediction {
    pub fn new(object_id: &str, score: f64, normalization: MinMax, threshold: Option<f64>) -> Self {
        let accept = threshold.is_some_and(|t| score >= t);
        BasePrediction {
            object_id: object_id.to_string(),
            score,
            normalized: normalization.apply(score),
            threshold,
            hard_label: if accept { Decision::Victim } else { Decision::Other },
        }
    }
}

/// Majority hard label (ties reject) and the mean normalized score. Members
/// are combined in object-id order, so input order never matters.
pub fn predict_vote(predictions: &[BasePrediction]) -> Result<(Decision, f64)> {
    if predictions.is_empty() {
        return Err(Error::validation("vote needs at least one member"));
    }
    let mut sorted: Vec<&BasePrediction> = predictions.iter().collect();
    sorted.sort_by(|a, b| a.object_id.cmp(&b.object_id));
    let n = sorted.len();
    let victims = sorted.iter().filter(|p| p.hard_label == Decision::Victim).count();
    let label = if 2 * victims > n {
        Decision::Victim
    } else {
        Decision::Other
    };
    let score = sorted.iter().map(|p| p.normalized).sum::<f64>() / n as f64;
    Ok((label, score))
}

/// Threshold meeting `target_far` on training scores, or `None` when only
/// rejecting everything does.
pub fn calibrate_threshold(genuine: &[f64], impostor: &[f64], target_far: f64) -> Result<Option<f64>> {
    let p = roc(genuine, impostor)?.operating_point(target_far)?;
    Ok(p.threshold.is_finite().then_some(p.threshold))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EnsembleKind {
    Voting,
    Stacking,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 2] = [EnsembleKind::Voting, EnsembleKind::Stacking];

    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleKind::Voting => "voting",
            EnsembleKind::Stacking => "stacking",
        }
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "voting" => Ok(EnsembleKind::Voting),
            "stacking" => Ok(EnsembleKind::Stacking),
            _ => Err(Error::validation(format!("unknown ensemble kind {s}"))),
        }
    }
}

/// Member scores are always passed in `members` order (sorted object ids).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub kind: EnsembleKind,
    pub members: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub normalization: Vec<MinMax>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thresholds: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_far: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<LogisticModel>,
}

fn check_members<'a>(ids: impl Iterator<Item = &'a str>) -> Result<Vec<String>> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::validation(format!("duplicate ensemble member {id}")));
        }
    }
    if seen.is_empty() {
        return Err(Error::validation("ensemble needs at least one member"));
    }
    Ok(seen.into_iter().map(str::to_string).collect())
}

impl EnsembleModel {
    /// Uniform-weight vote. Each member's threshold is calibrated on its own
    /// training scores to `target_far`.
    pub fn voting(members: &[&TrainedBaseModel], target_far: f64) -> Result<Self> {
        let ids = check_members(members.iter().map(|m| m.object_id.as_str()))?;
        let mut sorted = members.to_vec();
        sorted.sort_by(|a, b| a.object_id.cmp(&b.object_id));
        let mut normalization = Vec::with_capacity(sorted.len());
        let mut thresholds = Vec::with_capacity(sorted.len());
        for m in sorted {
            let (g, i) = split_by_label(&m.train_scores, &m.train_labels);
            normalization.push(MinMax::fit(&m.train_scores));
            thresholds.push(calibrate_threshold(&g, &i, target_far)?);
        }
        Ok(EnsembleModel {
            kind: EnsembleKind::Voting,
            members: ids,
            normalization,
            thresholds,
            target_far: Some(target_far),
            meta: None,
        })
    }

    pub fn predictions(&self, scores: &[f64]) -> Vec<BasePrediction> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, id)| {
                let norm = self.normalization.get(i).copied().unwrap_or(MinMax { min: 0.0, max: 1.0 });
                let thr = self.thresholds.get(i).copied().flatten();
                BasePrediction::new(id, scores[i], norm, thr)
            })
            .collect()
    }

    /// Continuous ensemble score; higher means victim.
    pub fn score(&self, scores: &[f64]) -> Result<f64> {
        self.check_arity(scores)?;
        match (&self.kind, &self.meta) {
            (EnsembleKind::Voting, _) => Ok(predict_vote(&self.predictions(scores))?.1),
            (EnsembleKind::Stacking, Some(meta)) => Ok(meta.probability(scores)),
            (EnsembleKind::Stacking, None) => Err(Error::validation("stacking ensemble without meta-model")),
        }
    }

    pub fn decide(&self, scores: &[f64]) -> Result<Decision> {
        self.check_arity(scores)?;
        match self.kind {
            EnsembleKind::Voting => Ok(predict_vote(&self.predictions(scores))?.0),
            EnsembleKind::Stacking => Ok(if self.score(scores)? >= 0.5 {
                Decision::Victim
            } else {
                Decision::Other
            }),
        }
    }

    fn check_arity(&self, scores: &[f64]) -> Result<()> {
        if scores.len() != self.members.len() {
            return Err(Error::validation(format!(
                "ensemble of {} members given {} scores",
                self.members.len(),
                scores.len()
            )));
        }
        Ok(())
    }
}

fn split_by_label(scores: &[f64], labels: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let mut g = Vec::new();
    let mut i = Vec::new();
    for (&s, &l) in scores.iter().zip(labels) {
        if l {
            g.push(s);
        } else {
            i.push(s);
        }
    }
    (g, i)
}

/// Rows of the meta design matrix, one column per member in key order.
pub fn meta_features(member_scores: &BTreeMap<String, Vec<f64>>) -> Vec<Vec<f64>> {
    let n = member_scores.values().next().map_or(0, Vec::len);
    (0..n)
        .map(|r| member_scores.values().map(|c| c[r]).collect())
        .collect()
}

/// Logistic meta-model over out-of-fold member scores keyed by object id.
pub fn train_stacking(member_scores: &BTreeMap<String, Vec<f64>>, y: &[bool]) -> Result<EnsembleModel> {
    let members = check_members(member_scores.keys().map(String::as_str))?;
    if member_scores.values().any(|c| c.len() != y.len()) {
        return Err(Error::validation("meta-features and labels differ in length"));
    }
    let meta = train_logreg(&meta_features(member_scores), y)?;
    Ok(EnsembleModel {
        kind: EnsembleKind::Stacking,
        members,
        normalization: Vec::new(),
        thresholds: Vec::new(),
        target_far: None,
        meta: Some(meta),
    })
}

/// Aligns segments of different objects: the `n`-th interaction with an
/// object during a run.
pub type Slot = (String, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRole {
    /// Victim-versus-others data, tested in outer fold `fold`.
    Pool { fold: usize, victim: bool },
    /// Attack aimed at the victim.
    Attack(AttackKind),
    /// Attack aimed at someone else.
    Excluded,
}

/// Outer folds assigned per run, so every object of a run shares a fold.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFolds {
    pub k: usize,
    pub fold_of: BTreeMap<String, usize>,
    pub victim_runs: BTreeSet<String>,
}

impl RunFolds {
    /// Stratified over non-attack runs, victim against everyone else.
    pub fn cross_validation(exp: &Experiment, victim: &str, k: usize, seed: u64) -> Result<Self> {
        let (runs, victim_runs) = pool_runs(exp, victim);
        let labels: Vec<bool> = runs.iter().map(|r| victim_runs.contains(r)).collect();
        let (folds, k) = stratified_kfold(&labels, k, seed::derive(seed, labels!["outer-folds", victim]))?;
        Ok(RunFolds {
            k,
            fold_of: runs.into_iter().zip(folds).collect(),
            victim_runs,
        })
    }

    /// A single model trained on every run; nothing is held out.
    pub fn all_training(exp: &Experiment, victim: &str) -> Self {
        let (runs, victim_runs) = pool_runs(exp, victim);
        RunFolds {
            k: 1,
            fold_of: runs.into_iter().map(|r| (r, usize::MAX)).collect(),
            victim_runs,
        }
    }

    pub fn training_runs(&self, fold: usize) -> Vec<&String> {
        self.fold_of
            .iter()
            .filter(|(_, &f)| f != fold)
            .map(|(r, _)| r)
            .collect()
    }
}

fn pool_runs(exp: &Experiment, victim: &str) -> (Vec<String>, BTreeSet<String>) {
    let mut runs = BTreeSet::new();
    let mut victim_runs = BTreeSet::new();
    for s in exp.segments.iter().filter(|s| s.attack == AttackKind::None) {
        runs.insert(s.run_id.clone());
        if s.user_id == victim {
            victim_runs.insert(s.run_id.clone());
        }
    }
    (runs.into_iter().collect(), victim_runs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldModel {
    pub model: TrainedBaseModel,
    pub normalization: MinMax,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

/// One object's feature table with a base model per outer fold.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectBank {
    pub table: FeatureTable,
    pub roles: Vec<RowRole>,
    pub slots: Vec<Slot>,
    pub folds: Vec<FoldModel>,
}

impl ObjectBank {
    pub fn object_id(&self) -> &str {
        &self.table.object_id
    }

    pub fn raw_score(&self, fold: usize, row: usize) -> f64 {
        self.folds[fold].model.score(&self.table.rows[row])
    }

    /// Score of `row` under fold model `fold`, mapped by that model's
    /// training-score range so scores from different folds are comparable.
    pub fn score(&self, fold: usize, row: usize) -> f64 {
        self.folds[fold].normalization.apply(self.raw_score(fold, row))
    }

    pub fn attack_rows(&self, kind: AttackKind) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&r| self.roles[r] == RowRole::Attack(kind))
            .collect()
    }
}

/// Base models for every usable object and every outer fold.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationBank {
    pub victim: String,
    pub config: Configuration,
    pub family: ModelFamily,
    pub tuning: Tuning,
    pub seed: u64,
    pub folds: RunFolds,
    pub objects: BTreeMap<String, ObjectBank>,
    /// Objects left out, with the reason.
    pub skipped: BTreeMap<String, String>,
}

/// Extracts, selects, tunes and fits one base model per object and outer
/// fold. Objects without sources for `config`, or without both classes,
/// are skipped with a warning.
pub fn build_configuration(
    exp: &Experiment,
    victim: &str,
    config: Configuration,
    family: ModelFamily,
    tuning: Tuning,
    seed: u64,
) -> Result<ConfigurationBank> {
    segments_by_victim(&exp.segments, victim)?;
    let folds = RunFolds::cross_validation(exp, victim, OUTER_FOLDS, seed)?;
    build_with_folds(exp, victim, config, family, tuning, seed, folds)
}

pub fn build_with_folds(
    exp: &Experiment,
    victim: &str,
    config: Configuration,
    family: ModelFamily,
    tuning: Tuning,
    seed: u64,
    folds: RunFolds,
) -> Result<ConfigurationBank> {
    segments_by_victim(&exp.segments, victim)?;
    let mut prepared = Vec::new();
    let mut skipped = BTreeMap::new();
    for object in exp.objects() {
        let Some(table) = FeatureTable::build(&object, config, &exp.segments, &exp.features)? else {
            log::warn!("{object}: no {config} sensors, skipped");
            skipped.insert(object, format!("no {config} sensors"));
            continue;
        };
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        let mut roles = Vec::with_capacity(table.segments.len());
        let mut slots = Vec::with_capacity(table.segments.len());
        for &i in &table.segments {
            let s = &exp.segments[i];
            roles.push(match (s.attack, s.victim_id.as_deref()) {
                (AttackKind::None, _) => RowRole::Pool {
                    fold: folds.fold_of[&s.run_id],
                    victim: s.user_id == victim,
                },
                (kind, Some(v)) if v == victim => RowRole::Attack(kind),
                _ => RowRole::Excluded,
            });
            let n = seen.entry(s.run_id.as_str()).or_default();
            slots.push((s.run_id.clone(), *n));
            *n += 1;
        }
        let has = |want: bool| roles.iter().any(|r| matches!(r, RowRole::Pool { victim, .. } if *victim == want));
        if !(has(true) && has(false)) {
            log::warn!("{object}: victim {victim} or impostors missing, skipped");
            skipped.insert(object, "victim or impostor samples missing".into());
            continue;
        }
        prepared.push((table, roles, slots));
    }
    if prepared.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no object is usable for {config} with victim {victim}"
        )));
    }

    let jobs: Vec<(usize, usize)> = (0..prepared.len())
        .flat_map(|o| (0..folds.k).map(move |f| (o, f)))
        .collect();
    let fitted: Vec<FoldModel> = jobs
        .par_iter()
        .map(|&(o, f)| {
            let (table, roles, _) = &prepared[o];
            let mut train = Vec::new();
            let mut test = Vec::new();
            let mut y = Vec::new();
            for (r, role) in roles.iter().enumerate() {
                if let RowRole::Pool { fold, victim } = *role {
                    if fold == f {
                        test.push(r);
                    } else {
                        train.push(r);
                        y.push(victim);
                    }
                }
            }
            let s = seed::derive(seed, labels!["base", victim, &table.object_id, config.as_str(), f]);
            let model = fit_base(table, &train, &y, family, tuning, s)?;
            Ok(FoldModel {
                normalization: MinMax::fit(&model.train_scores),
                model,
                train_rows: train,
                test_rows: test,
            })
        })
        .collect::<Result<_>>()?;

    let mut fitted = fitted.into_iter();
    let objects = prepared
        .into_iter()
        .map(|(table, roles, slots)| {
            let bank = ObjectBank {
                folds: fitted.by_ref().take(folds.k).collect(),
                table,
                roles,
                slots,
            };
            (bank.object_id().to_string(), bank)
        })
        .collect();
    Ok(ConfigurationBank {
        victim: victim.to_string(),
        config,
        family,
        tuning,
        seed,
        folds,
        objects,
        skipped,
    })
}

/// Out-of-fold member scores over each outer fold's training partition,
/// from an internal stratified split by run. Inner models reuse the outer
/// fold model's hyperparameters and reselect features.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutOfFold {
    /// object -> outer fold -> slot -> (score, is victim).
    pub scores: BTreeMap<String, Vec<BTreeMap<Slot, (f64, bool)>>>,
    /// Objects whose inner fits failed, with the error.
    pub failed: BTreeMap<String, String>,
}

pub fn out_of_fold_scores(bank: &ConfigurationBank) -> Result<OutOfFold> {
    let mut inner: Vec<BTreeMap<&String, usize>> = Vec::with_capacity(bank.folds.k);
    for f in 0..bank.folds.k {
        let runs = bank.folds.training_runs(f);
        let labels: Vec<bool> = runs.iter().map(|r| bank.folds.victim_runs.contains(*r)).collect();
        let (assign, _) = stratified_kfold(
            &labels,
            STACKING_FOLDS,
            seed::derive(bank.seed, labels!["inner-folds", &bank.victim, f]),
        )?;
        inner.push(runs.into_iter().zip(assign).collect());
    }
    let k_inner: Vec<usize> = inner
        .iter()
        .map(|m| m.values().copied().max().map_or(0, |g| g + 1))
        .collect();

    let objects: Vec<&ObjectBank> = bank.objects.values().collect();
    let jobs: Vec<(usize, usize, usize)> = (0..objects.len())
        .flat_map(|o| {
            let k_inner = &k_inner;
            (0..bank.folds.k).flat_map(move |f| (0..k_inner[f]).map(move |g| (o, f, g)))
        })
        .collect();
    let results: Vec<Result<Vec<(Slot, f64, bool)>>> = jobs
        .par_iter()
        .map(|&(o, f, g)| {
            let ob = objects[o];
            let fm = &ob.folds[f];
            let mut train = Vec::new();
            let mut y = Vec::new();
            let mut test = Vec::new();
            for &r in &fm.train_rows {
                let RowRole::Pool { victim, .. } = ob.roles[r] else {
                    continue;
                };
                if inner[f][&ob.slots[r].0] == g {
                    test.push((r, victim));
                } else {
                    train.push(r);
                    y.push(victim);
                }
            }
            let s = seed::derive(
                bank.seed,
                labels!["stack", &bank.victim, ob.object_id(), bank.config.as_str(), f, g],
            );
            let model = fit_base_with(&ob.table, &train, &y, fm.model.params, s)?;
            Ok(test
                .into_iter()
                .map(|(r, v)| (ob.slots[r].clone(), model.score(&ob.table.rows[r]), v))
                .collect())
        })
        .collect();

    let mut out = OutOfFold::default();
    let mut results = results.into_iter();
    for ob in objects {
        let mut per_fold = vec![BTreeMap::new(); bank.folds.k];
        let mut error = None;
        for (f, k) in k_inner.iter().enumerate() {
            for r in results.by_ref().take(*k) {
                match r {
                    Ok(v) => per_fold[f].extend(v.into_iter().map(|(s, sc, l)| (s, (sc, l)))),
                    Err(e) => error = Some(e.to_string()),
                }
            }
        }
        match error {
            Some(e) => {
                log::warn!("{}: stacking inner fit failed: {e}", ob.object_id());
                out.failed.insert(ob.object_id().to_string(), e);
            }
            None => {
                out.scores.insert(ob.object_id().to_string(), per_fold);
            }
        }
    }
    Ok(out)
}

impl OutOfFold {
    /// Meta-features over slots where every member has a score in `fold`.
    pub fn design(&self, members: &[&str], fold: usize) -> Result<(BTreeMap<String, Vec<f64>>, Vec<bool>)> {
        let maps = members
            .iter()
            .map(|m| {
                self.scores
                    .get(*m)
                    .map(|v| &v[fold])
                    .ok_or_else(|| Error::Training(format!("no out-of-fold scores for {m}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut cols: BTreeMap<String, Vec<f64>> = members.iter().map(|m| (m.to_string(), Vec::new())).collect();
        let mut y = Vec::new();
        for (slot, &(_, label)) in maps[0] {
            if maps.iter().all(|m| m.contains_key(slot)) {
                for (m, map) in members.iter().zip(&maps) {
                    cols.get_mut(*m).expect("member column").push(map[slot].0);
                }
                y.push(label);
            }
        }
        Ok((cols, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(id: &str, victim: bool, normalized: f64) -> BasePrediction {
        BasePrediction {
            object_id: id.into(),
            score: normalized,
            normalized,
            threshold: Some(0.5),
            hard_label: if victim { Decision::Victim } else { Decision::Other },
        }
    }

    #[test]
    fn majority_and_ties() {
        let v = [pred("a", true, 1.0), pred("b", false, 0.0), pred("c", true, 1.0)];
        assert_eq!(predict_vote(&v).unwrap().0, Decision::Victim);
        let t = [pred("a", true, 1.0), pred("b", false, 0.0)];
        assert_eq!(predict_vote(&t).unwrap().0, Decision::Other);
        assert!(predict_vote(&[]).is_err());
    }

    #[test]
    fn mean_of_normalized_scores() {
        let p: Vec<_> = [0.2, 0.4, 0.6, 0.8]
            .iter()
            .enumerate()
            .map(|(i, &s)| pred(&format!("o{i}"), s > 0.5, s))
            .collect();
        assert!((predict_vote(&p).unwrap().1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_member_and_unanimity() {
        for v in [true, false] {
            assert_eq!(predict_vote(&[pred("a", v, 0.3)]).unwrap().0, if v { Decision::Victim } else { Decision::Other });
        }
        let all: Vec<_> = (0..5).map(|i| pred(&format!("o{i}"), true, 0.9)).collect();
        assert_eq!(predict_vote(&all).unwrap().0, Decision::Victim);
    }

    #[test]
    fn vote_is_order_invariant() {
        let a = [pred("x", true, 0.1), pred("y", false, 0.7), pred("z", true, 0.3)];
        let b = [a[2].clone(), a[0].clone(), a[1].clone()];
        let (la, sa) = predict_vote(&a).unwrap();
        let (lb, sb) = predict_vote(&b).unwrap();
        assert_eq!(la, lb);
        assert_eq!(sa.to_bits(), sb.to_bits());
    }

    #[test]
    fn hard_label_follows_threshold() {
        let n = MinMax { min: 0.0, max: 2.0 };
        let p = BasePrediction::new("o", 1.0, n, Some(1.0));
        assert_eq!((p.hard_label, p.normalized), (Decision::Victim, 0.5));
        assert_eq!(BasePrediction::new("o", 0.99, n, Some(1.0)).hard_label, Decision::Other);
        assert_eq!(BasePrediction::new("o", 9.0, n, None).hard_label, Decision::Other);
    }

    #[test]
    fn stacking_shape_and_degenerate_scores() {
        let y: Vec<bool> = (0..30).map(|i| i % 3 == 0).collect();
        let cols: BTreeMap<String, Vec<f64>> =
            [("b".to_string(), vec![0.5; 30]), ("a".to_string(), vec![0.5; 30])].into();
        let x = meta_features(&cols);
        assert_eq!((x.len(), x[0].len()), (30, 2));
        let m = train_stacking(&cols, &y).unwrap();
        assert_eq!(m.members, vec!["a", "b"]);
        for s in [[0.0, 0.0], [1.0, -3.0], [0.5, 0.5]] {
            let p = m.score(&s).unwrap();
            assert!((p - 10.0 / 30.0).abs() < 1e-6, "{p}");
        }
        assert!(train_stacking(&cols, &y[..10]).is_err());
    }

    #[test]
    fn stacking_weights_the_informative_member() {
        let y: Vec<bool> = (0..200).map(|i| i % 2 == 0).collect();
        let good: Vec<f64> = y.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
        let noise: Vec<f64> = (0..200).map(|i| ((i * 7919) % 101) as f64 / 100.0).collect();
        let cols: BTreeMap<String, Vec<f64>> = [("good".into(), good), ("noise".into(), noise)].into();
        let m = train_stacking(&cols, &y).unwrap();
        let w = &m.meta.as_ref().unwrap().weights;
        assert!(w[0].abs() > w[1].abs(), "{w:?}");
    }

    #[test]
    fn duplicate_members_rejected() {
        assert!(check_members(["a", "b", "a"].into_iter()).is_err());
        assert!(check_members(std::iter::empty()).is_err());
    }

    #[test]
    fn minmax_degenerate_range_only_shifts() {
        let n = MinMax::fit(&[2.0, 2.0]);
        assert_eq!(n.apply(3.0), 1.0);
        let n = MinMax::fit(&[1.0, 3.0]);
        assert_eq!(n.apply(2.0), 0.5);
    }
}
