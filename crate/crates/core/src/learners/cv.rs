use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::labels;
use crate::seed;

/// Fold index per sample. Each class is shuffled (sub-seed `(seed, "kfold",
/// class)`) and dealt round-robin, continuing the deal across classes, so
/// every fold holds each class to within one sample of its share.
///
/// When the smallest class has fewer than `k` members, `k` drops to that
/// count with a warning. Returns the fold vector and the effective `k`.
pub fn stratified_kfold<L: Ord + Copy>(labels: &[L], k: usize, seed: u64) -> Result<(Vec<usize>, usize)> {
    if k < 2 {
        return Err(Error::validation(format!("k-fold needs k >= 2, got {k}")));
    }
    let mut classes: BTreeMap<L, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    if classes.len() < 2 {
        return Err(Error::InsufficientData(
            "stratified folds need at least two classes".into(),
        ));
    }
    let smallest = classes.values().map(Vec::len).min().unwrap_or(0);
    let k_eff = if smallest < k {
        log::warn!("smallest class has {smallest} members; reducing {k}-fold to {smallest}-fold");
        smallest
    } else {
        k
    };
    if k_eff < 2 {
        return Err(Error::InsufficientData(format!(
            "smallest class has {smallest} member(s); cannot build folds"
        )));
    }
    let mut folds = vec![0usize; labels.len()];
    let mut offset = 0;
    for (c, (_, mut members)) in classes.into_iter().enumerate() {
        members.shuffle(&mut seed::rng(seed, labels!["kfold", c]));
        for (r, i) in members.iter().enumerate() {
            folds[*i] = (offset + r) % k_eff;
        }
        offset = (offset + members.len()) % k_eff;
    }
    Ok((folds, k_eff))
}

/// `(train, test)` index lists for fold `f`.
pub fn split(folds: &[usize], f: usize) -> (Vec<usize>, Vec<usize>) {
    (0..folds.len()).partition(|&i| folds[i] != f)
}
