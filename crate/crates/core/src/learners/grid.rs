//! Exhaustive hyperparameter sweep scored by inner stratified cross-validation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::{split, stratified_kfold};
use super::forest::{FeatureSubsample, ForestParams};
use super::svm::{Kernel, SvmParams};
use super::{FittedModel, ModelFamily, ModelParams};
use crate::error::{Error, Result};
use crate::labels;
use crate::seed;

pub const INNER_FOLDS: usize = 5;

pub const FOREST_ESTIMATORS: [usize; 4] = [10, 50, 100, 200];
pub const FOREST_DEPTHS: [usize; 6] = [2, 4, 5, 6, 7, 8];
pub const FOREST_SUBSAMPLES: [FeatureSubsample; 2] = [FeatureSubsample::Sqrt, FeatureSubsample::Log2];
pub const SVM_C: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
pub const SVM_GAMMA: [f64; 4] = [1.0, 0.1, 0.01, 0.001];
pub const SVM_KERNELS: [Kernel; 4] = [Kernel::Linear, Kernel::Polynomial, Kernel::Rbf, Kernel::Sigmoid];

/// Search space in row-major enumeration order (first parameter outermost).
pub fn search_space(family: ModelFamily) -> Vec<ModelParams> {
    match family {
        ModelFamily::Forest => {
            let mut out = Vec::with_capacity(48);
            for n_estimators in FOREST_ESTIMATORS {
                for max_depth in FOREST_DEPTHS {
                    for feature_subsample in FOREST_SUBSAMPLES {
                        out.push(ModelParams::Forest(ForestParams {
                            n_estimators,
                            max_depth,
                            feature_subsample,
                        }));
                    }
                }
            }
            out
        }
        ModelFamily::Svm => {
            let mut out = Vec::with_capacity(64);
            for c in SVM_C {
                for gamma in SVM_GAMMA {
                    for kernel in SVM_KERNELS {
                        out.push(ModelParams::Svm(SvmParams { c, gamma, kernel }));
                    }
                }
            }
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub params: ModelParams,
    /// Mean inner-fold accuracy; `None` when a fold failed to train.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: ModelParams,
    pub best_accuracy: f64,
    pub points: Vec<GridPoint>,
}

/// Mean accuracy of `params` over precomputed folds.
pub fn cv_accuracy(
    x: &[Vec<f64>],
    y: &[bool],
    folds: &[usize],
    k: usize,
    params: &ModelParams,
    seed: u64,
) -> Result<f64> {
    let mut total = 0.0;
    for f in 0..k {
        let (train, test) = split(folds, f);
        let xt: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
        let yt: Vec<bool> = train.iter().map(|&i| y[i]).collect();
        let model = FittedModel::fit(&xt, &yt, params, seed::derive(seed, labels!["grid", f]))?;
        let correct = test.iter().filter(|&&i| model.predict(&x[i]) == y[i]).count();
        total += correct as f64 / test.len() as f64;
    }
    Ok(total / k as f64)
}

/// Sweeps `points` and returns the most accurate; ties go to the earliest.
pub fn grid_search_over(x: &[Vec<f64>], y: &[bool], points: &[ModelParams], seed: u64) -> Result<GridResult> {
    let (folds, k) = stratified_kfold(y, INNER_FOLDS, seed::derive(seed, labels!["inner"]))?;
    let scored: Vec<GridPoint> = points
        .par_iter()
        .map(|p| {
            let accuracy = match cv_accuracy(x, y, &folds, k, p, seed) {
                Ok(a) => Some(a),
                Err(e) => {
                    log::warn!("grid point {p:?} skipped: {e}");
                    None
                }
            };
            GridPoint { params: *p, accuracy }
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in scored.iter().enumerate() {
        if let Some(a) = p.accuracy {
            if best.map_or(true, |(_, b)| a > b) {
                best = Some((i, a));
            }
        }
    }
    let (i, best_accuracy) =
        best.ok_or_else(|| Error::Training("every grid point failed to train".into()))?;
    Ok(GridResult {
        best: scored[i].params,
        best_accuracy,
        points: scored,
    })
}

pub fn grid_search(x: &[Vec<f64>], y: &[bool], family: ModelFamily, seed: u64) -> Result<GridResult> {
    grid_search_over(x, y, &search_space(family), seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(search_space(ModelFamily::Forest).len(), 48);
        assert_eq!(search_space(ModelFamily::Svm).len(), 64);
        match search_space(ModelFamily::Forest)[1] {
            ModelParams::Forest(p) => {
                assert_eq!((p.n_estimators, p.max_depth, p.feature_subsample), (10, 2, FeatureSubsample::Log2))
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn ties_go_to_first_point() {
        // Separable by a single split: every listed depth reaches accuracy 1.
        let y: Vec<bool> = (0..40).map(|i| i >= 20).collect();
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 + if y[i] { 100.0 } else { 0.0 }]).collect();
        let points: Vec<ModelParams> = [5, 3, 4]
            .into_iter()
            .map(|d| {
                ModelParams::Forest(ForestParams {
                    n_estimators: 5,
                    max_depth: d,
                    feature_subsample: FeatureSubsample::Sqrt,
                })
            })
            .collect();
        let r = grid_search_over(&x, &y, &points, 1).unwrap();
        assert!(r.points.iter().all(|p| p.accuracy == Some(1.0)));
        assert_eq!(r.best, points[0]);
    }

    #[test]
    fn all_points_failing_is_an_error() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![(i % 4) as f64, (i % 5) as f64]).collect();
        let y: Vec<bool> = (0..20).map(|i| i % 2 == 0).collect();
        let bad = ModelParams::Forest(ForestParams {
            n_estimators: 0,
            max_depth: 2,
            feature_subsample: FeatureSubsample::Sqrt,
        });
        assert!(grid_search_over(&x, &y, &[bad], 0).is_err());
    }
}
