//! One object's victim-versus-others classifier: feature selection,
//! hyperparameter choice and fit, bundled with what is needed to score a
//! full feature row later.

use serde::{Deserialize, Serialize};

use super::forest::{FeatureSubsample, ForestParams};
use super::grid::{grid_search, GridResult};
use super::svm::{Kernel, SvmParams};
use super::{FittedModel, ModelFamily, ModelParams};
use crate::error::Result;
use crate::features::{Configuration, FeatureTable};
use crate::labels;
use crate::seed;
use crate::selection::{select_top_k, SelectedFeatureSet, TOP_K};

/// How hyperparameters are chosen for each base model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tuning {
    /// Exhaustive sweep with inner 5-fold CV.
    Grid,
    /// The most commonly chosen point of each search space: 100 trees of
    /// depth 7 with `sqrt` subsampling, or an RBF SVM with `C = 0.1`,
    /// `gamma = 0.01`.
    Fixed,
}

impl std::str::FromStr for Tuning {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Tuning::Grid),
            "fixed" => Ok(Tuning::Fixed),
            _ => Err(crate::Error::validation(format!("unknown tuning mode {s}"))),
        }
    }
}

pub fn fixed_params(family: ModelFamily) -> ModelParams {
    match family {
        ModelFamily::Forest => ModelParams::Forest(ForestParams {
            n_estimators: 100,
            max_depth: 7,
            feature_subsample: FeatureSubsample::Sqrt,
        }),
        ModelFamily::Svm => ModelParams::Svm(SvmParams {
            c: 0.1,
            gamma: 0.01,
            kernel: Kernel::Rbf,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedBaseModel {
    pub object_id: String,
    pub config: Configuration,
    pub params: ModelParams,
    pub selected: SelectedFeatureSet,
    pub model: FittedModel,
    pub seed: u64,
    /// Score of every training row, in training order.
    pub train_scores: Vec<f64>,
    pub train_labels: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridResult>,
}

impl TrainedBaseModel {
    pub fn family(&self) -> ModelFamily {
        self.params.family()
    }

    /// Scores a full (unselected) feature row of this object's table.
    pub fn score(&self, row: &[f64]) -> f64 {
        self.model.score(&self.selected.project(row))
    }
}

/// Selects the top features on `rows` of `table`, tunes and fits.
/// `y[i]` labels `table.rows[rows[i]]`.
pub fn fit_base(
    table: &FeatureTable,
    rows: &[usize],
    y: &[bool],
    family: ModelFamily,
    tuning: Tuning,
    seed: u64,
) -> Result<TrainedBaseModel> {
    let classes: Vec<usize> = y.iter().map(|&v| v as usize).collect();
    let selected = select_top_k(table, rows, &classes, TOP_K)?;
    let x: Vec<Vec<f64>> = rows.iter().map(|&r| selected.project(&table.rows[r])).collect();
    let (params, grid) = match tuning {
        Tuning::Fixed => (fixed_params(family), None),
        Tuning::Grid => {
            let g = grid_search(&x, y, family, seed::derive(seed, labels!["grid-search"]))?;
            (g.best, Some(g))
        }
    };
    fit_selected(table, selected, x, y, params, grid, seed)
}

/// Like [`fit_base`] but with hyperparameters fixed in advance.
pub fn fit_base_with(
    table: &FeatureTable,
    rows: &[usize],
    y: &[bool],
    params: ModelParams,
    seed: u64,
) -> Result<TrainedBaseModel> {
    let classes: Vec<usize> = y.iter().map(|&v| v as usize).collect();
    let selected = select_top_k(table, rows, &classes, TOP_K)?;
    let x: Vec<Vec<f64>> = rows.iter().map(|&r| selected.project(&table.rows[r])).collect();
    fit_selected(table, selected, x, y, params, None, seed)
}

fn fit_selected(
    table: &FeatureTable,
    selected: SelectedFeatureSet,
    x: Vec<Vec<f64>>,
    y: &[bool],
    params: ModelParams,
    grid: Option<GridResult>,
    seed: u64,
) -> Result<TrainedBaseModel> {
    let model_seed = seed::derive(seed, labels!["fit"]);
    let model = FittedModel::fit(&x, y, &params, model_seed)?;
    let train_scores = x.iter().map(|r| model.score(r)).collect();
    Ok(TrainedBaseModel {
        object_id: table.object_id.clone(),
        config: table.config,
        params,
        selected,
        model,
        seed: model_seed,
        train_scores,
        train_labels: y.to_vec(),
        grid,
    })
}
