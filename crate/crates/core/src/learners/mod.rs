//! First-principles classifiers and model selection.

pub mod base;
pub mod cv;
pub mod forest;
pub mod grid;
pub mod logreg;
pub mod standardize;
pub mod svm;

use serde::{Deserialize, Serialize};

use crate::error::Result;
pub use base::{fit_base, fit_base_with, fixed_params, TrainedBaseModel, Tuning};
pub use cv::stratified_kfold;
pub use forest::{train_forest, FeatureSubsample, Forest, ForestParams};
pub use grid::grid_search;
pub use logreg::{train_logreg, LogisticModel};
pub use standardize::Standardizer;
pub use svm::{train_svm, Kernel, Svm, SvmParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Forest,
    Svm,
}

impl std::str::FromStr for ModelFamily {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forest" | "rf" => Ok(ModelFamily::Forest),
            "svm" => Ok(ModelFamily::Svm),
            _ => Err(crate::Error::validation(format!("unknown model family {s}"))),
        }
    }
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelFamily::Forest => "forest",
            ModelFamily::Svm => "svm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelParams {
    Forest(ForestParams),
    Svm(SvmParams),
}

impl ModelParams {
    pub fn family(&self) -> ModelFamily {
        match self {
            ModelParams::Forest(_) => ModelFamily::Forest,
            ModelParams::Svm(_) => ModelFamily::Svm,
        }
    }
}

/// A fitted classifier. SVM inputs are standardized with statistics from
/// its own training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FittedModel {
    Forest(Forest),
    Svm {
        standardizer: Standardizer,
        svm: Svm,
    },
}

impl FittedModel {
    pub fn fit(x: &[Vec<f64>], y: &[bool], params: &ModelParams, seed: u64) -> Result<Self> {
        match params {
            ModelParams::Forest(p) => Ok(FittedModel::Forest(train_forest(x, y, p, seed)?)),
            ModelParams::Svm(p) => {
                let standardizer = Standardizer::fit(x);
                let svm = train_svm(&standardizer.transform(x), y, p)?;
                Ok(FittedModel::Svm { standardizer, svm })
            }
        }
    }

    /// Higher means more victim-like: the forest's victim vote fraction or
    /// the SVM's signed decision value.
    pub fn score(&self, x: &[f64]) -> f64 {
        match self {
            FittedModel::Forest(f) => f.score(x),
            FittedModel::Svm { standardizer, svm } => svm.decision(&standardizer.transform_row(x)),
        }
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        match self {
            FittedModel::Forest(f) => f.predict(x),
            FittedModel::Svm { standardizer, svm } => svm.predict(&standardizer.transform_row(x)),
        }
    }
}
