//! Classifiers over categorical codes and stratified cross-validation.

mod cv;
mod folds;
mod knn;
mod logistic;
mod naive_bayes;

pub use cv::{cross_validate, CvReport, FeatureSource, FoldReport, MeanReport};
pub use folds::FoldPlan;
pub use knn::KnnModel;
pub use logistic::{LogisticModel, LrParams};
pub use naive_bayes::NaiveBayesModel;

use serde::{Deserialize, Serialize};

use crate::dataset::DataTable;
use crate::error::Result;

/// Row-major matrix of category codes for a chosen feature list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMatrix {
    pub n_rows: usize,
    pub cards: Vec<usize>,
    pub data: Vec<u32>,
}

impl FeatureMatrix {
    pub fn new(n_rows: usize, cards: Vec<usize>, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), n_rows * cards.len(), "matrix shape");
        Self { n_rows, cards, data }
    }

    pub fn from_table(table: &DataTable, features: &[usize], rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * features.len());
        for &r in rows {
            data.extend(features.iter().map(|&f| table.column(f)[r]));
        }
        Self {
            n_rows: rows.len(),
            cards: features.iter().map(|&f| table.cardinality(f)).collect(),
            data,
        }
    }

    pub fn n_cols(&self) -> usize {
        self.cards.len()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let d = self.n_cols();
        &self.data[i * d..(i + 1) * d]
    }
}

pub trait Predict {
    fn predict(&self, row: &[u32]) -> u8;

    fn predict_all(&self, x: &FeatureMatrix) -> Vec<u8> {
        (0..x.n_rows).map(|i| self.predict(x.row(i))).collect()
    }
}

/// Anything that can be fitted on a fold's training split.
pub trait Learner {
    fn fit(&self, x: &FeatureMatrix, y: &[u8]) -> Result<Box<dyn Predict + Send + Sync>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Nb,
    Lr,
    Knn,
}

impl std::str::FromStr for ClassifierKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(ClassifierKind::Nb),
            "lr" => Ok(ClassifierKind::Lr),
            "knn" => Ok(ClassifierKind::Knn),
            other => Err(crate::error::Error::InvalidConfig(format!("unknown classifier `{other}`"))),
        }
    }
}

/// Classifier with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ClassifierSpec {
    Nb { smoothing: f64 },
    Lr(LrParams),
    Knn { k: usize },
}

impl ClassifierSpec {
    pub fn default_for(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::Nb => ClassifierSpec::Nb { smoothing: 1.0 },
            ClassifierKind::Lr => ClassifierSpec::Lr(LrParams::default()),
            ClassifierKind::Knn => ClassifierSpec::Knn { k: 5 },
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierSpec::Nb { .. } => ClassifierKind::Nb,
            ClassifierSpec::Lr(_) => ClassifierKind::Lr,
            ClassifierSpec::Knn { .. } => ClassifierKind::Knn,
        }
    }

    pub fn train(&self, x: &FeatureMatrix, y: &[u8]) -> Result<TrainedModel> {
        Ok(match *self {
            ClassifierSpec::Nb { smoothing } => TrainedModel::Nb(NaiveBayesModel::fit(x, y, smoothing)?),
            ClassifierSpec::Lr(params) => TrainedModel::Lr(LogisticModel::fit(x, y, &params)?),
            ClassifierSpec::Knn { k } => TrainedModel::Knn(KnnModel::fit(x, y, k)?),
        })
    }
}

impl Learner for ClassifierSpec {
    fn fit(&self, x: &FeatureMatrix, y: &[u8]) -> Result<Box<dyn Predict + Send + Sync>> {
        Ok(Box::new(self.train(x, y)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Nb(NaiveBayesModel),
    Lr(LogisticModel),
    Knn(KnnModel),
}

impl Predict for TrainedModel {
    fn predict(&self, row: &[u32]) -> u8 {
        match self {
            TrainedModel::Nb(m) => m.predict(row),
            TrainedModel::Lr(m) => m.predict(row),
            TrainedModel::Knn(m) => m.predict(row),
        }
    }
}
