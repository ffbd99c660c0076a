use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, FoldPlan, Learner};
use crate::dataset::{make_stream, DataTable, StreamOrder};
use crate::error::{Error, Result};
use crate::metrics::FairnessReport;
use crate::selector::{run, SelectorConfig};

/// Where each fold's feature list comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSource {
    /// Selected once on the full table.
    Fixed(Vec<usize>),
    /// Re-selected on every training split.
    PerFold { cfg: SelectorConfig, order: StreamOrder },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_test: usize,
    pub features: Vec<usize>,
    #[serde(flatten)]
    pub report: FairnessReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanReport {
    pub acc: f64,
    pub spd: f64,
    /// Mean over folds where PE is defined; missing if it never is.
    pub pe: Option<f64>,
    pub pe_missing_folds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldReport>,
    pub mean: MeanReport,
}

impl CvReport {
    fn aggregate(folds: Vec<FoldReport>) -> Self {
        let n = folds.len() as f64;
        let acc = folds.iter().map(|f| f.report.acc).sum::<f64>() / n;
        let spd = folds.iter().map(|f| f.report.spd).sum::<f64>() / n;
        let defined: Vec<f64> = folds.iter().filter_map(|f| f.report.pe).collect();
        let pe = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
        let mean = MeanReport {
            acc,
            spd,
            pe,
            pe_missing_folds: folds.len() - defined.len(),
        };
        Self { folds, mean }
    }

    /// One JSON record per fold followed by the aggregate record.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for fold in &self.folds {
            let mut v = serde_json::to_value(fold).expect("fold report serializes");
            v["record"] = "fold".into();
            out.push_str(&v.to_string());
            out.push('\n');
        }
        let mut v = serde_json::to_value(&self.mean).expect("mean report serializes");
        v["record"] = "aggregate".into();
        v["folds"] = self.folds.len().into();
        out.push_str(&v.to_string());
        out.push('\n');
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut folds = Vec::new();
        let mut mean = None;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let v: serde_json::Value = serde_json::from_str(line)?;
            match v.get("record").and_then(|r| r.as_str()) {
                Some("fold") => folds.push(serde_json::from_value(v)?),
                Some("aggregate") => mean = Some(serde_json::from_value(v)?),
                _ => return Err(Error::InvalidInput(format!("unrecognized report record: {line}"))),
            }
        }
        let mean = mean.ok_or_else(|| Error::InvalidInput("report has no aggregate record".into()))?;
        Ok(Self { folds, mean })
    }
}

/// Stratified k-fold evaluation of `learner` on the held-out folds.
pub fn cross_validate(
    table: &DataTable,
    features: &FeatureSource,
    learner: &dyn Learner,
    k: usize,
    seed: u64,
    positive_group: u32,
) -> Result<CvReport> {
    let labels = table.target_labels();
    let groups_all = table.column(table.sensitive_index());
    let plan = FoldPlan::stratified(&labels, k, seed)?;
    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let train = plan.train_rows(fold);
        let test = plan.test_rows(fold);
        let positives = train.iter().filter(|&&r| labels[r] == 1).count();
        if positives == 0 || positives == train.len() {
            return Err(Error::DegenerateFold {
                fold,
                reason: "training split holds a single class".into(),
            });
        }
        let chosen = match features {
            FeatureSource::Fixed(f) => f.clone(),
            FeatureSource::PerFold { cfg, order } => {
                let sub = table.select_rows(&train);
                run(&sub, &make_stream(&sub, *order), cfg)?.0
            }
        };
        let x_train = FeatureMatrix::from_table(table, &chosen, &train);
        let y_train: Vec<u8> = train.iter().map(|&r| labels[r]).collect();
        let model = learner.fit(&x_train, &y_train)?;
        let x_test = FeatureMatrix::from_table(table, &chosen, &test);
        let pred = model.predict_all(&x_test);
        let truth: Vec<u8> = test.iter().map(|&r| labels[r]).collect();
        let groups: Vec<u32> = test.iter().map(|&r| groups_all[r]).collect();
        let present = groups.iter().collect::<std::collections::BTreeSet<_>>().len();
        if present < table.cardinality(table.sensitive_index()) {
            log::warn!("fold {fold}: {present} of {} sensitive groups present", table.cardinality(table.sensitive_index()));
        }
        let report = FairnessReport::compute(&pred, &truth, &groups, positive_group).map_err(|e| match e {
            Error::InsufficientGroups(_) => Error::DegenerateFold {
                fold,
                reason: e.to_string(),
            },
            other => other,
        })?;
        folds.push(FoldReport {
            fold,
            n_test: test.len(),
            features: chosen,
            report,
        });
    }
    Ok(CvReport::aggregate(folds))
}
