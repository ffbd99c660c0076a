use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fairsfs_core::eval::{cross_validate, ClassifierKind, ClassifierSpec, FeatureSource};
use fairsfs_core::{DataTable, Error};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::manifest::{self, RunManifest};
use crate::options::{DataArgs, SelectorArgs};

pub const REPORT: &str = "report.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierArg {
    Lr,
    Nb,
    Knn,
}

impl From<ClassifierArg> for ClassifierKind {
    fn from(c: ClassifierArg) -> Self {
        match c {
            ClassifierArg::Lr => ClassifierKind::Lr,
            ClassifierArg::Nb => ClassifierKind::Nb,
            ClassifierArg::Knn => ClassifierKind::Knn,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Feature names, one per line; `#` starts a comment.
    #[arg(long, required_unless_present = "reselect_per_fold")]
    pub features: Option<PathBuf>,
    #[arg(long, value_enum, env = "FAIRSFS_CLASSIFIER", default_value = "lr")]
    pub classifier: ClassifierArg,
    #[arg(long, env = "FAIRSFS_FOLDS", default_value_t = 10)]
    pub folds: usize,
    /// Seed for the fold assignment and for shuffled streams.
    #[arg(long, env = "FAIRSFS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Sensitive label compared against everyone else for predictive
    /// equality. Defaults to the second label in file order.
    #[arg(long, env = "FAIRSFS_POSITIVE_GROUP")]
    pub positive_group: Option<String>,
    /// Re-run selection on every training split instead of reading --features.
    #[arg(long, conflicts_with = "features")]
    pub reselect_per_fold: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub selector: SelectorArgs,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn read_feature_list(path: &Path, table: &DataTable) -> Result<Vec<usize>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut features = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let i = table.column_index(line)?;
        if i == table.sensitive_index() || i == table.target_index() {
            return Err(CliError::validation(format!("`{line}` is the sensitive or target column")));
        }
        if !features.contains(&i) {
            features.push(i);
        }
    }
    Ok(features)
}

fn positive_code(table: &DataTable, label: Option<&str>) -> Result<(u32, String), CliError> {
    let meta = table.meta(table.sensitive_index());
    match label {
        Some(l) => meta
            .labels
            .iter()
            .position(|x| x == l)
            .map(|p| (p as u32, l.to_string()))
            .ok_or_else(|| CliError::validation(format!("`{l}` is not a value of `{}`", meta.name))),
        None if meta.labels.len() >= 2 => Ok((1, meta.labels[1].clone())),
        None => Err(Error::InsufficientGroups(meta.labels.len()).into()),
    }
}

pub fn execute(args: &EvaluateArgs) -> Result<(), CliError> {
    let table = args.data.load()?;
    let (positive, label) = positive_code(&table, args.positive_group.as_deref())?;
    let source = match &args.features {
        Some(path) if !args.reselect_per_fold => FeatureSource::Fixed(read_feature_list(path, &table)?),
        _ => FeatureSource::PerFold {
            cfg: args.selector.config()?,
            order: args.selector.stream_order(args.seed),
        },
    };
    let spec = ClassifierSpec::default_for(args.classifier.into());
    let report = cross_validate(&table, &source, &spec, args.folds, args.seed, positive)?;

    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let path = args.out.join(REPORT);
    fs::write(&path, report.to_jsonl()).map_err(|e| CliError::io(&path, e))?;

    let mut resolved = args.clone();
    resolved.positive_group = Some(label);
    let mut inputs: Vec<&Path> = vec![&args.data.data];
    if let Some(f) = args.features.as_deref() {
        inputs.push(f);
    }
    RunManifest::new("evaluate", &resolved, &inputs, vec![REPORT.to_string()])?.write(&args.out.join(manifest::FILE_NAME))?;
    Ok(())
}
