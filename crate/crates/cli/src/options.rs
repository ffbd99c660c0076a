//! Flags shared by several subcommands.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fairsfs_core::citest::SubsetSearch;
use fairsfs_core::dataset::{LoadOptions, StreamOrder};
use fairsfs_core::selector::{RescueMode, RescueTest, SelectorConfig};
use fairsfs_core::{load_csv, DataTable};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Binary target column.
    #[arg(long)]
    pub target: String,
    /// Sensitive column.
    #[arg(long)]
    pub sensitive: String,
    /// Equal-frequency bins for numeric columns with more than ten values.
    #[arg(long, env = "FAIRSFS_BINS", default_value_t = 5)]
    pub bins: usize,
}

impl DataArgs {
    pub fn load(&self) -> Result<DataTable, CliError> {
        let opts = LoadOptions {
            target: self.target.clone(),
            sensitive: self.sensitive.clone(),
            discretize_bins: Some(self.bins),
        };
        let table = load_csv(&self.data, &opts)?;
        if table.dropped_rows() > 0 {
            log::warn!("dropped {} rows with missing values", table.dropped_rows());
        }
        for &c in table.constant_columns() {
            log::warn!("column `{}` is constant and left out of the stream", table.name(c));
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderArg {
    File,
    Shuffle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RescueModeArg {
    EveryStep,
    FinalOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RescueTestArg {
    Marginal,
    Subsets,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SelectorArgs {
    /// Significance level of the G² tests.
    #[arg(long, env = "FAIRSFS_ALPHA", default_value_t = 0.01)]
    pub alpha: f64,
    /// Largest conditioning set tried, or `full` to test only the whole blanket.
    #[arg(long, env = "FAIRSFS_MAX_K", default_value = "3")]
    pub max_k: SubsetSearch,
    /// Feature arrival order.
    #[arg(long, value_enum, env = "FAIRSFS_ORDER", default_value = "file")]
    pub order: OrderArg,
    #[arg(long, value_enum, env = "FAIRSFS_RESCUE_MODE", default_value = "every-step")]
    pub rescue_mode: RescueModeArg,
    #[arg(long, value_enum, env = "FAIRSFS_RESCUE_TEST", default_value = "marginal")]
    pub rescue_test: RescueTestArg,
}

impl SelectorArgs {
    pub fn config(&self) -> Result<SelectorConfig, CliError> {
        let cfg = SelectorConfig {
            alpha: self.alpha,
            max_k: self.max_k,
            rescue_mode: match self.rescue_mode {
                RescueModeArg::EveryStep => RescueMode::EveryStep,
                RescueModeArg::FinalOnly => RescueMode::FinalOnly,
            },
            rescue_test: match self.rescue_test {
                RescueTestArg::Marginal => RescueTest::Marginal,
                RescueTestArg::Subsets => RescueTest::Subsets,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn stream_order(&self, seed: u64) -> StreamOrder {
        match self.order {
            OrderArg::File => StreamOrder::FileOrder,
            OrderArg::Shuffle => StreamOrder::Shuffle { seed },
        }
    }
}
