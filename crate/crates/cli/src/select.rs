use std::fs;
use std::path::PathBuf;

use clap::Args;
use fairsfs_core::{audit_fairness, make_stream, run};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::manifest::{self, RunManifest};
use crate::options::{DataArgs, SelectorArgs};

pub const SELECTED: &str = "selected.txt";
pub const TRACE: &str = "trace.jsonl";
pub const AUDIT: &str = "audit.json";

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SelectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub selector: SelectorArgs,
    /// Seed for the shuffled stream order.
    #[arg(long, env = "FAIRSFS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct AuditFile<'a> {
    passed: bool,
    mb_s: Vec<&'a str>,
    entries: Vec<AuditLine<'a>>,
}

#[derive(Serialize)]
struct AuditLine<'a> {
    feature: &'a str,
    certificate: Option<Vec<&'a str>>,
}

pub fn execute(args: &SelectArgs) -> Result<(), CliError> {
    let cfg = args.selector.config()?;
    let table = args.data.load()?;
    let stream = make_stream(&table, args.selector.stream_order(args.seed));
    let (selected, state) = run(&table, &stream, &cfg)?;
    let audit = audit_fairness(&table, &selected, &state.mb_s, &cfg)?;
    if !audit.passed {
        log::warn!("selected set fails the fairness audit");
    }

    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let mut listing = String::new();
    for &f in &selected {
        listing.push_str(table.name(f));
        listing.push('\n');
    }
    let path = args.out.join(SELECTED);
    fs::write(&path, listing).map_err(|e| CliError::io(&path, e))?;

    let mut trace = Vec::new();
    state.write_trace(&mut trace)?;
    let path = args.out.join(TRACE);
    fs::write(&path, trace).map_err(|e| CliError::io(&path, e))?;

    let names = |v: &[usize]| v.iter().map(|&i| table.name(i)).collect::<Vec<_>>();
    let audit_file = AuditFile {
        passed: audit.passed,
        mb_s: names(&state.mb_s),
        entries: audit
            .entries
            .iter()
            .map(|e| AuditLine {
                feature: table.name(e.feature),
                certificate: e.certificate.as_deref().map(names),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&audit_file).map_err(|e| CliError::runtime(e.to_string()))?;
    text.push('\n');
    let path = args.out.join(AUDIT);
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;

    let outputs = [SELECTED, TRACE, AUDIT].map(String::from).to_vec();
    RunManifest::new("select", args, &[&args.data.data], outputs)?.write(&args.out.join(manifest::FILE_NAME))?;
    log::info!("selected {} of {} candidate features", selected.len(), stream.len());
    Ok(())
}
