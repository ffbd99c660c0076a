use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use fairsfs_core::oracle::{fair_feature_set, random_problem, RandomNetConfig, ENUMERATION_CAP};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SynthArgs {
    #[arg(long, env = "FAIRSFS_NODES", default_value_t = 12)]
    pub nodes: usize,
    #[arg(long, env = "FAIRSFS_EDGE_PROB", default_value_t = 0.25)]
    pub edge_prob: f64,
    /// Rows to sample.
    #[arg(long, env = "FAIRSFS_ROWS", default_value_t = 20_000)]
    pub n: usize,
    #[arg(long, env = "FAIRSFS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Conditioning-set budget for the ground-truth fair set.
    #[arg(long, env = "FAIRSFS_MAX_K", default_value_t = 3)]
    pub max_k: usize,
    /// Files are written as PREFIX.net.json, PREFIX.csv and PREFIX.fair.txt.
    #[arg(long)]
    #[serde(skip)]
    pub out_prefix: PathBuf,
}

pub fn output_names(prefix: &str) -> Vec<String> {
    ["net.json", "csv", "fair.txt"].iter().map(|ext| format!("{prefix}.{ext}")).collect()
}

fn sibling(prefix: &Path, name: &str) -> PathBuf {
    prefix.parent().unwrap_or(Path::new("")).join(name)
}

pub fn execute(args: &SynthArgs) -> Result<(), CliError> {
    if args.nodes > ENUMERATION_CAP {
        return Err(CliError::validation(format!(
            "--nodes {} exceeds the cap of {ENUMERATION_CAP}",
            args.nodes
        )));
    }
    if args.n == 0 {
        return Err(CliError::validation("--n must be positive"));
    }
    let cfg = RandomNetConfig {
        nodes: args.nodes,
        edge_prob: args.edge_prob,
        ..Default::default()
    };
    let problem = random_problem(&cfg, args.seed)?;
    let net = &problem.net;
    let columns = net.sample(args.n, args.seed);

    let stem = args
        .out_prefix
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CliError::validation("--out-prefix needs a file name"))?
        .to_string();
    let names = output_names(&stem);
    if let Some(dir) = args.out_prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }

    let write = |name: &str, text: String| {
        let path = sibling(&args.out_prefix, name);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    };
    write(&names[0], net.to_json() + "\n")?;

    let mut csv = net.names().join(",");
    csv.push('\n');
    for r in 0..args.n {
        let row: Vec<String> = columns.iter().map(|c| c[r].to_string()).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write(&names[1], csv)?;

    let mut fair = String::new();
    writeln!(fair, "# sensitive={}", net.name(problem.sensitive)).unwrap();
    writeln!(fair, "# target={}", net.name(problem.target)).unwrap();
    for member in fair_feature_set(net, problem.target, problem.sensitive, args.max_k)? {
        writeln!(fair, "{}", net.name(member.node)).unwrap();
    }
    write(&names[2], fair)?;

    let manifest = RunManifest::new("synth", args, &[], names)?;
    manifest.write(&sibling(&args.out_prefix, &format!("{stem}.manifest.json")))
}
