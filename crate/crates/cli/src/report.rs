use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use fairsfs_core::eval::CvReport;

use crate::error::CliError;
use crate::evaluate::REPORT;
use crate::manifest::{self, RunManifest};

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Directory holding one evaluate output directory per run.
    #[arg(long)]
    pub runs: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub name: String,
    pub classifier: String,
    pub features: String,
    pub acc: f64,
    pub spd: f64,
    pub pe: Option<f64>,
}

fn load_row(name: String, dir: &Path) -> Result<RunRow, CliError> {
    let path = dir.join(REPORT);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let report = CvReport::from_jsonl(&text).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    let classifier = RunManifest::read(&dir.join(manifest::FILE_NAME))
        .ok()
        .and_then(|m| m.config.get("classifier").and_then(|c| c.as_str()).map(str::to_string))
        .unwrap_or_else(|| "?".into());
    let counts: Vec<usize> = report.folds.iter().map(|f| f.features.len()).collect();
    let features = match (counts.iter().min(), counts.iter().max()) {
        (Some(lo), Some(hi)) if lo == hi => lo.to_string(),
        (Some(lo), Some(hi)) => format!("{lo}-{hi}"),
        _ => "-".into(),
    };
    Ok(RunRow {
        name,
        classifier,
        features,
        acc: report.mean.acc,
        spd: report.mean.spd,
        pe: report.mean.pe,
    })
}

/// Runs found directly in `runs` or in its immediate subdirectories, sorted
/// by name.
pub fn collect(runs: &Path) -> Result<Vec<RunRow>, CliError> {
    let entries = fs::read_dir(runs).map_err(|e| CliError::io(runs, e))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(REPORT).is_file())
        .collect();
    if runs.join(REPORT).is_file() {
        dirs.push(runs.to_path_buf());
    }
    dirs.sort();
    let rows = dirs
        .iter()
        .map(|d| {
            let name = d.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| ".".into());
            load_row(name, d)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(CliError::runtime(format!("no {REPORT} found under {}", runs.display())));
    }
    Ok(rows)
}

/// Aligned table with the best value of each metric marked by `*`: highest
/// ACC, lowest SPD and PE. Missing PE shows as `n/a`.
pub fn render(rows: &[RunRow]) -> String {
    let best_acc = rows.iter().map(|r| r.acc).fold(f64::NEG_INFINITY, f64::max);
    let best_spd = rows.iter().map(|r| r.spd).fold(f64::INFINITY, f64::min);
    let best_pe = rows.iter().filter_map(|r| r.pe).fold(f64::INFINITY, f64::min);
    let mark = |v: f64, best: f64| format!("{v:.4}{}", if v == best { "*" } else { " " });

    let mut table = vec![["run", "classifier", "features", "ACC (higher)", "SPD (lower)", "PE (lower)"].map(String::from).to_vec()];
    for r in rows {
        table.push(vec![
            r.name.clone(),
            r.classifier.clone(),
            r.features.clone(),
            mark(r.acc, best_acc),
            mark(r.spd, best_spd),
            r.pe.map_or_else(|| "n/a".to_string(), |pe| mark(pe, best_pe)),
        ]);
    }
    let widths: Vec<usize> = (0..6).map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap()).collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, &w))| if c < 3 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn execute(args: &ReportArgs) -> Result<(), CliError> {
    print!("{}", render(&collect(&args.runs)?));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(name: &str, acc: f64, spd: f64, pe: Option<f64>) -> RunRow {
        RunRow {
            name: name.into(),
            classifier: "lr".into(),
            features: "2".into(),
            acc,
            spd,
            pe,
        }
    }

    #[test]
    fn single_run_is_one_row() {
        let text = render(&[row("a", 0.7, 0.1, Some(0.05))]);
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().contains("0.7000*"));
    }

    #[test]
    fn missing_pe_is_not_zero() {
        let text = render(&[row("a", 0.7, 0.1, None), row("b", 0.6, 0.2, Some(0.3))]);
        let a = text.lines().nth(1).unwrap();
        assert!(a.ends_with("n/a"), "{a}");
        assert!(!a.contains("0.0000"));
        assert!(text.lines().nth(2).unwrap().contains("0.3000*"));
    }

    #[test]
    fn polarity_of_best_marks() {
        let text = render(&[row("fair", 0.6, 0.02, Some(0.01)), row("base", 0.7, 0.2, Some(0.1))]);
        let fair = text.lines().nth(1).unwrap();
        let base = text.lines().nth(2).unwrap();
        assert!(fair.contains("0.0200*") && fair.contains("0.6000 "));
        assert!(base.contains("0.7000*") && base.contains("0.2000 "));
    }
}
