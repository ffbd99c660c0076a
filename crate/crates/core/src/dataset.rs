//! Categorical dataset ingestion and the ordered feature stream.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric columns with more distinct values than this are discretized.
pub const DISCRETIZE_THRESHOLD: usize = 10;
pub const DEFAULT_BINS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    /// Original category strings; the index is the integer code.
    pub labels: Vec<String>,
}

impl ColumnMeta {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Result<Self> {
        let name = name.into();
        let unique: BTreeSet<&String> = labels.iter().collect();
        if labels.is_empty() {
            return Err(Error::InvalidTable(format!("column `{name}` has no categories")));
        }
        if unique.len() != labels.len() {
            return Err(Error::InvalidTable(format!("column `{name}` has duplicate labels")));
        }
        Ok(Self { name, labels })
    }

    /// Labels `"0"`, `"1"`, ... for already-coded data.
    pub fn numbered(name: impl Into<String>, cardinality: usize) -> Self {
        Self {
            name: name.into(),
            labels: (0..cardinality).map(|c| c.to_string()).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.labels.len()
    }
}

/// Column-oriented categorical data with the sensitive and target columns
/// designated. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    n_rows: usize,
    columns: Vec<Vec<u32>>,
    metas: Vec<ColumnMeta>,
    sensitive: usize,
    target: usize,
    constant: Vec<usize>,
    dropped_rows: usize,
}

impl DataTable {
    pub fn new(
        columns: Vec<Vec<u32>>,
        metas: Vec<ColumnMeta>,
        sensitive: usize,
        target: usize,
    ) -> Result<Self> {
        if columns.len() != metas.len() {
            return Err(Error::InvalidTable(format!(
                "{} columns but {} column descriptions",
                columns.len(),
                metas.len()
            )));
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        for (col, meta) in columns.iter().zip(&metas) {
            if col.len() != n_rows {
                return Err(Error::InvalidTable(format!(
                    "column `{}` has {} rows, expected {n_rows}",
                    meta.name,
                    col.len()
                )));
            }
            let card = meta.cardinality() as u32;
            if let Some(bad) = col.iter().find(|&&c| c >= card) {
                return Err(Error::InvalidTable(format!(
                    "column `{}` holds code {bad} but has {card} categories",
                    meta.name
                )));
            }
        }
        if sensitive >= columns.len() || target >= columns.len() {
            return Err(Error::InvalidIndices(format!(
                "sensitive {sensitive} / target {target} out of range for {} columns",
                columns.len()
            )));
        }
        if sensitive == target {
            return Err(Error::InvalidIndices(
                "sensitive and target must be different columns".into(),
            ));
        }
        if metas[target].cardinality() != 2 {
            return Err(Error::NonBinaryTarget {
                name: metas[target].name.clone(),
                cardinality: metas[target].cardinality(),
            });
        }
        let constant = columns
            .iter()
            .enumerate()
            .filter(|(_, col)| col.iter().collect::<BTreeSet<_>>().len() <= 1)
            .map(|(i, _)| i)
            .collect();
        Ok(Self {
            n_rows,
            columns,
            metas,
            sensitive,
            target,
            constant,
            dropped_rows: 0,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &[u32] {
        &self.columns[i]
    }

    pub fn meta(&self, i: usize) -> &ColumnMeta {
        &self.metas[i]
    }

    pub fn metas(&self) -> &[ColumnMeta] {
        &self.metas
    }

    pub fn cardinality(&self, i: usize) -> usize {
        self.metas[i].cardinality()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.metas[i].name
    }

    pub fn sensitive_index(&self) -> usize {
        self.sensitive
    }

    pub fn target_index(&self) -> usize {
        self.target
    }

    /// Columns holding a single distinct value. They never enter a stream.
    pub fn constant_columns(&self) -> &[usize] {
        &self.constant
    }

    /// Rows removed by listwise deletion during loading.
    pub fn dropped_rows(&self) -> usize {
        self.dropped_rows
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.metas
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Original label of a cell.
    pub fn decode(&self, column: usize, row: usize) -> &str {
        &self.metas[column].labels[self.columns[column][row] as usize]
    }

    /// Columns eligible for the feature stream, in file order.
    pub fn candidate_features(&self) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&i| i != self.sensitive && i != self.target && !self.constant.contains(&i))
            .collect()
    }

    /// Target column as 0/1 labels.
    pub fn target_labels(&self) -> Vec<u8> {
        self.columns[self.target].iter().map(|&c| c as u8).collect()
    }

    /// Subset of rows, in the given order. Category dictionaries are kept.
    pub fn select_rows(&self, rows: &[usize]) -> DataTable {
        let columns: Vec<Vec<u32>> = self
            .columns
            .iter()
            .map(|col| rows.iter().map(|&r| col[r]).collect())
            .collect();
        let constant = columns
            .iter()
            .enumerate()
            .filter(|(_, col)| col.iter().collect::<BTreeSet<_>>().len() <= 1)
            .map(|(i, _)| i)
            .collect();
        DataTable {
            n_rows: rows.len(),
            columns,
            metas: self.metas.clone(),
            sensitive: self.sensitive,
            target: self.target,
            constant,
            dropped_rows: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub target: String,
    pub sensitive: String,
    /// Bin count for numeric columns with more than ten distinct values.
    pub discretize_bins: Option<usize>,
}

impl LoadOptions {
    pub fn new(target: impl Into<String>, sensitive: impl Into<String>) -> Self {
        Self {
            target: target.into(),
            sensitive: sensitive.into(),
            discretize_bins: None,
        }
    }
}

fn is_missing(field: &str) -> bool {
    let f = field.trim();
    f.is_empty() || f == "NA"
}

/// Reads a header-first, comma-separated UTF-8 file into an integer-coded
/// table. Rows with a missing value anywhere are dropped.
pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<DataTable> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&bytes, opts)
}

/// Same as [`load_csv`] on an in-memory buffer.
pub fn parse_csv(bytes: &[u8], opts: &LoadOptions) -> Result<DataTable> {
    let bins = opts.discretize_bins.unwrap_or(DEFAULT_BINS);
    if bins == 0 {
        return Err(Error::InvalidConfig("discretize_bins must be positive".into()));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    };
    let target = find(&opts.target)?;
    let sensitive = find(&opts.sensitive)?;

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    let mut dropped = 0usize;
    for record in reader.records() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::InvalidTable(format!(
                "record has {} fields, header has {}",
                record.len(),
                header.len()
            )));
        }
        if record.iter().any(is_missing) {
            dropped += 1;
            continue;
        }
        for (col, field) in raw.iter_mut().zip(record.iter()) {
            col.push(field.trim().to_string());
        }
    }
    if dropped > 0 {
        log::info!("dropped {dropped} rows with missing values");
    }

    let mut columns = Vec::with_capacity(header.len());
    let mut metas = Vec::with_capacity(header.len());
    for (name, values) in header.iter().zip(raw) {
        let (codes, labels) = match numeric_values(&values) {
            Some(nums) if distinct_count(&nums) > DISCRETIZE_THRESHOLD => equal_frequency_bins(&nums, bins),
            _ => encode_first_occurrence(&values),
        };
        columns.push(codes);
        metas.push(ColumnMeta::new(name.clone(), labels)?);
    }
    let mut table = DataTable::new(columns, metas, sensitive, target)?;
    for &c in table.constant_columns() {
        log::warn!("column `{}` is constant and is excluded from the stream", table.name(c));
    }
    table.dropped_rows = dropped;
    Ok(table)
}

fn numeric_values(values: &[String]) -> Option<Vec<f64>> {
    values
        .iter()
        .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect()
}

fn distinct_count(values: &[f64]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    sorted.len()
}

/// Codes in order of first occurrence.
pub fn encode_first_occurrence(values: &[String]) -> (Vec<u32>, Vec<String>) {
    let mut dict: HashMap<&str, u32> = HashMap::new();
    let mut labels = Vec::new();
    let codes = values
        .iter()
        .map(|v| {
            *dict.entry(v.as_str()).or_insert_with(|| {
                labels.push(v.clone());
                (labels.len() - 1) as u32
            })
        })
        .collect();
    (codes, labels)
}

/// Equal-frequency binning. Sorted position `p` of `n` goes to bin
/// `p * bins / n`; tied values all take the bin of their first sorted
/// position, and empty bins are compacted away.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> (Vec<u32>, Vec<String>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut raw_bin = vec![0usize; n];
    let mut run_bin = 0usize;
    for (pos, &row) in order.iter().enumerate() {
        if pos == 0 || values[order[pos - 1]] != values[row] {
            run_bin = pos * bins / n;
        }
        raw_bin[row] = run_bin;
    }

    // compact to 0..m and record each bin's value range
    let mut used: Vec<usize> = raw_bin.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    used.sort_unstable();
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); used.len()];
    let codes: Vec<u32> = raw_bin
        .iter()
        .zip(values)
        .map(|(b, &v)| {
            let code = used.binary_search(b).expect("bin present");
            let r = &mut ranges[code];
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
            code as u32
        })
        .collect();
    let labels = ranges.iter().map(|(lo, hi)| format!("[{lo},{hi}]")).collect();
    (codes, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum StreamOrder {
    FileOrder,
    Shuffle { seed: u64 },
}

/// Arrival order of the candidate features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureStream {
    pub order: Vec<usize>,
    pub source: StreamOrder,
}

impl FeatureStream {
    /// Checks that the stream is a duplicate-free list of non-role columns.
    pub fn validate(&self, table: &DataTable) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &i in &self.order {
            if i >= table.n_columns() {
                return Err(Error::InvalidIndices(format!("stream index {i} out of range")));
            }
            if i == table.sensitive_index() || i == table.target_index() {
                return Err(Error::InvalidIndices(format!(
                    "stream contains role column `{}`",
                    table.name(i)
                )));
            }
            if !seen.insert(i) {
                return Err(Error::InvalidIndices(format!("stream repeats index {i}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

pub fn make_stream(table: &DataTable, order: StreamOrder) -> FeatureStream {
    let mut features = table.candidate_features();
    if let StreamOrder::Shuffle { seed } = order {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        features.shuffle(&mut rng);
    }
    FeatureStream {
        order: features,
        source: order,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> LoadOptions {
        LoadOptions::new("t", "s")
    }

    #[test]
    fn first_occurrence_codes() {
        let csv = "s,a,t\nm,x,yes\nf,y,no\nm,z,yes\n";
        let table = parse_csv(csv.as_bytes(), &opts()).unwrap();
        assert_eq!(table.column(1), &[0, 1, 2]);
        assert_eq!(table.meta(1).labels, vec!["x", "y", "z"]);
        assert_eq!(table.column(0), &[0, 1, 0]);
        assert_eq!(table.decode(2, 1), "no");
    }

    #[test]
    fn three_distinct_rows() {
        let csv = "s,a,b,t\np,q,r,0\nu,v,w,1\nx,y,z,0\n";
        let table = parse_csv(csv.as_bytes(), &opts()).unwrap();
        for c in 0..3 {
            assert_eq!(table.column(c), &[0, 1, 2]);
        }
        assert_eq!(table.meta(0).labels, vec!["p", "u", "x"]);
    }

    #[test]
    fn missing_rows_dropped_and_counted() {
        let csv = "s,a,t\nm,1,0\nf,,1\nNA,2,1\nf,3,1\n";
        let table = parse_csv(csv.as_bytes(), &opts()).unwrap();
        assert_eq!(table.n_rows(), 2);
        assert_eq!(table.dropped_rows(), 2);
    }

    #[test]
    fn unknown_column_is_an_error() {
        let csv = "s,a,t\nm,1,0\n";
        let err = parse_csv(csv.as_bytes(), &LoadOptions::new("nope", "s")).unwrap_err();
        assert!(matches!(err, Error::UnknownColumn(name) if name == "nope"));
    }

    #[test]
    fn non_binary_target_rejected() {
        let csv = "s,a,t\nm,1,0\nf,1,1\nm,2,2\n";
        let err = parse_csv(csv.as_bytes(), &opts()).unwrap_err();
        assert!(matches!(err, Error::NonBinaryTarget { cardinality: 3, .. }));
    }

    #[test]
    fn constant_column_excluded_from_stream() {
        let csv = "s,a,c,t\nm,1,k,0\nf,2,k,1\nm,1,k,1\n";
        let table = parse_csv(csv.as_bytes(), &opts()).unwrap();
        assert_eq!(table.constant_columns(), &[2]);
        assert_eq!(make_stream(&table, StreamOrder::FileOrder).order, vec![1]);
    }

    #[test]
    fn binning_matches_sort_and_split() {
        let values: Vec<f64> = (1..=100).map(f64::from).rev().collect();
        let (codes, labels) = equal_frequency_bins(&values, 5);
        assert_eq!(labels.len(), 5);
        // independent route: sort, split into five chunks of twenty
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        for (v, code) in values.iter().zip(&codes) {
            let chunk = sorted.iter().position(|s| s == v).unwrap() / 20;
            assert_eq!(*code as usize, chunk);
        }
        for b in 0..5u32 {
            assert_eq!(codes.iter().filter(|&&c| c == b).count(), 20);
        }
        assert_eq!(labels[0], "[1,20]");
    }

    #[test]
    fn ties_share_a_bin() {
        let mut values = vec![0.0; 60];
        values.extend((1..=40).map(f64::from));
        let (codes, _) = equal_frequency_bins(&values, 5);
        assert!(codes[..60].iter().all(|&c| c == 0));
        let distinct: BTreeSet<u32> = codes.iter().copied().collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn numeric_columns_with_few_values_stay_categorical() {
        let mut csv = String::from("s,a,t\n");
        for i in 0..30 {
            csv.push_str(&format!("{},{},{}\n", i % 2, i % 4, i % 2));
        }
        let table = parse_csv(csv.as_bytes(), &opts()).unwrap();
        assert_eq!(table.cardinality(1), 4);
    }

    #[test]
    fn file_order_stream_excludes_roles() {
        let metas: Vec<ColumnMeta> = (0..8).map(|i| ColumnMeta::numbered(format!("c{i}"), 2)).collect();
        let columns = (0..8).map(|i| vec![0, 1, (i % 2) as u32]).collect();
        let table = DataTable::new(columns, metas, 0, 7).unwrap();
        let stream = make_stream(&table, StreamOrder::FileOrder);
        assert_eq!(stream.order, vec![1, 2, 3, 4, 5, 6]);
        let a = make_stream(&table, StreamOrder::Shuffle { seed: 42 });
        let b = make_stream(&table, StreamOrder::Shuffle { seed: 42 });
        assert_eq!(a, b);
        let c = make_stream(&table, StreamOrder::Shuffle { seed: 43 });
        let (mut x, mut y) = (a.order.clone(), c.order.clone());
        x.sort_unstable();
        y.sort_unstable();
        assert_eq!(x, y);
        a.validate(&table).unwrap();
    }

    #[test]
    fn table_rejects_out_of_range_codes() {
        let metas = vec![ColumnMeta::numbered("s", 2), ColumnMeta::numbered("t", 2)];
        let err = DataTable::new(vec![vec![0, 2], vec![0, 1]], metas, 0, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidTable(_)));
    }
}
