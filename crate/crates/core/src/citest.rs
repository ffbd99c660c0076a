//! G² conditional-independence testing on categorical columns.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::DataTable;
use crate::error::{Error, Result};
use crate::special::chi2_sf;

/// Tests need at least this many rows per degree of freedom to be trusted.
pub const ROWS_PER_DOF: usize = 10;

/// Dense counting is used while the full stratum × cell grid stays below this.
const DENSE_CELL_LIMIT: u64 = 1 << 22;

/// One realized assignment of the conditioning set with its |X|×|Y| counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub assignment: Vec<u32>,
    /// Row-major, `x_card` rows by `y_card` columns.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratifiedCounts {
    pub x_card: usize,
    pub y_card: usize,
    /// Ordered by assignment; strata without rows are absent.
    pub strata: Vec<Stratum>,
}

impl StratifiedCounts {
    /// Single-stratum table, mostly for hand-built examples.
    pub fn single(x_card: usize, y_card: usize, counts: Vec<u64>) -> Self {
        Self::from_strata(x_card, y_card, vec![counts])
    }

    pub fn from_strata(x_card: usize, y_card: usize, strata: Vec<Vec<u64>>) -> Self {
        let strata = strata
            .into_iter()
            .enumerate()
            .map(|(i, counts)| {
                assert_eq!(counts.len(), x_card * y_card, "stratum {i} has the wrong shape");
                Stratum {
                    assignment: vec![i as u32],
                    counts,
                }
            })
            .collect();
        Self { x_card, y_card, strata }
    }

    pub fn total(&self) -> u64 {
        self.strata.iter().flat_map(|s| &s.counts).sum()
    }
}

fn check_indices(table: &DataTable, x: usize, y: usize, cond: &[usize]) -> Result<()> {
    let n = table.n_columns();
    if x >= n || y >= n || cond.iter().any(|&c| c >= n) {
        return Err(Error::InvalidIndices(format!("column index out of range (have {n})")));
    }
    if x == y {
        return Err(Error::InvalidIndices(format!("x and y are both column {x}")));
    }
    if cond.contains(&x) || cond.contains(&y) {
        return Err(Error::InvalidIndices(
            "conditioning set contains a tested column".into(),
        ));
    }
    let mut sorted = cond.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidIndices("duplicate index in conditioning set".into()));
    }
    Ok(())
}

/// Counts (x, y) co-occurrences within each realized stratum of `cond`.
pub fn contingency(
    table: &DataTable,
    x: usize,
    y: usize,
    cond: &[usize],
) -> Result<StratifiedCounts> {
    check_indices(table, x, y, cond)?;
    let x_card = table.cardinality(x);
    let y_card = table.cardinality(y);
    let cells = (x_card * y_card) as u64;
    let xs = table.column(x);
    let ys = table.column(y);
    let cond_cols: Vec<&[u32]> = cond.iter().map(|&c| table.column(c)).collect();
    let cond_cards: Vec<u64> = cond.iter().map(|&c| table.cardinality(c) as u64).collect();

    let space = cond_cards
        .iter()
        .try_fold(1u64, |acc, &c| acc.checked_mul(c))
        .and_then(|s| s.checked_mul(cells));

    let strata = match space {
        Some(total) if total <= DENSE_CELL_LIMIT => {
            let n_strata = (total / cells) as usize;
            let mut grid = vec![0u64; total as usize];
            for row in 0..table.n_rows() {
                let mut key = 0usize;
                for (col, &card) in cond_cols.iter().zip(&cond_cards) {
                    key = key * card as usize + col[row] as usize;
                }
                grid[key * cells as usize + xs[row] as usize * y_card + ys[row] as usize] += 1;
            }
            let mut strata = Vec::new();
            for key in 0..n_strata {
                let counts = &grid[key * cells as usize..(key + 1) * cells as usize];
                if counts.iter().any(|&c| c > 0) {
                    strata.push(Stratum {
                        assignment: decode_key(key, &cond_cards),
                        counts: counts.to_vec(),
                    });
                }
            }
            strata
        }
        _ => {
            let mut map: BTreeMap<Vec<u32>, Vec<u64>> = BTreeMap::new();
            for row in 0..table.n_rows() {
                let key: Vec<u32> = cond_cols.iter().map(|col| col[row]).collect();
                let counts = map.entry(key).or_insert_with(|| vec![0; cells as usize]);
                counts[xs[row] as usize * y_card + ys[row] as usize] += 1;
            }
            map.into_iter()
                .map(|(assignment, counts)| Stratum { assignment, counts })
                .collect()
        }
    };
    Ok(StratifiedCounts {
        x_card,
        y_card,
        strata,
    })
}

fn decode_key(mut key: usize, cards: &[u64]) -> Vec<u32> {
    let mut out = vec![0u32; cards.len()];
    for (slot, &card) in out.iter_mut().zip(cards).rev() {
        *slot = (key % card as usize) as u32;
        key /= card as usize;
    }
    out
}

/// G² contribution and degrees of freedom of one stratum.
pub fn stratum_g2(x_card: usize, y_card: usize, counts: &[u64]) -> (f64, usize) {
    let mut row_tot = vec![0u64; x_card];
    let mut col_tot = vec![0u64; y_card];
    for i in 0..x_card {
        for j in 0..y_card {
            let c = counts[i * y_card + j];
            row_tot[i] += c;
            col_tot[j] += c;
        }
    }
    let total: u64 = row_tot.iter().sum();
    if total == 0 {
        return (0.0, 0);
    }
    let mut g2 = 0.0;
    for i in 0..x_card {
        for j in 0..y_card {
            let observed = counts[i * y_card + j];
            if observed == 0 {
                continue;
            }
            let expected = row_tot[i] as f64 * col_tot[j] as f64 / total as f64;
            g2 += observed as f64 * (observed as f64 / expected).ln();
        }
    }
    let rows = row_tot.iter().filter(|&&r| r > 0).count();
    let cols = col_tot.iter().filter(|&&c| c > 0).count();
    (2.0 * g2, (rows - 1) * (cols - 1))
}

/// Likelihood-ratio statistic summed over strata, with degrees of freedom
/// counted from the non-empty margins of each stratum (floored at 1).
pub fn g2_statistic(counts: &StratifiedCounts) -> (f64, usize) {
    let (g2, dof) = counts
        .strata
        .iter()
        .map(|s| stratum_g2(counts.x_card, counts.y_card, &s.counts))
        .fold((0.0, 0), |(g, d), (sg, sd)| (g + sg, d + sd));
    (g2.max(0.0), dof.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiTestResult {
    pub g2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub reliable: bool,
    pub independent: bool,
}

/// Tests X ⫫ Y | cond at level `alpha`. Tests with fewer than ten rows per
/// degree of freedom are flagged unreliable and reported as independent.
pub fn ci_test(
    table: &DataTable,
    x: usize,
    y: usize,
    cond: &[usize],
    alpha: f64,
) -> Result<CiTestResult> {
    // canonical orientation so (x, y) and (y, x) sum in the same order
    let (a, b) = if x < y { (x, y) } else { (y, x) };
    let counts = contingency(table, a, b, cond)?;
    let (g2, dof) = g2_statistic(&counts);
    let p_value = chi2_sf(g2, dof)?;
    let reliable = table.n_rows() >= ROWS_PER_DOF * dof;
    Ok(CiTestResult {
        g2,
        dof,
        p_value,
        reliable,
        independent: !reliable || p_value > alpha,
    })
}

/// How far [`is_dep`] searches the conditioning pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SubsetSearch {
    /// Every subset with at most this many members.
    UpTo(usize),
    /// Only the whole pool.
    FullSetOnly,
}

impl Default for SubsetSearch {
    fn default() -> Self {
        SubsetSearch::UpTo(3)
    }
}

impl fmt::Display for SubsetSearch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetSearch::UpTo(k) => write!(f, "{k}"),
            SubsetSearch::FullSetOnly => f.write_str("full"),
        }
    }
}

impl FromStr for SubsetSearch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" | "inf" => Ok(SubsetSearch::FullSetOnly),
            other => other
                .parse()
                .map(SubsetSearch::UpTo)
                .map_err(|_| Error::InvalidConfig(format!("max_k must be an integer or `full`, got `{s}`"))),
        }
    }
}

impl From<SubsetSearch> for String {
    fn from(s: SubsetSearch) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for SubsetSearch {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A test run during a dependence search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub x: usize,
    pub y: usize,
    pub z: Vec<usize>,
    pub g2: f64,
    pub dof: usize,
    pub p: f64,
    pub reliable: bool,
    pub independent: bool,
}

impl TestRecord {
    pub fn new(x: usize, y: usize, z: Vec<usize>, r: &CiTestResult) -> Self {
        Self {
            x,
            y,
            z,
            g2: r.g2,
            dof: r.dof,
            p: r.p_value,
            reliable: r.reliable,
            independent: r.independent,
        }
    }

    pub fn result(&self) -> CiTestResult {
        CiTestResult {
            g2: self.g2,
            dof: self.dof,
            p_value: self.p,
            reliable: self.reliable,
            independent: self.independent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepOutcome {
    pub dependent: bool,
    /// The first subset that certified independence.
    pub separator: Option<Vec<usize>>,
    pub tests: Vec<TestRecord>,
}

/// Conditioning subsets of `pool` in canonical order: by size, then
/// lexicographically by column index.
pub fn candidate_subsets(pool: &[usize], search: SubsetSearch) -> Vec<Vec<usize>> {
    let mut sorted = pool.to_vec();
    sorted.sort_unstable();
    match search {
        SubsetSearch::FullSetOnly => vec![sorted],
        SubsetSearch::UpTo(k) => {
            let mut out = Vec::new();
            for size in 0..=k.min(sorted.len()) {
                combinations(&sorted, size, &mut out);
            }
            out
        }
    }
}

fn combinations(items: &[usize], size: usize, out: &mut Vec<Vec<usize>>) {
    let n = items.len();
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // rightmost position that can still move
        let mut i = size;
        while i > 0 && idx[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Subset-search dependence: X and Y are dependent unless some subset of
/// the pool yields a reliable independence. Stops at the first separator.
pub fn dep_search(
    table: &DataTable,
    x: usize,
    y: usize,
    pool: &[usize],
    search: SubsetSearch,
    alpha: f64,
) -> Result<DepOutcome> {
    let mut tests = Vec::new();
    for z in candidate_subsets(pool, search) {
        let r = ci_test(table, x, y, &z, alpha)?;
        tests.push(TestRecord::new(x, y, z.clone(), &r));
        if r.reliable && r.independent {
            return Ok(DepOutcome {
                dependent: false,
                separator: Some(z),
                tests,
            });
        }
    }
    Ok(DepOutcome {
        dependent: true,
        separator: None,
        tests,
    })
}

pub fn is_dep(
    table: &DataTable,
    x: usize,
    y: usize,
    pool: &[usize],
    search: SubsetSearch,
    alpha: f64,
) -> Result<bool> {
    Ok(dep_search(table, x, y, pool, search, alpha)?.dependent)
}
