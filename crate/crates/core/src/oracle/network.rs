//! Discrete Bayesian networks: construction, text serialization, random
//! generation and ancestral sampling.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::Dag;
use crate::dataset::{ColumnMeta, DataTable};
use crate::error::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    names: Vec<String>,
    cards: Vec<usize>,
    dag: Dag,
    /// `cpts[v][row][state]`; `row` enumerates parent assignments with the
    /// last listed parent varying fastest.
    cpts: Vec<Vec<Vec<f64>>>,
    topo: Vec<usize>,
}

impl BayesNet {
    pub fn new(
        names: Vec<String>,
        cards: Vec<usize>,
        parents: Vec<Vec<usize>>,
        cpts: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let n = names.len();
        if cards.len() != n || parents.len() != n || cpts.len() != n {
            return Err(Error::InvalidNetwork("per-node vectors differ in length".into()));
        }
        if let Some(v) = cards.iter().position(|&c| c == 0) {
            return Err(Error::InvalidNetwork(format!("node `{}` has no states", names[v])));
        }
        let dag = Dag::from_parents(parents)?;
        for v in 0..n {
            let rows: usize = dag.parents(v).iter().map(|&p| cards[p]).product();
            if cpts[v].len() != rows {
                return Err(Error::InvalidNetwork(format!(
                    "node `{}` has {} CPT rows, expected {rows}",
                    names[v],
                    cpts[v].len()
                )));
            }
            for row in &cpts[v] {
                if row.len() != cards[v] {
                    return Err(Error::InvalidNetwork(format!(
                        "node `{}` has a CPT row of width {}",
                        names[v],
                        row.len()
                    )));
                }
                if row.iter().any(|&p| !(p >= 0.0)) || (row.iter().sum::<f64>() - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::InvalidNetwork(format!(
                        "node `{}` has a CPT row that is not a distribution",
                        names[v]
                    )));
                }
            }
        }
        let topo = dag.topological_order();
        Ok(Self {
            names,
            cards,
            dag,
            cpts,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn cardinality(&self, v: usize) -> usize {
        self.cards[v]
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        self.dag.parents(v)
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn cpt(&self, v: usize) -> &[Vec<f64>] {
        &self.cpts[v]
    }

    /// CPT row index of `v` under a full assignment.
    pub fn row_index(&self, v: usize, assignment: &[u32]) -> usize {
        self.dag
            .parents(v)
            .iter()
            .fold(0, |acc, &p| acc * self.cards[p] + assignment[p] as usize)
    }

    /// P(v = assignment[v] | parents as in assignment).
    pub fn local_prob(&self, v: usize, assignment: &[u32]) -> f64 {
        self.cpts[v][self.row_index(v, assignment)][assignment[v] as usize]
    }

    /// `n` i.i.d. rows by ancestral sampling; returns one vector per node.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec<u32>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut columns = vec![Vec::with_capacity(n); self.len()];
        let mut row = vec![0u32; self.len()];
        for _ in 0..n {
            for &v in &self.topo {
                let probs = &self.cpts[v][self.row_index(v, &row)];
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut state = probs.len() - 1;
                for (s, &p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        state = s;
                        break;
                    }
                }
                row[v] = state as u32;
            }
            for (col, &s) in columns.iter_mut().zip(&row) {
                col.push(s);
            }
        }
        columns
    }

    /// Sampled rows as a table with the given role columns.
    pub fn sample_table(&self, n: usize, seed: u64, sensitive: usize, target: usize) -> Result<DataTable> {
        let metas = self
            .names
            .iter()
            .zip(&self.cards)
            .map(|(name, &c)| ColumnMeta::numbered(name.clone(), c))
            .collect();
        DataTable::new(self.sample(n, seed), metas, sensitive, target)
    }

    pub fn to_spec(&self) -> NetSpec {
        NetSpec {
            nodes: (0..self.len())
                .map(|v| NodeSpec {
                    name: self.names[v].clone(),
                    states: self.cards[v],
                    parents: self.dag.parents(v).iter().map(|&p| self.names[p].clone()).collect(),
                    cpt: self.cpts[v].clone(),
                })
                .collect(),
        }
    }

    pub fn from_spec(spec: &NetSpec) -> Result<Self> {
        let names: Vec<String> = spec.nodes.iter().map(|n| n.name.clone()).collect();
        let parents = spec
            .nodes
            .iter()
            .map(|node| {
                node.parents
                    .iter()
                    .map(|p| {
                        names
                            .iter()
                            .position(|n| n == p)
                            .ok_or_else(|| Error::InvalidNetwork(format!("unknown parent `{p}`")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        BayesNet::new(
            names,
            spec.nodes.iter().map(|n| n.states).collect(),
            parents,
            spec.nodes.iter().map(|n| n.cpt.clone()).collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("network spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// On-disk form of a network: one entry per node with its parents by name
/// and one CPT row per parent assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetSpec {
    pub nodes: Vec<NodeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    pub states: usize,
    pub parents: Vec<String>,
    pub cpt: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomNetConfig {
    pub nodes: usize,
    pub edge_prob: f64,
    /// Cardinalities drawn uniformly from this list.
    pub cardinalities: Vec<usize>,
    /// Every CPT entry is at least this large.
    pub min_prob: f64,
}

impl Default for RandomNetConfig {
    fn default() -> Self {
        Self {
            nodes: 12,
            edge_prob: 0.25,
            cardinalities: vec![2, 3],
            min_prob: 0.05,
        }
    }
}

/// A random network with a sensitive root and a binary target sink.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticProblem {
    pub net: BayesNet,
    pub sensitive: usize,
    pub target: usize,
}

impl SyntheticProblem {
    pub fn sample_table(&self, n: usize, seed: u64) -> Result<DataTable> {
        self.net.sample_table(n, seed, self.sensitive, self.target)
    }
}

/// Erdős–Rényi DAG over a random topological order. The first node of that
/// order becomes the sensitive attribute and the last one the target; both
/// are binary. CPT rows are flat-Dirichlet draws mixed toward uniform so no
/// entry falls below `min_prob`.
pub fn random_problem(cfg: &RandomNetConfig, seed: u64) -> Result<SyntheticProblem> {
    if cfg.nodes < 2 {
        return Err(Error::InvalidConfig("need at least two nodes".into()));
    }
    if !(0.0..=1.0).contains(&cfg.edge_prob) {
        return Err(Error::InvalidConfig(format!("edge probability {} not in [0, 1]", cfg.edge_prob)));
    }
    if cfg.cardinalities.is_empty() || cfg.cardinalities.contains(&0) {
        return Err(Error::InvalidConfig("cardinalities must be positive".into()));
    }
    let max_card = *cfg.cardinalities.iter().max().unwrap();
    if cfg.min_prob < 0.0 || cfg.min_prob * max_card as f64 >= 1.0 {
        return Err(Error::InvalidConfig(format!("min_prob {} too large", cfg.min_prob)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.nodes;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut parents = vec![Vec::new(); n];
    for j in 1..n {
        for i in 0..j {
            if rng.random::<f64>() < cfg.edge_prob {
                parents[order[j]].push(order[i]);
            }
        }
    }
    for ps in &mut parents {
        ps.sort_unstable();
    }
    let sensitive = order[0];
    let target = order[n - 1];
    let cards: Vec<usize> = (0..n)
        .map(|v| {
            let c = cfg.cardinalities[rng.random_range(0..cfg.cardinalities.len())];
            if v == sensitive || v == target {
                2
            } else {
                c
            }
        })
        .collect();
    let cpts = (0..n)
        .map(|v| {
            let rows: usize = parents[v].iter().map(|&p| cards[p]).product();
            (0..rows).map(|_| dirichlet_row(&mut rng, cards[v], cfg.min_prob)).collect()
        })
        .collect();
    let names = (0..n).map(|v| format!("X{v}")).collect();
    Ok(SyntheticProblem {
        net: BayesNet::new(names, cards, parents, cpts)?,
        sensitive,
        target,
    })
}

fn dirichlet_row(rng: &mut impl Rng, k: usize, floor: f64) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    let scale = 1.0 - floor * k as f64;
    let mut row: Vec<f64> = draws.iter().map(|d| floor + scale * d / total).collect();
    // absorb rounding so rows sum to one within 1e-12
    let excess: f64 = row.iter().sum::<f64>() - 1.0;
    row[k - 1] -= excess;
    row
}
