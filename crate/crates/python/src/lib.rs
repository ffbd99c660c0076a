//! Python bindings for fair streaming feature selection.
//!
//! Columns are integer codes; names, labels and roles travel with a
//! [`Table`]. Errors in the arguments raise `ValueError`, unreadable files
//! raise `OSError` and everything else raises `RuntimeError`.

use std::cell::RefCell;

use fairsfs_core::eval::{self, ClassifierKind, ClassifierSpec, FeatureMatrix, FeatureSource, Learner};
use fairsfs_core::oracle::{self, BayesNet, RandomNetConfig};
use fairsfs_core::selector::{RescueMode, RescueTest};
use fairsfs_core::{dataset, metrics, ColumnMeta, DataTable, Error, LoadOptions, StreamOrder, SubsetSearch};
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        e if e.is_validation() => PyValueError::new_err(e.to_string()),
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

trait OrRaise<T> {
    fn or_raise(self) -> PyResult<T>;
}

impl<T> OrRaise<T> for fairsfs_core::Result<T> {
    fn or_raise(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn stream_order(order: &str, seed: u64) -> PyResult<StreamOrder> {
    match order {
        "file" => Ok(StreamOrder::FileOrder),
        "shuffle" => Ok(StreamOrder::Shuffle { seed }),
        other => Err(PyValueError::new_err(format!("order must be `file` or `shuffle`, got `{other}`"))),
    }
}

/// Categorical table with one sensitive and one binary target column.
#[pyclass(name = "Table", module = "fairsfs", frozen)]
pub struct Table {
    inner: DataTable,
}

#[pymethods]
impl Table {
    /// Build a table from integer-coded columns. Cardinalities are taken as
    /// one more than the largest code in each column.
    #[new]
    fn new(names: Vec<String>, columns: Vec<Vec<u32>>, sensitive: &str, target: &str) -> PyResult<Self> {
        if names.len() != columns.len() {
            return Err(PyValueError::new_err(format!("{} names for {} columns", names.len(), columns.len())));
        }
        let metas: Vec<ColumnMeta> = names
            .iter()
            .zip(&columns)
            .map(|(n, c)| ColumnMeta::numbered(n.clone(), c.iter().max().map_or(1, |&m| m as usize + 1)))
            .collect();
        let find = |name: &str| {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| to_py(Error::UnknownColumn(name.into())))
        };
        let (s, t) = (find(sensitive)?, find(target)?);
        Ok(Self {
            inner: DataTable::new(columns, metas, s, t).or_raise()?,
        })
    }

    /// Read a CSV with a header row. Numeric columns with many distinct
    /// values are cut into `bins` equal-frequency bins.
    #[staticmethod]
    #[pyo3(signature = (path, target, sensitive, bins = 5))]
    fn from_csv(path: &str, target: &str, sensitive: &str, bins: usize) -> PyResult<Self> {
        let opts = LoadOptions {
            target: target.into(),
            sensitive: sensitive.into(),
            discretize_bins: Some(bins),
        };
        Ok(Self {
            inner: dataset::load_csv(path, &opts).or_raise()?,
        })
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.metas().iter().map(|m| m.name.clone()).collect()
    }

    #[getter]
    fn sensitive(&self) -> usize {
        self.inner.sensitive_index()
    }

    #[getter]
    fn target(&self) -> usize {
        self.inner.target_index()
    }

    #[getter]
    fn dropped_rows(&self) -> usize {
        self.inner.dropped_rows()
    }

    fn column(&self, i: usize) -> PyResult<Vec<u32>> {
        self.check(i)?;
        Ok(self.inner.column(i).to_vec())
    }

    fn labels(&self, i: usize) -> PyResult<Vec<String>> {
        self.check(i)?;
        Ok(self.inner.meta(i).labels.clone())
    }

    fn index(&self, name: &str) -> PyResult<usize> {
        self.inner.column_index(name).or_raise()
    }

    /// Columns other than the sensitive and target ones, minus constants.
    fn candidates(&self) -> Vec<usize> {
        self.inner.candidate_features()
    }

    #[pyo3(signature = (order = "file", seed = 0))]
    fn stream(&self, order: &str, seed: u64) -> PyResult<Vec<usize>> {
        Ok(dataset::make_stream(&self.inner, stream_order(order, seed)?).order)
    }

    fn __len__(&self) -> usize {
        self.inner.n_rows()
    }

    fn __repr__(&self) -> String {
        format!(
            "Table(rows={}, columns={}, sensitive={:?}, target={:?})",
            self.inner.n_rows(),
            self.inner.n_columns(),
            self.inner.name(self.inner.sensitive_index()),
            self.inner.name(self.inner.target_index())
        )
    }
}

impl Table {
    fn check(&self, i: usize) -> PyResult<()> {
        if i < self.inner.n_columns() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("column {i} out of range")))
        }
    }
}

/// Selector settings. `max_k` is an integer or `"full"`.
#[pyclass(name = "Config", module = "fairsfs", frozen)]
pub struct Config {
    inner: fairsfs_core::SelectorConfig,
}

#[pymethods]
impl Config {
    #[new]
    #[pyo3(signature = (alpha = 0.01, max_k = None, rescue_mode = "every_step", rescue_test = "marginal"))]
    fn new(alpha: f64, max_k: Option<&Bound<'_, PyAny>>, rescue_mode: &str, rescue_test: &str) -> PyResult<Self> {
        let max_k = match max_k {
            None => SubsetSearch::default(),
            Some(v) => match v.extract::<usize>() {
                Ok(k) => SubsetSearch::UpTo(k),
                Err(_) => v.extract::<String>()?.parse().or_raise()?,
            },
        };
        let rescue_mode = match rescue_mode {
            "every_step" => RescueMode::EveryStep,
            "final_only" => RescueMode::FinalOnly,
            other => return Err(PyValueError::new_err(format!("unknown rescue_mode `{other}`"))),
        };
        let rescue_test = match rescue_test {
            "marginal" => RescueTest::Marginal,
            "subsets" => RescueTest::Subsets,
            other => return Err(PyValueError::new_err(format!("unknown rescue_test `{other}`"))),
        };
        let inner = fairsfs_core::SelectorConfig {
            alpha,
            max_k,
            rescue_mode,
            rescue_test,
        };
        inner.validate().or_raise()?;
        Ok(Self { inner })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn max_k(&self) -> String {
        self.inner.max_k.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Config(alpha={}, max_k={})", self.inner.alpha, self.inner.max_k)
    }
}

fn config_or_default(cfg: Option<&Config>) -> fairsfs_core::SelectorConfig {
    cfg.map(|c| c.inner).unwrap_or_default()
}

/// Result of one selection run.
#[pyclass(name = "Selection", module = "fairsfs", frozen, get_all)]
pub struct Selection {
    selected: Vec<usize>,
    mb_s: Vec<usize>,
    mb_t: Vec<usize>,
    /// Trace in JSON-lines form, one record per processed feature.
    trace: String,
}

/// Run the streaming selector over `table`.
#[pyfunction]
#[pyo3(signature = (table, config = None, order = "file", seed = 0))]
fn select(table: &Table, config: Option<&Config>, order: &str, seed: u64) -> PyResult<Selection> {
    let cfg = config_or_default(config);
    let stream = dataset::make_stream(&table.inner, stream_order(order, seed)?);
    let (selected, state) = fairsfs_core::run(&table.inner, &stream, &cfg).or_raise()?;
    let mut trace = Vec::new();
    state.write_trace(&mut trace).or_raise()?;
    Ok(Selection {
        selected,
        mb_s: state.mb_s,
        mb_t: state.mb_t,
        trace: String::from_utf8(trace).expect("trace is JSON"),
    })
}

/// Relevance-only selection that ignores the sensitive attribute.
#[pyfunction]
#[pyo3(signature = (table, config = None, order = "file", seed = 0))]
fn baseline(table: &Table, config: Option<&Config>, order: &str, seed: u64) -> PyResult<Vec<usize>> {
    let cfg = config_or_default(config);
    let stream = dataset::make_stream(&table.inner, stream_order(order, seed)?);
    fairsfs_core::baseline_relevance_only(&table.inner, &stream, &cfg).or_raise()
}

/// Whether every selected feature tests independent of the sensitive
/// column, plus the certifying conditioning set of each one (`None` if none).
#[pyfunction]
#[pyo3(signature = (table, selected, mb_s, config = None))]
fn audit(
    table: &Table,
    selected: Vec<usize>,
    mb_s: Vec<usize>,
    config: Option<&Config>,
) -> PyResult<(bool, Vec<(usize, Option<Vec<usize>>)>)> {
    let report = fairsfs_core::audit_fairness(&table.inner, &selected, &mb_s, &config_or_default(config)).or_raise()?;
    Ok((report.passed, report.entries.into_iter().map(|e| (e.feature, e.certificate)).collect()))
}

/// G² test of x ⫫ y | cond. Returns `(g2, dof, p_value, reliable, independent)`.
#[pyfunction]
#[pyo3(signature = (table, x, y, cond = Vec::new(), alpha = 0.01))]
fn ci_test(table: &Table, x: usize, y: usize, cond: Vec<usize>, alpha: f64) -> PyResult<(f64, usize, f64, bool, bool)> {
    let r = fairsfs_core::ci_test(&table.inner, x, y, &cond, alpha).or_raise()?;
    Ok((r.g2, r.dof, r.p_value, r.reliable, r.independent))
}

/// Upper tail of the chi-square distribution.
#[pyfunction]
fn chi2_sf(x: f64, dof: usize) -> PyResult<f64> {
    fairsfs_core::chi2_sf(x, dof).or_raise()
}

/// Discrete Bayesian network.
#[pyclass(name = "Network", module = "fairsfs", frozen)]
pub struct Network {
    inner: BayesNet,
}

#[pymethods]
impl Network {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: BayesNet::from_json(text).or_raise()?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: BayesNet::load(path).or_raise()?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    fn index(&self, name: &str) -> PyResult<usize> {
        self.inner
            .index_of(name)
            .ok_or_else(|| to_py(Error::UnknownColumn(name.into())))
    }

    fn parents(&self, v: usize) -> PyResult<Vec<usize>> {
        self.check(&[v])?;
        Ok(self.inner.parents(v).to_vec())
    }

    /// `n` joint samples as one list of codes per node.
    fn sample(&self, py: Python<'_>, n: usize, seed: u64) -> Vec<Vec<u32>> {
        py.detach(|| self.inner.sample(n, seed))
    }

    fn sample_table(&self, py: Python<'_>, n: usize, seed: u64, sensitive: usize, target: usize) -> PyResult<Table> {
        self.check(&[sensitive, target])?;
        let inner = py.detach(|| self.inner.sample_table(n, seed, sensitive, target)).or_raise()?;
        Ok(Table { inner })
    }

    #[pyo3(signature = (x, y, z = Vec::new()))]
    fn d_separated(&self, x: usize, y: usize, z: Vec<usize>) -> PyResult<bool> {
        self.check(&[x, y])?;
        self.check(&z)?;
        Ok(oracle::d_separated(&self.inner, x, y, &z))
    }

    fn markov_blanket(&self, t: usize) -> PyResult<Vec<usize>> {
        self.check(&[t])?;
        Ok(oracle::markov_blanket(&self.inner, t))
    }

    /// Members of MB(t) that some small subset of MB(s) separates from `s`,
    /// each with its separating set.
    #[pyo3(signature = (t, s, max_k = 3))]
    fn fair_feature_set(&self, t: usize, s: usize, max_k: usize) -> PyResult<Vec<(usize, Vec<usize>)>> {
        self.check(&[t, s])?;
        let members = oracle::fair_feature_set(&self.inner, t, s, max_k).or_raise()?;
        Ok(members.into_iter().map(|m| (m.node, m.certificate)).collect())
    }

    /// P(query | do(v = value) for each pair in `interventions`).
    fn interventional_dist(&self, interventions: Vec<(usize, u32)>, query: usize) -> PyResult<Vec<f64>> {
        oracle::interventional_dist(&self.inner, &interventions, query).or_raise()
    }

    /// Largest change in the output distribution of `predictor` between
    /// do(s = 0) and do(s = 1), over contexts of `k_nodes`. The predictor is
    /// called with a full assignment (list of codes by node) and must return
    /// 0 or 1.
    #[pyo3(signature = (predictor, s, k_nodes = Vec::new()))]
    fn kfair_gap(&self, predictor: &Bound<'_, PyAny>, s: usize, k_nodes: Vec<usize>) -> PyResult<f64> {
        self.check(&[s])?;
        self.check(&k_nodes)?;
        let failure: RefCell<Option<PyErr>> = RefCell::new(None);
        let call = |assignment: &[u32]| -> u8 {
            if failure.borrow().is_some() {
                return 0;
            }
            match predictor.call1((assignment.to_vec(),)).and_then(|r| r.extract::<u8>()) {
                Ok(v @ (0 | 1)) => v,
                Ok(v) => {
                    *failure.borrow_mut() = Some(PyValueError::new_err(format!("predictor returned {v}, expected 0 or 1")));
                    0
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    0
                }
            }
        };
        let gap = oracle::kfair_gap(&self.inner, call, s, &k_nodes).or_raise()?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(gap),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Network(nodes={})", self.inner.len())
    }
}

impl Network {
    fn check(&self, nodes: &[usize]) -> PyResult<()> {
        match nodes.iter().find(|&&v| v >= self.inner.len()) {
            Some(v) => Err(PyValueError::new_err(format!("node {v} out of range"))),
            None => Ok(()),
        }
    }
}

/// Random network whose first node in topological order is a binary
/// sensitive root and whose last is a binary target sink. Returns
/// `(network, sensitive, target)`.
#[pyfunction]
#[pyo3(signature = (nodes = 12, edge_prob = 0.25, seed = 0))]
fn random_problem(nodes: usize, edge_prob: f64, seed: u64) -> PyResult<(Network, usize, usize)> {
    let cfg = RandomNetConfig {
        nodes,
        edge_prob,
        ..Default::default()
    };
    let p = oracle::random_problem(&cfg, seed).or_raise()?;
    Ok((Network { inner: p.net }, p.sensitive, p.target))
}

#[pyfunction]
fn accuracy(pred: Vec<u8>, truth: Vec<u8>) -> PyResult<f64> {
    metrics::accuracy(&pred, &truth).or_raise()
}

/// Largest gap in positive-prediction rate between sensitive groups.
#[pyfunction]
fn spd(pred: Vec<u8>, groups: Vec<u32>) -> PyResult<f64> {
    metrics::spd(&pred, &groups).or_raise()
}

/// Gap in false-positive rate between `positive_group` and everyone else,
/// or `None` if either side has no actual negatives.
#[pyfunction]
fn predictive_equality(pred: Vec<u8>, truth: Vec<u8>, groups: Vec<u32>, positive_group: u32) -> PyResult<Option<f64>> {
    metrics::predictive_equality(&pred, &truth, &groups, positive_group).or_raise()
}

fn classifier(name: &str) -> PyResult<ClassifierSpec> {
    let kind = match name {
        "lr" => ClassifierKind::Lr,
        "nb" => ClassifierKind::Nb,
        "knn" => ClassifierKind::Knn,
        other => return Err(PyValueError::new_err(format!("classifier must be lr, nb or knn, got `{other}`"))),
    };
    Ok(ClassifierSpec::default_for(kind))
}

/// Fit a classifier on `features` of every row of `table` and predict the
/// rows of `table` back.
#[pyfunction]
#[pyo3(signature = (table, features, classifier = "lr"))]
fn fit_predict(py: Python<'_>, table: &Table, features: Vec<usize>, classifier: &str) -> PyResult<Vec<u8>> {
    let spec = self::classifier(classifier)?;
    let rows: Vec<usize> = (0..table.inner.n_rows()).collect();
    let x = FeatureMatrix::from_table(&table.inner, &features, &rows);
    py.detach(|| {
        let model = spec.fit(&x, &table.inner.target_labels())?;
        Ok(model.predict_all(&x))
    })
    .or_raise()
}

/// Stratified k-fold evaluation. With `features=None` the selector is re-run
/// on every training split using `config`. Returns the report as JSON lines:
/// one record per fold followed by the mean.
#[pyfunction]
#[pyo3(signature = (table, features = None, classifier = "lr", folds = 10, seed = 0, positive_group = 1, config = None, order = "file"))]
#[allow(clippy::too_many_arguments)]
fn cross_validate(
    py: Python<'_>,
    table: &Table,
    features: Option<Vec<usize>>,
    classifier: &str,
    folds: usize,
    seed: u64,
    positive_group: u32,
    config: Option<&Config>,
    order: &str,
) -> PyResult<String> {
    let spec = self::classifier(classifier)?;
    let source = match features {
        Some(f) => FeatureSource::Fixed(f),
        None => FeatureSource::PerFold {
            cfg: config_or_default(config),
            order: stream_order(order, seed)?,
        },
    };
    let report = py
        .detach(|| eval::cross_validate(&table.inner, &source, &spec, folds, seed, positive_group))
        .or_raise()?;
    Ok(report.to_jsonl())
}

#[pymodule]
fn fairsfs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Table>()?;
    m.add_class::<Config>()?;
    m.add_class::<Selection>()?;
    m.add_class::<Network>()?;
    m.add_function(wrap_pyfunction!(select, m)?)?;
    m.add_function(wrap_pyfunction!(baseline, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(ci_test, m)?)?;
    m.add_function(wrap_pyfunction!(chi2_sf, m)?)?;
    m.add_function(wrap_pyfunction!(random_problem, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(spd, m)?)?;
    m.add_function(wrap_pyfunction!(predictive_equality, m)?)?;
    m.add_function(wrap_pyfunction!(fit_predict, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
