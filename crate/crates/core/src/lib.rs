//! Fair streaming feature selection.
//!
//! Features arrive one at a time. Each one is routed either into the blanket
//! of the sensitive attribute (`mb_s`) or the blanket of the target (`mb_t`)
//! using G² conditional-independence tests, and features that were parked in
//! `mb_s` are later rescued into `mb_t` once they turn out to be marginally
//! independent of the sensitive attribute. The returned `mb_t` is the fair
//! feature set.
//!
//! Besides the selector this crate carries everything needed to check it:
//!
//! * [`dataset`]: CSV ingestion, categorical encoding and the feature stream.
//! * [`citest`]: contingency tables, the G² statistic and the subset-search
//!   dependence predicate.
//! * [`selector`]: the streaming state machine, a relevance-only baseline and
//!   the fairness audit.
//! * [`oracle`]: discrete Bayesian networks with d-separation, Markov
//!   blankets, interventional distributions and the K-fairness gap.
//! * [`metrics`]: ACC, SPD and PE.
//! * [`eval`]: Naive Bayes, logistic regression, KNN and stratified
//!   cross-validation.

pub mod citest;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod metrics;
pub mod oracle;
pub mod selector;
pub mod special;

pub use citest::{ci_test, contingency, g2_statistic, is_dep, CiTestResult, SubsetSearch};
pub use dataset::{load_csv, make_stream, ColumnMeta, DataTable, FeatureStream, LoadOptions, StreamOrder};
pub use error::{Error, Result};
pub use selector::{
    audit_fairness, baseline_relevance_only, run, Action, SelectionState, SelectorConfig,
};
pub use special::chi2_sf;
