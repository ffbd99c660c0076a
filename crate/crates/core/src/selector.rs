//! Streaming fair feature selection.
//!
//! Every arriving feature is first tested against the sensitive attribute
//! S given subsets of the current `mb_s`. Dependent features are parked in
//! `mb_s`; the rest go to `mb_t` when they depend on the target T given
//! subsets of `mb_t`, and are discarded otherwise. After each arrival (or
//! once at the end, see [`RescueMode`]) members of `mb_s` that are
//! marginally independent of S but dependent on T are moved to `mb_t`.
//! Discarded features are never revisited and nothing ever leaves `mb_t`.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::citest::{candidate_subsets, ci_test, dep_search, SubsetSearch, TestRecord};
use crate::dataset::{DataTable, FeatureStream};
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RescueMode {
    /// Rescue pass after every arrival.
    #[default]
    EveryStep,
    /// A single rescue pass once the stream is exhausted.
    FinalOnly,
}

/// Independence check used to rescue a member of `mb_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RescueTest {
    /// Ind(S, A | ∅).
    #[default]
    Marginal,
    /// Ind(S, A | Z) for some Z ⊆ mb_s \ {A} within the subset budget.
    Subsets,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub alpha: f64,
    pub max_k: SubsetSearch,
    pub rescue_mode: RescueMode,
    pub rescue_test: RescueTest,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            max_k: SubsetSearch::default(),
            rescue_mode: RescueMode::default(),
            rescue_test: RescueTest::default(),
        }
    }
}

impl SelectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    ToMbS,
    ToMbT,
    Discarded,
    RescuedToMbT,
}

/// One line of the trace: the feature handled at `step`, every test run to
/// decide it, and the outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: usize,
    pub feature: String,
    pub index: usize,
    pub tests: Vec<TestRecord>,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionState {
    pub mb_s: Vec<usize>,
    pub mb_t: Vec<usize>,
    pub processed: usize,
    pub trace: Vec<TraceEvent>,
    seen: BTreeSet<usize>,
}

impl SelectionState {
    pub fn new() -> Self {
        Self::default()
    }

    /// State with preset blankets, as if those features had already arrived.
    pub fn with_blankets(mb_s: Vec<usize>, mb_t: Vec<usize>) -> Self {
        let seen = mb_s.iter().chain(&mb_t).copied().collect();
        Self {
            processed: mb_s.len() + mb_t.len(),
            mb_s,
            mb_t,
            trace: Vec::new(),
            seen,
        }
    }

    /// Routes one arriving feature into `mb_s`, `mb_t` or the discard pile.
    pub fn classify(&mut self, table: &DataTable, x: usize, cfg: &SelectorConfig) -> Result<Action> {
        if x == table.sensitive_index() || x == table.target_index() {
            return Err(Error::InvalidIndices(format!("`{}` is a role column", table.name(x))));
        }
        if x >= table.n_columns() {
            return Err(Error::InvalidIndices(format!("feature {x} out of range")));
        }
        if !self.seen.insert(x) {
            return Err(Error::Reprocessed(x));
        }
        self.processed += 1;

        let s = table.sensitive_index();
        let t = table.target_index();
        let on_s = dep_search(table, s, x, &self.mb_s, cfg.max_k, cfg.alpha)?;
        let mut tests = on_s.tests;
        let action = if on_s.dependent {
            self.mb_s.push(x);
            Action::ToMbS
        } else {
            let on_t = dep_search(table, t, x, &self.mb_t, cfg.max_k, cfg.alpha)?;
            tests.extend(on_t.tests);
            if on_t.dependent {
                self.mb_t.push(x);
                Action::ToMbT
            } else {
                Action::Discarded
            }
        };
        self.trace.push(TraceEvent {
            step: self.processed,
            feature: table.name(x).to_string(),
            index: x,
            tests,
            action,
        });
        Ok(action)
    }

    /// Moves members of `mb_s` that are independent of S (per
    /// `cfg.rescue_test`) but dependent on T given `mb_t` into `mb_t`,
    /// scanning in insertion order until a pass moves nothing. Returns the
    /// rescued features.
    pub fn rescue(&mut self, table: &DataTable, cfg: &SelectorConfig) -> Result<Vec<usize>> {
        let s = table.sensitive_index();
        let t = table.target_index();
        let mut rescued = Vec::new();
        loop {
            let mut moved = false;
            let mut i = 0;
            while i < self.mb_s.len() {
                let a = self.mb_s[i];
                let mut tests = Vec::new();
                let independent_of_s = match cfg.rescue_test {
                    RescueTest::Marginal => {
                        let r = ci_test(table, s, a, &[], cfg.alpha)?;
                        tests.push(TestRecord::new(s, a, Vec::new(), &r));
                        r.reliable && r.independent
                    }
                    RescueTest::Subsets => {
                        let pool: Vec<usize> = self.mb_s.iter().copied().filter(|&v| v != a).collect();
                        let out = dep_search(table, s, a, &pool, cfg.max_k, cfg.alpha)?;
                        tests.extend(out.tests);
                        !out.dependent
                    }
                };
                let move_it = independent_of_s && {
                    let on_t = dep_search(table, t, a, &self.mb_t, cfg.max_k, cfg.alpha)?;
                    tests.extend(on_t.tests);
                    on_t.dependent
                };
                if move_it {
                    self.mb_s.remove(i);
                    self.mb_t.push(a);
                    rescued.push(a);
                    moved = true;
                    self.trace.push(TraceEvent {
                        step: self.processed,
                        feature: table.name(a).to_string(),
                        index: a,
                        tests,
                        action: Action::RescuedToMbT,
                    });
                } else {
                    i += 1;
                }
            }
            if !moved {
                return Ok(rescued);
            }
        }
    }

    /// Writes the trace as one JSON object per line.
    pub fn write_trace(&self, mut out: impl Write) -> Result<()> {
        for event in &self.trace {
            serde_json::to_writer(&mut out, event)?;
            out.write_all(b"\n").map_err(|source| Error::Io {
                path: "<trace>".into(),
                source,
            })?;
        }
        Ok(())
    }
}

pub fn step1_classify(
    mut state: SelectionState,
    x: usize,
    table: &DataTable,
    cfg: &SelectorConfig,
) -> Result<SelectionState> {
    state.classify(table, x, cfg)?;
    Ok(state)
}

pub fn step2_rescue(mut state: SelectionState, table: &DataTable, cfg: &SelectorConfig) -> Result<SelectionState> {
    state.rescue(table, cfg)?;
    Ok(state)
}

/// Consumes the stream and returns the selected set (`mb_t`) with the final
/// state.
pub fn run(table: &DataTable, stream: &FeatureStream, cfg: &SelectorConfig) -> Result<(Vec<usize>, SelectionState)> {
    cfg.validate()?;
    stream.validate(table)?;
    let mut state = SelectionState::new();
    for &x in &stream.order {
        state.classify(table, x, cfg)?;
        if cfg.rescue_mode == RescueMode::EveryStep {
            state.rescue(table, cfg)?;
        }
    }
    if cfg.rescue_mode == RescueMode::FinalOnly {
        state.rescue(table, cfg)?;
    }
    Ok((state.mb_t.clone(), state))
}

/// Relevance-only streaming selection: keeps x iff it depends on T given
/// subsets of what was kept so far. No sensitive-attribute handling.
pub fn baseline_relevance_only(table: &DataTable, stream: &FeatureStream, cfg: &SelectorConfig) -> Result<Vec<usize>> {
    cfg.validate()?;
    stream.validate(table)?;
    let t = table.target_index();
    let mut selected = Vec::new();
    for &x in &stream.order {
        if dep_search(table, t, x, &selected, cfg.max_k, cfg.alpha)?.dependent {
            selected.push(x);
        }
    }
    Ok(selected)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub feature: usize,
    pub name: String,
    /// Conditioning set under which the feature tested independent of S.
    pub certificate: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub passed: bool,
    pub entries: Vec<AuditEntry>,
}

/// Every selected feature must test independent of S, either marginally or
/// given some subset of `mb_s` within the subset budget.
pub fn audit_fairness(table: &DataTable, selected: &[usize], mb_s: &[usize], cfg: &SelectorConfig) -> Result<AuditReport> {
    let s = table.sensitive_index();
    let mut entries = Vec::with_capacity(selected.len());
    for &x in selected {
        let pool: Vec<usize> = mb_s.iter().copied().filter(|&v| v != x).collect();
        let mut certificate = None;
        let search = match cfg.max_k {
            // full-set mode still accepts a marginal certificate
            SubsetSearch::FullSetOnly => {
                let mut subsets = vec![Vec::new()];
                subsets.extend(candidate_subsets(&pool, SubsetSearch::FullSetOnly).into_iter().filter(|z| !z.is_empty()));
                subsets
            }
            k => candidate_subsets(&pool, k),
        };
        for z in search {
            let r = ci_test(table, s, x, &z, cfg.alpha)?;
            if r.reliable && r.independent {
                certificate = Some(z);
                break;
            }
        }
        entries.push(AuditEntry {
            feature: x,
            name: table.name(x).to_string(),
            certificate,
        });
    }
    Ok(AuditReport {
        passed: entries.iter().all(|e| e.certificate.is_some()),
        entries,
    })
}

pub fn read_trace(input: impl BufRead) -> Result<Vec<TraceEvent>> {
    let mut events = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|source| Error::Io {
            path: "<trace>".into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(serde_json::from_str(&line)?);
    }
    Ok(events)
}

/// Re-runs every recorded test; returns the first event/test position whose
/// result differs.
pub fn replay_mismatch(table: &DataTable, trace: &[TraceEvent], alpha: f64) -> Result<Option<(usize, usize)>> {
    for (e, event) in trace.iter().enumerate() {
        for (i, rec) in event.tests.iter().enumerate() {
            let r = ci_test(table, rec.x, rec.y, &rec.z, alpha)?;
            if r != rec.result() {
                return Ok(Some((e, i)));
            }
        }
    }
    Ok(None)
}

/// Rebuilds the blankets from the recorded actions alone.
pub fn replay_blankets(trace: &[TraceEvent]) -> (Vec<usize>, Vec<usize>) {
    let mut mb_s = Vec::new();
    let mut mb_t = Vec::new();
    for event in trace {
        match event.action {
            Action::ToMbS => mb_s.push(event.index),
            Action::ToMbT => mb_t.push(event.index),
            Action::Discarded => {}
            Action::RescuedToMbT => {
                mb_s.retain(|&v| v != event.index);
                mb_t.push(event.index);
            }
        }
    }
    (mb_s, mb_t)
}
