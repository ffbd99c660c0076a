//! Accuracy and group-fairness metrics over prediction vectors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    if a == 0 {
        return Err(Error::Empty);
    }
    Ok(())
}

pub fn accuracy(pred: &[u8], truth: &[u8]) -> Result<f64> {
    check_lengths(pred.len(), truth.len())?;
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// Statistical parity difference: the largest gap in positive-prediction
/// rate between any two sensitive groups present in `groups`.
pub fn spd(pred: &[u8], groups: &[u32]) -> Result<f64> {
    check_lengths(pred.len(), groups.len())?;
    let mut tallies: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for (&p, &g) in pred.iter().zip(groups) {
        let e = tallies.entry(g).or_default();
        e.0 += 1;
        e.1 += (p == 1) as usize;
    }
    if tallies.len() < 2 {
        return Err(Error::InsufficientGroups(tallies.len()));
    }
    let rates = tallies.values().map(|&(n, pos)| pos as f64 / n as f64);
    let (lo, hi) = rates.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
    Ok(hi - lo)
}

/// Predictive equality: |FPR(group) − FPR(everyone else)| over actual
/// negatives. `None` when either side has no actual negatives.
pub fn predictive_equality(pred: &[u8], truth: &[u8], groups: &[u32], positive_group: u32) -> Result<Option<f64>> {
    check_lengths(pred.len(), truth.len())?;
    check_lengths(pred.len(), groups.len())?;
    let mut neg = [0usize; 2];
    let mut fp = [0usize; 2];
    for ((&p, &t), &g) in pred.iter().zip(truth).zip(groups) {
        if t == 0 {
            let side = (g == positive_group) as usize;
            neg[side] += 1;
            fp[side] += (p == 1) as usize;
        }
    }
    if neg[0] == 0 || neg[1] == 0 {
        return Ok(None);
    }
    let fpr = |i: usize| fp[i] as f64 / neg[i] as f64;
    Ok(Some((fpr(1) - fpr(0)).abs()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStats {
    pub group: u32,
    pub size: usize,
    pub predicted_positive: usize,
    pub actual_negative: usize,
    pub false_positive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub acc: f64,
    pub spd: f64,
    /// Missing when a side of the PE comparison has no actual negatives.
    pub pe: Option<f64>,
    pub group_stats: Vec<GroupStats>,
}

impl FairnessReport {
    pub fn compute(pred: &[u8], truth: &[u8], groups: &[u32], positive_group: u32) -> Result<Self> {
        let acc = accuracy(pred, truth)?;
        let spd = spd(pred, groups)?;
        let pe = predictive_equality(pred, truth, groups, positive_group)?;
        let mut stats: BTreeMap<u32, GroupStats> = BTreeMap::new();
        for ((&p, &t), &g) in pred.iter().zip(truth).zip(groups) {
            let s = stats.entry(g).or_insert_with(|| GroupStats {
                group: g,
                size: 0,
                predicted_positive: 0,
                actual_negative: 0,
                false_positive: 0,
            });
            s.size += 1;
            s.predicted_positive += (p == 1) as usize;
            s.actual_negative += (t == 0) as usize;
            s.false_positive += (p == 1 && t == 0) as usize;
        }
        Ok(Self {
            acc,
            spd,
            pe,
            group_stats: stats.into_values().collect(),
        })
    }
}
