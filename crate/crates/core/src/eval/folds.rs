use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stratified assignment of rows to folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Shuffles each class with `seed`, lays the classes end to end and deals
    /// rows round-robin, so fold sizes differ by at most one and every fold
    /// gets its share of each label.
    pub fn stratified(labels: &[u8], k: usize, seed: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidConfig(format!("need at least two folds, got {k}")));
        }
        if k > labels.len() {
            return Err(Error::InvalidConfig(format!("{k} folds for {} rows", labels.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dealt = Vec::with_capacity(labels.len());
        for class in [0u8, 1] {
            let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            rows.shuffle(&mut rng);
            dealt.extend(rows);
        }
        let mut assignments = vec![0; labels.len()];
        for (pos, row) in dealt.into_iter().enumerate() {
            assignments[row] = pos % k;
        }
        Ok(Self { k, seed, assignments })
    }

    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] != fold).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_and_stratified() {
        let labels: Vec<u8> = (0..103).map(|i| (i % 3 == 0) as u8).collect();
        let plan = FoldPlan::stratified(&labels, 10, 4).unwrap();
        let sizes: Vec<usize> = (0..10).map(|f| plan.test_rows(f).len()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for f in 0..10 {
            let pos = plan.test_rows(f).iter().filter(|&&i| labels[i] == 1).count();
            assert!((3..=4).contains(&pos), "fold {f} has {pos} positives");
        }
        assert_eq!(plan, FoldPlan::stratified(&labels, 10, 4).unwrap());
    }

    #[test]
    fn rejects_bad_k() {
        assert!(FoldPlan::stratified(&[0, 1], 1, 0).is_err());
        assert!(FoldPlan::stratified(&[0, 1], 3, 0).is_err());
    }
}
