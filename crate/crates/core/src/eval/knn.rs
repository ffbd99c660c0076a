use super::{FeatureMatrix, Predict};
use crate::error::{Error, Result};

/// k nearest neighbours under Hamming distance on category codes.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    train: FeatureMatrix,
    labels: Vec<u8>,
    k: usize,
}

impl KnnModel {
    pub fn fit(x: &FeatureMatrix, y: &[u8], k: usize) -> Result<Self> {
        if x.n_rows != y.len() {
            return Err(Error::LengthMismatch { left: x.n_rows, right: y.len() });
        }
        if x.n_rows == 0 {
            return Err(Error::Empty);
        }
        if k == 0 || k > x.n_rows {
            return Err(Error::InvalidConfig(format!("k = {k} with {} training rows", x.n_rows)));
        }
        Ok(Self {
            train: x.clone(),
            labels: y.to_vec(),
            k,
        })
    }

    /// Indices of the k nearest rows; distance ties go to the lower index.
    pub fn neighbours(&self, row: &[u32]) -> Vec<usize> {
        let mut dist: Vec<(usize, usize)> = (0..self.train.n_rows)
            .map(|i| {
                let d = self.train.row(i).iter().zip(row).filter(|(a, b)| a != b).count();
                (d, i)
            })
            .collect();
        if self.k < dist.len() {
            dist.select_nth_unstable(self.k - 1);
            dist.truncate(self.k);
        }
        dist.sort_unstable();
        dist.into_iter().map(|(_, i)| i).collect()
    }
}

impl Predict for KnnModel {
    fn predict(&self, row: &[u32]) -> u8 {
        let ones = self.neighbours(row).iter().filter(|&&i| self.labels[i] == 1).count();
        // vote ties go to class 0
        (2 * ones > self.k) as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_match_with_k1() {
        let x = FeatureMatrix::new(3, vec![3, 3], vec![0, 0, 1, 1, 2, 2]);
        let m = KnnModel::fit(&x, &[0, 1, 0], 1).unwrap();
        assert_eq!(m.predict(&[1, 1]), 1);
        assert_eq!(m.predict(&[2, 2]), 0);
    }

    #[test]
    fn k_equal_n_predicts_majority() {
        let x = FeatureMatrix::new(5, vec![2], vec![0, 1, 0, 1, 0]);
        let m = KnnModel::fit(&x, &[1, 1, 1, 0, 0], 5).unwrap();
        for q in 0..2 {
            assert_eq!(m.predict(&[q]), 1);
        }
    }

    #[test]
    fn hand_ranked_neighbours() {
        // distances from query (0,0,0): r0=3 r1=1 r2=2 r3=1 r4=0
        let x = FeatureMatrix::new(
            5,
            vec![2, 2, 2],
            vec![1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0],
        );
        let m = KnnModel::fit(&x, &[0, 1, 0, 1, 0], 3).unwrap();
        assert_eq!(m.neighbours(&[0, 0, 0]), vec![4, 1, 3]);
        assert_eq!(m.predict(&[0, 0, 0]), 1);
        let m4 = KnnModel::fit(&x, &[0, 1, 0, 1, 0], 4).unwrap();
        // 2 vs 2 vote tie
        assert_eq!(m4.neighbours(&[0, 0, 0]), vec![4, 1, 3, 2]);
        assert_eq!(m4.predict(&[0, 0, 0]), 0);
    }

    #[test]
    fn empty_training_set() {
        let x = FeatureMatrix::new(0, vec![2], vec![]);
        assert!(matches!(KnnModel::fit(&x, &[], 5), Err(Error::Empty)));
    }
}
