use super::{FeatureMatrix, Predict};
use crate::error::{Error, Result};

/// Categorical Naive Bayes with additive smoothing on the likelihoods.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    class_counts: [usize; 2],
    /// `tables[feature][class][code]`, each row sums to one.
    tables: Vec<[Vec<f64>; 2]>,
    /// Likelihood given to codes never seen during training.
    unseen: Vec<[f64; 2]>,
}

impl NaiveBayesModel {
    pub fn fit(x: &FeatureMatrix, y: &[u8], smoothing: f64) -> Result<Self> {
        if x.n_rows != y.len() {
            return Err(Error::LengthMismatch { left: x.n_rows, right: y.len() });
        }
        if x.n_rows == 0 {
            return Err(Error::Empty);
        }
        if !(smoothing > 0.0) {
            return Err(Error::InvalidConfig("smoothing must be positive".into()));
        }
        let mut class_counts = [0usize; 2];
        for &label in y {
            class_counts[label as usize] += 1;
        }
        let mut tables = Vec::with_capacity(x.n_cols());
        let mut unseen = Vec::with_capacity(x.n_cols());
        for (j, &card) in x.cards.iter().enumerate() {
            let mut counts = [vec![0usize; card], vec![0usize; card]];
            for i in 0..x.n_rows {
                counts[y[i] as usize][x.row(i)[j] as usize] += 1;
            }
            let table = [0, 1].map(|c| {
                let denom = class_counts[c] as f64 + smoothing * card as f64;
                counts[c].iter().map(|&n| (n as f64 + smoothing) / denom).collect()
            });
            unseen.push([0, 1].map(|c| smoothing / (class_counts[c] as f64 + smoothing * card as f64)));
            tables.push(table);
        }
        Ok(Self {
            class_counts,
            tables,
            unseen,
        })
    }

    /// Conditional table P(feature = code | class).
    pub fn likelihoods(&self, feature: usize, class: usize) -> &[f64] {
        &self.tables[feature][class]
    }

    /// Unnormalized log posterior for both classes.
    pub fn log_scores(&self, row: &[u32]) -> [f64; 2] {
        let n: usize = self.class_counts.iter().sum();
        [0, 1].map(|c| {
            if self.class_counts[c] == 0 {
                return f64::NEG_INFINITY;
            }
            let prior = (self.class_counts[c] as f64 / n as f64).ln();
            row.iter().enumerate().fold(prior, |acc, (j, &code)| {
                let p = self.tables[j][c].get(code as usize).copied().unwrap_or(self.unseen[j][c]);
                acc + p.ln()
            })
        })
    }

    /// Normalized posterior P(class | row).
    pub fn posterior(&self, row: &[u32]) -> [f64; 2] {
        let s = self.log_scores(row);
        let m = s[0].max(s[1]);
        let e = [(s[0] - m).exp(), (s[1] - m).exp()];
        let z = e[0] + e[1];
        [e[0] / z, e[1] / z]
    }
}

impl Predict for NaiveBayesModel {
    fn predict(&self, row: &[u32]) -> u8 {
        let s = self.log_scores(row);
        // ties go to class 0
        (s[1] > s[0]) as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfectly_predictive_feature() {
        let x = FeatureMatrix::new(4, vec![2], vec![0, 0, 1, 1]);
        let y = [0, 0, 1, 1];
        let m = NaiveBayesModel::fit(&x, &y, 1.0).unwrap();
        assert_eq!(m.predict_all(&x), y.to_vec());
    }

    #[test]
    fn no_features_predicts_majority() {
        let x = FeatureMatrix::new(5, vec![], vec![]);
        let m = NaiveBayesModel::fit(&x, &[1, 1, 0, 1, 0], 1.0).unwrap();
        assert!(m.predict_all(&x).iter().all(|&p| p == 1));
        let tie = NaiveBayesModel::fit(&FeatureMatrix::new(2, vec![], vec![]), &[1, 0], 1.0).unwrap();
        assert_eq!(tie.predict(&[]), 0);
    }

    #[test]
    fn hand_multiplied_posterior() {
        // feature a: card 2, feature b: card 3
        let x = FeatureMatrix::new(
            6,
            vec![2, 3],
            vec![0, 0, 0, 1, 1, 2, 1, 2, 0, 1, 1, 0],
        );
        let y = [0, 0, 1, 1, 1, 0];
        let m = NaiveBayesModel::fit(&x, &y, 1.0).unwrap();
        // class 0 rows: (0,0) (0,1) (1,0); class 1 rows: (1,2) (1,2) (0,1)
        // P(a=0|0)=(2+1)/(3+2)  P(b=1|0)=(1+1)/(3+3)
        // P(a=0|1)=(1+1)/(3+2)  P(b=1|1)=(1+1)/(3+3)
        let s0 = 0.5 * (3.0 / 5.0) * (2.0 / 6.0);
        let s1 = 0.5 * (2.0 / 5.0) * (2.0 / 6.0);
        let post = m.posterior(&[0, 1]);
        assert!((post[0] - s0 / (s0 + s1)).abs() < 1e-12);
        for j in 0..2 {
            for c in 0..2 {
                assert!((m.likelihoods(j, c).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unseen_code_uses_smoothing_mass() {
        let x = FeatureMatrix::new(4, vec![2], vec![0, 0, 1, 1]);
        let m = NaiveBayesModel::fit(&x, &[0, 1, 0, 1], 1.0).unwrap();
        let s = m.log_scores(&[5]);
        assert!((s[0] - (0.5f64.ln() + (1.0f64 / 4.0).ln())).abs() < 1e-12);
    }
}
