use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, Predict};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrParams {
    pub epochs: usize,
    pub rate: f64,
    pub l2: f64,
}

impl Default for LrParams {
    fn default() -> Self {
        Self {
            epochs: 500,
            rate: 0.1,
            l2: 1e-4,
        }
    }
}

/// Logistic regression on one-hot encoded categories, fitted by full-batch
/// gradient descent from zero. With no feature columns only the bias is
/// fitted, which predicts the majority class everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    offsets: Vec<usize>,
    cards: Vec<usize>,
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LogisticModel {
    pub fn zeros(cards: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(cards.len());
        let mut dim = 0;
        for &c in cards {
            offsets.push(dim);
            dim += c;
        }
        Self {
            offsets,
            cards: cards.to_vec(),
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    fn logit(&self, row: &[u32]) -> f64 {
        row.iter()
            .enumerate()
            .filter(|&(j, &code)| (code as usize) < self.cards[j])
            .fold(self.bias, |acc, (j, &code)| acc + self.weights[self.offsets[j] + code as usize])
    }

    pub fn probability(&self, row: &[u32]) -> f64 {
        sigmoid(self.logit(row))
    }

    /// Mean log-loss plus `l2 / 2 · ‖w‖²` (bias unpenalized), with its
    /// gradient as (weights, bias).
    pub fn loss_and_gradient(&self, x: &FeatureMatrix, y: &[u8], l2: f64) -> (f64, Vec<f64>, f64) {
        let n = x.n_rows as f64;
        let mut loss = 0.0;
        let mut grad = vec![0.0; self.dim()];
        let mut grad_b = 0.0;
        for i in 0..x.n_rows {
            let row = x.row(i);
            let z = self.logit(row);
            let label = y[i] as f64;
            // -[y ln σ(z) + (1-y) ln(1-σ(z))] = softplus(z) - y z
            loss += softplus(z) - label * z;
            let r = sigmoid(z) - label;
            grad_b += r;
            for (j, &code) in row.iter().enumerate() {
                if (code as usize) < self.cards[j] {
                    grad[self.offsets[j] + code as usize] += r;
                }
            }
        }
        let norm2: f64 = self.weights.iter().map(|w| w * w).sum();
        let loss = loss / n + 0.5 * l2 * norm2;
        for (g, w) in grad.iter_mut().zip(&self.weights) {
            *g = *g / n + l2 * w;
        }
        (loss, grad, grad_b / n)
    }

    pub fn fit(x: &FeatureMatrix, y: &[u8], params: &LrParams) -> Result<Self> {
        if x.n_rows != y.len() {
            return Err(Error::LengthMismatch { left: x.n_rows, right: y.len() });
        }
        if x.n_rows == 0 {
            return Err(Error::Empty);
        }
        let mut model = Self::zeros(&x.cards);
        for epoch in 0..params.epochs {
            let (loss, grad, grad_b) = model.loss_and_gradient(x, y, params.l2);
            if !loss.is_finite() {
                return Err(Error::NonFinite { epoch, loss });
            }
            for (w, g) in model.weights.iter_mut().zip(&grad) {
                *w -= params.rate * g;
            }
            model.bias -= params.rate * grad_b;
        }
        if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
            return Err(Error::NonFinite {
                epoch: params.epochs,
                loss: f64::NAN,
            });
        }
        Ok(model)
    }
}

impl Predict for LogisticModel {
    fn predict(&self, row: &[u32]) -> u8 {
        // exactly 0.5 goes to class 0
        (self.probability(row) > 0.5) as u8
    }
}
