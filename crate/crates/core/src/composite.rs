use serde::{Deserialize, Serialize};

/// Composite regularizer family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularizer {
    /// `phi(x) = (lambda/2) ||x||_2^2`
    #[default]
    L2Sq,
    /// `phi(x) = lambda ||x||_1`
    L1,
}

/// A regularizer together with its weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Composite {
    pub kind: Regularizer,
    pub lambda: f64,
}

impl Composite {
    pub fn new(kind: Regularizer, lambda: f64) -> Self {
        Self { kind, lambda }
    }

    pub fn none() -> Self {
        Self::new(Regularizer::L2Sq, 0.0)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self.kind {
            Regularizer::L2Sq => 0.5 * self.lambda * x.iter().map(|v| v * v).sum::<f64>(),
            Regularizer::L1 => self.lambda * x.iter().map(|v| v.abs()).sum::<f64>(),
        }
    }

    /// `argmin_x (1/2)||x - v||^2 + step * phi(x)`.
    pub fn prox(&self, v: &[f64], step: f64) -> Vec<f64> {
        let t = step * self.lambda;
        match self.kind {
            Regularizer::L2Sq => v.iter().map(|a| a / (1.0 + t)).collect(),
            Regularizer::L1 => v.iter().map(|&a| soft_threshold(a, t)).collect(),
        }
    }
}

pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}
