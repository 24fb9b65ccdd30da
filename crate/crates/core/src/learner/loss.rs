use serde::{Deserialize, Serialize};

use crate::transforms::SparseVector;

/// One labeled example.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub features: SparseVector,
    pub label: f64,
}

impl Instance {
    pub fn new(features: SparseVector, label: f64) -> Self {
        Self { features, label }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.features.entries().iter().map(|&(i, v)| v * x[i]).sum()
    }
}

/// A convex per-round loss with a subgradient available everywhere.
pub trait RoundLoss {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Adds `weight * grad f(x)` into `out`.
    fn add_gradient(&self, x: &[f64], weight: f64, out: &mut [f64]);

    /// 1 for a mistake, 0 otherwise; `None` when the loss is not a classification loss.
    fn zero_one(&self, x: &[f64]) -> Option<f64>;

    /// Lipschitz constant of the gradient, if the loss is smooth.
    fn smoothness(&self) -> Option<f64>;

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.add_gradient(x, 1.0, &mut g);
        g
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `log(1 + exp(-y <a, x>))`
    #[default]
    Logistic,
    /// `(1/2)(<a, x> - y)^2`
    Squared,
    /// `max(0, 1 - y <a, x>)`; subgradient `-y a` at margin exactly 1.
    Hinge,
}

impl LossKind {
    /// Loss as a function of the score `z = <a, x>`.
    pub fn value_at(self, z: f64, y: f64) -> f64 {
        match self {
            LossKind::Logistic => softplus(-y * z),
            LossKind::Squared => 0.5 * (z - y) * (z - y),
            LossKind::Hinge => (1.0 - y * z).max(0.0),
        }
    }

    /// A subgradient with respect to the score.
    pub fn derivative_at(self, z: f64, y: f64) -> f64 {
        match self {
            LossKind::Logistic => -y * sigmoid(-y * z),
            LossKind::Squared => z - y,
            LossKind::Hinge => {
                if y * z <= 1.0 {
                    -y
                } else {
                    0.0
                }
            }
        }
    }

    /// Bound on the second derivative in the score, if any.
    pub fn curvature(self) -> Option<f64> {
        match self {
            LossKind::Logistic => Some(0.25),
            LossKind::Squared => Some(1.0),
            LossKind::Hinge => None,
        }
    }
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// A linear-model loss on one example.
#[derive(Clone, Copy, Debug)]
pub struct LossFn<'a> {
    pub kind: LossKind,
    pub datum: &'a Instance,
}

impl<'a> LossFn<'a> {
    pub fn new(kind: LossKind, datum: &'a Instance) -> Self {
        Self { kind, datum }
    }
}

impl RoundLoss for LossFn<'_> {
    fn dim(&self) -> usize {
        self.datum.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.kind.value_at(self.datum.dot(x), self.datum.label)
    }

    fn add_gradient(&self, x: &[f64], weight: f64, out: &mut [f64]) {
        let c = weight * self.kind.derivative_at(self.datum.dot(x), self.datum.label);
        if c != 0.0 {
            for &(i, v) in self.datum.features.entries() {
                out[i] += c * v;
            }
        }
    }

    fn zero_one(&self, x: &[f64]) -> Option<f64> {
        let y = self.datum.label;
        if y != 1.0 && y != -1.0 {
            return None;
        }
        Some(if y * self.datum.dot(x) <= 0.0 { 1.0 } else { 0.0 })
    }

    fn smoothness(&self) -> Option<f64> {
        let sq: f64 = self.datum.features.entries().iter().map(|(_, v)| v * v).sum();
        self.kind.curvature().map(|c| c * sq)
    }
}

/// `(w/2) ||x - c||^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic {
    pub center: Vec<f64>,
    pub weight: f64,
}

impl Quadratic {
    pub fn new(center: Vec<f64>, weight: f64) -> Self {
        Self { center, weight }
    }
}

impl RoundLoss for Quadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.weight * x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>()
    }

    fn add_gradient(&self, x: &[f64], weight: f64, out: &mut [f64]) {
        for ((o, a), c) in out.iter_mut().zip(x).zip(&self.center) {
            *o += weight * self.weight * (a - c);
        }
    }

    fn zero_one(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.weight)
    }
}
