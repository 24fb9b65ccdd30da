use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adastate::{CompParams, DeltaMode};
use crate::composite::{Composite, Regularizer};
use crate::error::{Error, Result};
use crate::learner::LossKind;
use crate::transforms::Scaling;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    CompAdagrad,
    DiagAdagrad,
    FullAdagrad,
    Ogd,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    /// Synthetic points on a random low-dimensional subspace.
    #[default]
    Lowdim,
    /// An svmlight file at `path`.
    Svmlight,
    /// Gaussian-kernel prototype features of the svmlight file at `path`.
    Rbf,
}

/// How a grid picks its winner.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Mistakes made online on the training stream.
    #[default]
    Online,
    /// Training error of the final hypothesis.
    FinalTrain,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchOp {
    WhtDense,
    #[default]
    WhtOneSparse,
    WhtSparse,
    WhtTrimmed,
    UpdateL2,
}

fn d_one() -> f64 {
    1.0
}
fn d_batch() -> usize {
    160
}
fn d_perms() -> usize {
    4
}
fn d_train() -> f64 {
    0.75
}
fn d_d_true() -> usize {
    16
}
fn d_samples() -> usize {
    4000
}
fn d_noise() -> f64 {
    0.05
}
fn d_out() -> String {
    "out/run".into()
}
fn d_reps() -> usize {
    5
}
fn d_sketch_size() -> usize {
    32
}
fn d_exps() -> Vec<u32> {
    (10..=18).collect()
}

/// A flat, versioned run description. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default)]
    pub regularizer: Regularizer,
    #[serde(default)]
    pub loss: LossKind,
    #[serde(default)]
    pub seed: u64,
    /// Sketch size of the compressed learner.
    #[serde(default = "d_sketch_size")]
    pub k: usize,
    #[serde(default = "d_one")]
    pub eta: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "d_one")]
    pub tau: f64,
    /// Subspace ridge; also the ridge of full-matrix AdaGrad.
    #[serde(default = "d_one")]
    pub delta_r: f64,
    /// Complement ridge; also the ridge of diagonal AdaGrad.
    #[serde(default = "d_one")]
    pub delta_c: f64,
    #[serde(default)]
    pub delta_mode: DeltaMode,
    #[serde(default)]
    pub scaling: Scaling,
    #[serde(default = "d_batch")]
    pub batch_size: usize,
    #[serde(default = "d_perms")]
    pub permutations: usize,
    #[serde(default = "d_train")]
    pub train_fraction: f64,
    /// Record per-update wall time in the trace.
    #[serde(default)]
    pub timing: bool,
    /// Compute regret (and the bound when it applies) on the first permutation.
    #[serde(default)]
    pub regret: bool,

    #[serde(default)]
    pub dataset: DatasetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Ambient dimension of generated data, or a dimension override for files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "d_d_true")]
    pub d_true: usize,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default = "d_noise")]
    pub noise: f64,
    /// Seed of the data generator; defaults to `seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prototypes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,

    /// Output path prefix.
    #[serde(default = "d_out")]
    pub out: String,

    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid_eta: Vec<f64>,
    /// Sets both ridges.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid_delta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid_tau: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid_lambda: Vec<f64>,
    #[serde(default)]
    pub select_by: Selection,

    #[serde(default)]
    pub bench_op: BenchOp,
    #[serde(default = "d_exps")]
    pub bench_exponents: Vec<u32>,
    #[serde(default = "d_reps")]
    pub bench_reps: usize,
    #[serde(default = "d_sketch_size")]
    pub bench_k: usize,
    #[serde(default = "d_one_usize")]
    pub bench_sparsity: usize,
}

fn d_one_usize() -> usize {
    1
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str(&format!("schema_version = {SCHEMA_VERSION}")).expect("defaults parse")
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.schema_version != SCHEMA_VERSION {
            return bad(&format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.permutations == 0 {
            return bad("permutations must be at least 1");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return bad("train_fraction must lie in (0, 1]");
        }
        if !(self.noise >= 0.0) {
            return bad("noise must be nonnegative");
        }
        if self.dataset != DatasetKind::Lowdim && self.path.is_none() {
            return bad("file datasets need a path");
        }
        if self.dataset == DatasetKind::Rbf && (self.prototypes.is_none() || self.bandwidth.is_none()) {
            return bad("rbf datasets need prototypes and bandwidth");
        }
        if self.bench_reps < 5 {
            return bad("bench_reps must be at least 5");
        }
        self.comp_params().validate().map_err(|e| Error::Config(e.to_string()))?;
        check_axis("grid_eta", &self.grid_eta, false)?;
        check_axis("grid_delta", &self.grid_delta, true)?;
        check_axis("grid_tau", &self.grid_tau, true)?;
        check_axis("grid_lambda", &self.grid_lambda, true)?;
        Ok(())
    }

    pub fn comp_params(&self) -> CompParams {
        CompParams {
            eta: self.eta,
            lambda: self.lambda,
            tau: self.tau,
            delta_r: self.delta_r,
            delta_c: self.delta_c,
            delta_mode: self.delta_mode,
        }
    }

    pub fn composite(&self) -> Composite {
        Composite::new(self.regularizer, self.lambda)
    }

    pub fn data_seed(&self) -> u64 {
        self.data_seed.unwrap_or(self.seed)
    }
}

fn check_axis(name: &str, values: &[f64], zero_ok: bool) -> Result<()> {
    for &v in values {
        let ok = v.is_finite() && if zero_ok { v >= 0.0 } else { v > 0.0 };
        if !ok {
            return Err(Error::Config(format!("invalid value {v} on grid axis {name}")));
        }
    }
    Ok(())
}
