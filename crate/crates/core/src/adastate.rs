//! Adaptive statistics of the compressed learner and the metric blocks built from them.
//!
//! The learner never forms the `n x n` gradient outer-product sum. It keeps two
//! sufficient statistics instead: the sketched Gram `Pi G_t Pi^T` (k x k) and
//! the diagonal of `P_perp G_t P_perp` (length n). From these it builds the
//! subspace metric `K` and the complement weights `D`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};
use crate::transforms::SketchOperator;

/// Where the ridge `delta_r` enters the subspace metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// `K = (Pi G Pi^T + delta_r I)^{1/2}`.
    InsideSqrt,
    /// `K = (Pi G Pi^T)^{1/2} + delta_r I`.
    #[default]
    OutsideSqrt,
}

/// Hyperparameters of the compressed learner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompParams {
    pub eta: f64,
    pub lambda: f64,
    pub tau: f64,
    pub delta_r: f64,
    pub delta_c: f64,
    pub delta_mode: DeltaMode,
}

impl Default for CompParams {
    fn default() -> Self {
        Self {
            eta: 1.0,
            lambda: 0.0,
            tau: 1.0,
            delta_r: 1.0,
            delta_c: 1.0,
            delta_mode: DeltaMode::OutsideSqrt,
        }
    }
}

impl CompParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.eta > 0.0, "eta must be positive"),
            (self.lambda >= 0.0, "lambda must be nonnegative"),
            (self.tau >= 0.0, "tau must be nonnegative"),
            (self.delta_r >= 0.0, "delta_r must be nonnegative"),
            (self.delta_c >= 0.0, "delta_c must be nonnegative"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::InvalidParameter(msg.into()));
            }
        }
        Ok(())
    }
}

/// The subspace metric `K` (k x k) and complement weights `D = tau (sqrt(diag G_perp) + delta_c)`.
#[derive(Clone, Debug)]
pub struct RegularizerPair {
    pub k: DMatrix<f64>,
    pub d: Vec<f64>,
}

/// Per-learner adaptive state.
#[derive(Clone, Debug)]
pub struct CompState {
    sketch: SketchOperator,
    gtilde: DMatrix<f64>,
    perp_sq: Vec<f64>,
    x: Vec<f64>,
    params: CompParams,
    round: usize,
}

impl CompState {
    pub fn new(sketch: SketchOperator, params: CompParams) -> Result<Self> {
        params.validate()?;
        let (n, k) = (sketch.n(), sketch.k());
        Ok(Self {
            sketch,
            gtilde: DMatrix::zeros(k, k),
            perp_sq: vec![0.0; n],
            x: vec![0.0; n],
            params,
            round: 0,
        })
    }

    pub fn with_iterate(mut self, x: Vec<f64>) -> Result<Self> {
        check_len(self.n(), x.len())?;
        check_finite(&x, "iterate")?;
        self.x = x;
        Ok(self)
    }

    pub fn sketch(&self) -> &SketchOperator {
        &self.sketch
    }

    pub fn n(&self) -> usize {
        self.sketch.n()
    }

    pub fn k(&self) -> usize {
        self.sketch.k()
    }

    /// Accumulated `sum_s (Pi g_s)(Pi g_s)^T`.
    pub fn gtilde(&self) -> &DMatrix<f64> {
        &self.gtilde
    }

    /// Accumulated `sum_s [P_perp g_s]_j^2`.
    pub fn perp_sq(&self) -> &[f64] {
        &self.perp_sq
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn set_x(&mut self, x: Vec<f64>) -> Result<()> {
        check_len(self.n(), x.len())?;
        self.x = x;
        Ok(())
    }

    pub fn params(&self) -> &CompParams {
        &self.params
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Folds gradient `g` into both statistics.
    pub fn observe_gradient(&mut self, g: &[f64]) -> Result<()> {
        check_len(self.n(), g.len())?;
        check_finite(g, "gradient")?;
        let (tilde, pg) = self.sketch.project_parts(g)?;
        let c = self.sketch.scale();
        let s: Vec<f64> = tilde.iter().map(|v| v * c).collect();
        let k = s.len();
        for j in 0..k {
            for i in 0..k {
                self.gtilde[(i, j)] += s[i] * s[j];
            }
        }
        for ((acc, gj), pj) in self.perp_sq.iter_mut().zip(g).zip(&pg) {
            let r = gj - pj;
            *acc += r * r;
        }
        self.round += 1;
        Ok(())
    }

    /// Builds `K` and `D` from the current statistics.
    pub fn regularizer_matrices(&self) -> Result<RegularizerPair> {
        let p = &self.params;
        let k = self.k();
        let (kmat, kmin) = match p.delta_mode {
            DeltaMode::InsideSqrt => {
                let shifted = &self.gtilde + DMatrix::identity(k, k) * p.delta_r;
                psd_sqrt_with_floor(&shifted)?
            }
            DeltaMode::OutsideSqrt => {
                let (s, floor) = psd_sqrt_with_floor(&self.gtilde)?;
                (s + DMatrix::identity(k, k) * p.delta_r, floor + p.delta_r)
            }
        };
        let d: Vec<f64> = self.perp_sq.iter().map(|&v| p.tau * (v.sqrt() + p.delta_c)).collect();
        if p.delta_r == 0.0 && p.delta_c == 0.0 {
            let dmin = d.iter().copied().fold(f64::INFINITY, f64::min);
            if (k > 0 && kmin <= 0.0) || dmin <= 0.0 {
                return Err(Error::Singular("zero ridge with rank-deficient statistics".into()));
            }
        }
        Ok(RegularizerPair { k: kmat, d })
    }
}

const SYMMETRY_TOL: f64 = 1e-10;
const CLAMP_REL: f64 = 1e-12;
const NEGATIVE_REL: f64 = 1e-8;

/// Symmetric PSD square root via eigendecomposition.
///
/// Eigenvalues below `1e-12` times the largest are clamped to zero; clearly
/// negative eigenvalues are rejected.
pub fn matrix_sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(psd_sqrt_with_floor(m)?.0)
}

/// Returns the square root and its smallest eigenvalue.
fn psd_sqrt_with_floor(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let k = m.nrows();
    if k == 0 {
        return Ok((DMatrix::zeros(0, 0), f64::INFINITY));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    let scale = m.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let asym = (m - m.transpose()).abs().max();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::Asymmetric(asym));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let top = eig.eigenvalues.max().max(0.0);
    let mut roots = eig.eigenvalues.clone();
    for v in roots.iter_mut() {
        if *v < -NEGATIVE_REL * top.max(1.0) {
            return Err(Error::NegativeEigenvalue(*v));
        }
        *v = if *v <= CLAMP_REL * top { 0.0 } else { v.sqrt() };
    }
    let floor = roots.min();
    let q = &eig.eigenvectors;
    let mut s = q * DMatrix::from_diagonal(&roots) * q.transpose();
    s = (&s + s.transpose()) * 0.5;
    Ok((s, floor))
}
