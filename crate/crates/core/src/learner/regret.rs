use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{RoundLoss, RunTrace};
use crate::adastate::{matrix_sqrt_psd, CompParams, DeltaMode};
use crate::composite::Composite;
use crate::error::{check_len, Error, Result};
use crate::transforms::{Scaling, SketchOperator};

/// Largest dimension a regret ledger will store history for.
pub const LEDGER_MAX_N: usize = 64;
/// Largest number of updates a regret ledger will store history for.
pub const LEDGER_MAX_T: usize = 1000;

const REL_TOL: f64 = 1e-10;
const SOLVER_CAP: usize = 500_000;

/// Composite objective `sum_u f_u(x) + U phi(x)` over the mini-batched stream,
/// with `f_u` the mean loss of batch `u`. Returns the value and the gradient of the smooth part.
pub fn batch_objective<L: RoundLoss>(stream: &[L], batch_size: usize, phi: Composite, x: &[f64]) -> (f64, Vec<f64>) {
    let mut value = 0.0;
    let mut grad = vec![0.0; x.len()];
    let mut batches = 0;
    for batch in stream.chunks(batch_size.max(1)) {
        let w = 1.0 / batch.len() as f64;
        for f in batch {
            value += w * f.value(x);
            f.add_gradient(x, w, &mut grad);
        }
        batches += 1;
    }
    (value + batches as f64 * phi.value(x), grad)
}

/// Minimizes the batch composite objective by accelerated proximal gradient with
/// monotone restarts, stopping when the relative objective change stays below
/// `1e-10` for three consecutive iterations.
pub fn minimize_composite<L: RoundLoss>(
    stream: &[L],
    batch_size: usize,
    phi: Composite,
    x0: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let batches: Vec<&[L]> = stream.chunks(batch_size.max(1)).collect();
    let mut lip = 0.0;
    for batch in &batches {
        let mut s = 0.0;
        for f in batch.iter() {
            s += f
                .smoothness()
                .ok_or_else(|| Error::InvalidParameter("comparator solver needs smooth losses".into()))?;
        }
        lip += s / batch.len() as f64;
    }
    let u = batches.len() as f64;
    if phi.kind == crate::composite::Regularizer::L2Sq {
        lip += u * phi.lambda;
    }
    let step = 1.0 / lip.max(f64::MIN_POSITIVE).max(1e-12);
    // The l2 term is smooth; fold it into the gradient so the prox only handles l1.
    let (smooth_l2, prox_phi) = match phi.kind {
        crate::composite::Regularizer::L2Sq => (u * phi.lambda, Composite::none()),
        crate::composite::Regularizer::L1 => (0.0, Composite::new(phi.kind, phi.lambda * u)),
    };
    let eval = |x: &[f64]| -> (f64, Vec<f64>) {
        let (v, mut g) = batch_objective(stream, batch_size, Composite::none(), x);
        for (gi, xi) in g.iter_mut().zip(x) {
            *gi += smooth_l2 * xi;
        }
        let reg = 0.5 * smooth_l2 * x.iter().map(|a| a * a).sum::<f64>();
        (v + reg, g)
    };
    let total = |x: &[f64]| eval(x).0 + prox_phi.value(x);

    let mut x = x0.to_vec();
    let mut fx = total(&x);
    let mut y = x.clone();
    let mut theta: f64 = 1.0;
    let mut quiet = 0;
    for _ in 0..SOLVER_CAP {
        let (_, gy) = eval(&y);
        let v: Vec<f64> = y.iter().zip(&gy).map(|(a, b)| a - step * b).collect();
        let mut xn = prox_phi.prox(&v, step);
        let mut fn_ = total(&xn);
        if fn_ > fx {
            // Restart from a plain proximal step at x.
            theta = 1.0;
            let (_, gx) = eval(&x);
            let v: Vec<f64> = x.iter().zip(&gx).map(|(a, b)| a - step * b).collect();
            xn = prox_phi.prox(&v, step);
            fn_ = total(&xn);
            if fn_ > fx {
                xn = x.clone();
                fn_ = fx;
            }
        }
        let change = (fx - fn_).abs() / fx.abs().max(1.0);
        let theta_n = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
        let mom = (theta - 1.0) / theta_n;
        y = xn.iter().zip(&x).map(|(a, b)| a + mom * (a - b)).collect();
        x = xn;
        fx = fn_;
        theta = theta_n;
        quiet = if change <= REL_TOL { quiet + 1 } else { 0 };
        if quiet >= 3 {
            return Ok((x, fx));
        }
    }
    Err(Error::IterationCap {
        solver: "minimize_composite",
        cap: SOLVER_CAP,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RegretReport {
    /// `sum_u f_u(x_u) + phi(x_u)`.
    pub played: f64,
    /// `sum_u f_u(x_u) + phi(x_{u+1})`.
    pub played_shifted: f64,
    /// `sum_u f_u(x*) + phi(x*)`.
    pub comparator: f64,
    pub regret: f64,
    pub regret_shifted: f64,
    pub x_star: Vec<f64>,
}

/// Regret of a recorded run against the numerically optimal fixed comparator.
pub fn compute_regret<L: RoundLoss>(trace: &RunTrace, stream: &[L], phi: Composite) -> Result<RegretReport> {
    let updates = trace.updates();
    if trace.iterates.len() != updates + 1 {
        return Err(Error::InvalidParameter("regret needs a trace with recorded history".into()));
    }
    let mut played = 0.0;
    let mut shifted = 0.0;
    for (u, batch) in stream.chunks(trace.batch_size.max(1)).enumerate() {
        let x = &trace.iterates[u];
        let w = 1.0 / batch.len() as f64;
        let f: f64 = batch.iter().map(|l| w * l.value(x)).sum();
        played += f + phi.value(x);
        shifted += f + phi.value(&trace.iterates[u + 1]);
    }
    let n = trace.iterates[0].len();
    let (x_star, comparator) = minimize_composite(stream, trace.batch_size, phi, &vec![0.0; n])?;
    Ok(RegretReport {
        played,
        played_shifted: shifted,
        comparator,
        regret: played - comparator,
        regret_shifted: shifted - comparator,
        x_star,
    })
}

/// Rejects learner settings the regret bound does not cover and returns the common ridge.
pub fn check_analyzed(sketch: &SketchOperator, params: &CompParams) -> Result<f64> {
    let reasons = [
        (sketch.scaling() == Scaling::Unscaled, "scaling must be unscaled"),
        (params.delta_mode == DeltaMode::OutsideSqrt, "ridge must sit outside the square root"),
        (params.tau == 1.0, "tau must be 1"),
        (params.delta_r == params.delta_c, "delta_r and delta_c must agree"),
        (params.delta_r > 0.0, "delta must be positive"),
    ];
    for (ok, why) in reasons {
        if !ok {
            return Err(Error::UnanalyzedConfig(why.into()));
        }
    }
    Ok(params.delta_r)
}

/// Stored history of a compressed run, with the statistics the regret bound needs.
#[derive(Clone, Debug)]
pub struct RegretLedger {
    pub composite_losses: Vec<f64>,
    pub gradients: Vec<Vec<f64>>,
    /// Played iterates `x_1, ..., x_T`.
    pub iterates: Vec<Vec<f64>>,
    /// `sum_t [P_perp g_t]_j^2`.
    pub perp_colnorms: Vec<f64>,
    /// `Pi~ G_T Pi~^T`.
    pub sketched_gram_final: DMatrix<f64>,
    sketch: SketchOperator,
    eta: f64,
    delta: f64,
}

impl RegretLedger {
    pub fn new(trace: &RunTrace, sketch: &SketchOperator, params: &CompParams) -> Result<Self> {
        let delta = check_analyzed(sketch, params)?;
        let (n, k) = (sketch.n(), sketch.k());
        let t = trace.updates();
        if n > LEDGER_MAX_N || t > LEDGER_MAX_T {
            return Err(Error::InvalidParameter(format!(
                "regret ledger limited to n <= {LEDGER_MAX_N}, T <= {LEDGER_MAX_T}"
            )));
        }
        if trace.gradients.len() != t || trace.iterates.len() != t + 1 {
            return Err(Error::InvalidParameter("regret ledger needs a trace with recorded history".into()));
        }
        let mut gram = DMatrix::zeros(k, k);
        let mut perp = vec![0.0; n];
        for g in &trace.gradients {
            check_len(n, g.len())?;
            let (tilde, pg) = sketch.project_parts(g)?;
            let v = DVector::from_vec(tilde);
            gram += &v * v.transpose();
            for ((acc, gj), pj) in perp.iter_mut().zip(g).zip(&pg) {
                *acc += (gj - pj) * (gj - pj);
            }
        }
        Ok(Self {
            composite_losses: trace.rows.iter().map(|r| r.composite).collect(),
            gradients: trace.gradients.clone(),
            iterates: trace.iterates[..t].to_vec(),
            perp_colnorms: perp,
            sketched_gram_final: gram,
            sketch: sketch.clone(),
            eta: params.eta,
            delta,
        })
    }

    /// `||Z_perp||_{2,1}`: the sum of column norms of the complement gradient matrix.
    pub fn z_perp_21(&self) -> f64 {
        self.perp_colnorms.iter().map(|v| v.sqrt()).sum()
    }

    /// `tr((Pi~ G_T Pi~^T)^{1/2})`.
    pub fn trace_sqrt_sketched(&self) -> Result<f64> {
        if self.sketched_gram_final.nrows() == 0 {
            return Ok(0.0);
        }
        Ok(matrix_sqrt_psd(&self.sketched_gram_final)?.trace())
    }

    /// `max_t ||P (x* - x_t)||_2^2` and `max_t ||P_perp (x* - x_t)||_inf^2`.
    pub fn max_distances(&self, x_star: &[f64]) -> Result<(f64, f64)> {
        let (mut sub, mut perp) = (0.0f64, 0.0f64);
        for x in &self.iterates {
            let diff: Vec<f64> = x_star.iter().zip(x).map(|(a, b)| a - b).collect();
            let (tilde, pd) = self.sketch.project_parts(&diff)?;
            sub = sub.max(tilde.iter().map(|v| v * v).sum());
            let linf = diff.iter().zip(&pd).fold(0.0f64, |m, (d, p)| m.max((d - p).abs()));
            perp = perp.max(linf * linf);
        }
        Ok((sub, perp))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundTerms {
    pub ridge: f64,
    pub distance: f64,
    pub gradient: f64,
    pub trace_sqrt: f64,
    pub z_perp_21: f64,
    pub total: f64,
}

/// Evaluates the regret bound of the compressed learner at comparator `x_star`.
pub fn bound_rhs_comp(ledger: &RegretLedger, x_star: &[f64]) -> Result<BoundTerms> {
    check_len(ledger.sketch.n(), x_star.len())?;
    let (eta, delta) = (ledger.eta, ledger.delta);
    let x1 = ledger
        .iterates
        .first()
        .cloned()
        .unwrap_or_else(|| vec![0.0; x_star.len()]);
    let start: f64 = x_star.iter().zip(&x1).map(|(a, b)| (a - b) * (a - b)).sum();
    let tr = ledger.trace_sqrt_sketched()?;
    let z = ledger.z_perp_21();
    let (sub, perp) = ledger.max_distances(x_star)?;
    let ridge = delta / (2.0 * eta) * start;
    let distance = (sub * tr + perp * z) / (2.0 * eta);
    let gradient = eta * (tr + z);
    Ok(BoundTerms {
        ridge,
        distance,
        gradient,
        trace_sqrt: tr,
        z_perp_21: z,
        total: ridge + distance + gradient,
    })
}
