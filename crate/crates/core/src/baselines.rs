//! Reference learners: full-matrix AdaGrad (dense), diagonal AdaGrad and online
//! gradient descent, plus the regret-bound expressions of the first two.

use nalgebra::{DMatrix, DVector};

use crate::adastate::matrix_sqrt_psd;
use crate::composite::{soft_threshold, Composite, Regularizer};
use crate::error::{check_finite, check_len, Error, Result};
use crate::learner::OnlineLearner;

/// Largest dimension the dense baselines accept.
pub const DENSE_LIMIT: usize = 256;

fn dense_guard(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        Err(Error::DenseGuard { n, limit: DENSE_LIMIT })
    } else {
        Ok(())
    }
}

/// Coordinate descent for `min_x <u, x> + 1/2 x^T A x + lam ||x||_1` with explicit `A`.
///
/// Sweeps until no coordinate moves by more than `1e-14 (1 + ||x||_inf)`; the
/// returned gap is the duality gap of the final iterate.
pub fn dense_lasso_cd(a: &DMatrix<f64>, u: &[f64], lam: f64) -> Result<(Vec<f64>, f64)> {
    let n = u.len();
    check_len(a.nrows(), n)?;
    let mut x = vec![0.0; n];
    // grad = u + A x, kept incrementally
    let mut grad = u.to_vec();
    const CAP: usize = 200_000;
    for _ in 0..CAP {
        let mut max_move: f64 = 0.0;
        for j in 0..n {
            let ajj = a[(j, j)];
            if ajj <= 0.0 {
                return Err(Error::Singular("nonpositive diagonal in lasso".into()));
            }
            let partial = grad[j] - ajj * x[j];
            let new = soft_threshold(-partial, lam) / ajj;
            let delta = new - x[j];
            if delta != 0.0 {
                for i in 0..n {
                    grad[i] += a[(i, j)] * delta;
                }
                x[j] = new;
                max_move = max_move.max(delta.abs());
            }
        }
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max_move <= 1e-14 * scale {
            let gap = lasso_duality_gap(a, u, lam, &x)?;
            return Ok((x, gap));
        }
    }
    Err(Error::IterationCap {
        solver: "dense_lasso_cd",
        cap: CAP,
    })
}

/// Gap between the primal objective at `x` and the dual objective at the clipped
/// negative gradient `v = clip(-(u + A x), [-lam, lam])`.
pub fn lasso_duality_gap(a: &DMatrix<f64>, u: &[f64], lam: f64, x: &[f64]) -> Result<f64> {
    let xv = DVector::from_column_slice(x);
    let uv = DVector::from_column_slice(u);
    let ax = a * &xv;
    let primal = uv.dot(&xv) + 0.5 * xv.dot(&ax) + lam * xv.abs().sum();
    let v = (&uv + &ax).map(|g| (-g).clamp(-lam, lam));
    let w = &uv + &v;
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("lasso metric".into()))?;
    let dual = -0.5 * w.dot(&chol.solve(&w));
    Ok(primal - dual)
}

/// One full-matrix step with metric `H = G^{1/2} + delta I`; `gram` already includes `g`.
pub fn full_adagrad_update(
    gram: &DMatrix<f64>,
    x: &[f64],
    g: &[f64],
    eta: f64,
    phi: Composite,
    delta: f64,
) -> Result<Vec<f64>> {
    let n = x.len();
    dense_guard(n)?;
    check_len(n, g.len())?;
    check_len(n, gram.nrows())?;
    let h = matrix_sqrt_psd(gram)? + DMatrix::identity(n, n) * delta;
    let xv = DVector::from_column_slice(x);
    let gv = DVector::from_column_slice(g);
    let lam = eta * phi.lambda;
    match phi.kind {
        Regularizer::L2Sq => {
            let m = &h + DMatrix::identity(n, n) * lam;
            let rhs = &h * xv - gv * eta;
            let chol = m.cholesky().ok_or_else(|| Error::Singular("full-matrix metric".into()))?;
            Ok(chol.solve(&rhs).as_slice().to_vec())
        }
        Regularizer::L1 => {
            let u = gv * eta - &h * xv;
            Ok(dense_lasso_cd(&h, u.as_slice(), lam)?.0)
        }
    }
}

/// One diagonal step; `sq_sum` already includes `g^2`.
pub fn diag_adagrad_update(sq_sum: &[f64], x: &[f64], g: &[f64], eta: f64, phi: Composite, delta: f64) -> Vec<f64> {
    let lam = eta * phi.lambda;
    sq_sum
        .iter()
        .zip(x)
        .zip(g)
        .map(|((s, xj), gj)| {
            let h = s.sqrt() + delta;
            let v = h * xj - eta * gj;
            match phi.kind {
                Regularizer::L2Sq => v / (h + lam),
                Regularizer::L1 => soft_threshold(v, lam) / h,
            }
        })
        .collect()
}

/// Full-matrix AdaGrad with a dense `n x n` accumulator.
#[derive(Clone, Debug)]
pub struct FullAdaGrad {
    gram: DMatrix<f64>,
    x: Vec<f64>,
    eta: f64,
    delta: f64,
    phi: Composite,
}

impl FullAdaGrad {
    pub fn new(n: usize, eta: f64, delta: f64, phi: Composite) -> Result<Self> {
        dense_guard(n)?;
        Ok(Self {
            gram: DMatrix::zeros(n, n),
            x: vec![0.0; n],
            eta,
            delta,
            phi,
        })
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }
}

impl OnlineLearner for FullAdaGrad {
    fn name(&self) -> &'static str {
        "full_adagrad"
    }

    fn dim(&self) -> usize {
        self.x.len()
    }

    fn iterate(&self) -> &[f64] {
        &self.x
    }

    fn composite(&self) -> Composite {
        self.phi
    }

    fn step(&mut self, g: &[f64]) -> Result<()> {
        check_len(self.x.len(), g.len())?;
        check_finite(g, "gradient")?;
        let gv = DVector::from_column_slice(g);
        self.gram += &gv * gv.transpose();
        self.x = full_adagrad_update(&self.gram, &self.x, g, self.eta, self.phi, self.delta)?;
        Ok(())
    }
}

/// Diagonal AdaGrad.
#[derive(Clone, Debug)]
pub struct DiagAdaGrad {
    sq_sum: Vec<f64>,
    x: Vec<f64>,
    eta: f64,
    delta: f64,
    phi: Composite,
}

impl DiagAdaGrad {
    pub fn new(n: usize, eta: f64, delta: f64, phi: Composite) -> Self {
        Self {
            sq_sum: vec![0.0; n],
            x: vec![0.0; n],
            eta,
            delta,
            phi,
        }
    }

    pub fn sq_sum(&self) -> &[f64] {
        &self.sq_sum
    }
}

impl OnlineLearner for DiagAdaGrad {
    fn name(&self) -> &'static str {
        "diag_adagrad"
    }

    fn dim(&self) -> usize {
        self.x.len()
    }

    fn iterate(&self) -> &[f64] {
        &self.x
    }

    fn composite(&self) -> Composite {
        self.phi
    }

    fn step(&mut self, g: &[f64]) -> Result<()> {
        check_len(self.x.len(), g.len())?;
        check_finite(g, "gradient")?;
        for (s, gj) in self.sq_sum.iter_mut().zip(g) {
            *s += gj * gj;
        }
        self.x = diag_adagrad_update(&self.sq_sum, &self.x, g, self.eta, self.phi, self.delta);
        Ok(())
    }
}

/// Proximal online gradient descent with a constant step.
#[derive(Clone, Debug)]
pub struct Ogd {
    x: Vec<f64>,
    eta: f64,
    phi: Composite,
}

impl Ogd {
    pub fn new(n: usize, eta: f64, phi: Composite) -> Self {
        Self {
            x: vec![0.0; n],
            eta,
            phi,
        }
    }
}

impl OnlineLearner for Ogd {
    fn name(&self) -> &'static str {
        "ogd"
    }

    fn dim(&self) -> usize {
        self.x.len()
    }

    fn iterate(&self) -> &[f64] {
        &self.x
    }

    fn composite(&self) -> Composite {
        self.phi
    }

    fn step(&mut self, g: &[f64]) -> Result<()> {
        check_len(self.x.len(), g.len())?;
        check_finite(g, "gradient")?;
        let v: Vec<f64> = self.x.iter().zip(g).map(|(x, gj)| x - self.eta * gj).collect();
        self.x = self.phi.prox(&v, self.eta);
        Ok(())
    }
}

/// `sum_j (sum_t g_{t,j}^2)^{1/2}`.
pub fn column_norm_sum(gradients: &[Vec<f64>]) -> f64 {
    let n = gradients.first().map_or(0, |g| g.len());
    (0..n)
        .map(|j| gradients.iter().map(|g| g[j] * g[j]).sum::<f64>().sqrt())
        .sum()
}

/// `tr(G^{1/2})` for `G = sum_t g_t g_t^T`, via eigendecomposition.
pub fn trace_sqrt_gram(gradients: &[Vec<f64>]) -> Result<f64> {
    let n = gradients.first().map_or(0, |g| g.len());
    dense_guard(n)?;
    let mut gram = DMatrix::zeros(n, n);
    for g in gradients {
        let v = DVector::from_column_slice(g);
        gram += &v * v.transpose();
    }
    Ok(matrix_sqrt_psd(&gram)?.trace())
}

fn max_dist(iterates: &[Vec<f64>], x_star: &[f64], linf: bool) -> f64 {
    iterates
        .iter()
        .map(|x| {
            let diffs = x.iter().zip(x_star).map(|(a, b)| b - a);
            if linf {
                diffs.fold(0.0f64, |m, d| m.max(d * d))
            } else {
                diffs.map(|d| d * d).sum()
            }
        })
        .fold(0.0, f64::max)
}

/// Right-hand side of the diagonal AdaGrad regret bound.
pub fn bound_rhs_diag(gradients: &[Vec<f64>], iterates: &[Vec<f64>], x_star: &[f64], eta: f64) -> f64 {
    let s = column_norm_sum(gradients);
    max_dist(iterates, x_star, true) * s / (2.0 * eta) + eta * s
}

/// Right-hand side of the full-matrix AdaGrad regret bound.
pub fn bound_rhs_full(
    gradients: &[Vec<f64>],
    iterates: &[Vec<f64>],
    x_star: &[f64],
    eta: f64,
    delta: f64,
) -> Result<f64> {
    let tr = trace_sqrt_gram(gradients)?;
    let xs: f64 = x_star.iter().map(|v| v * v).sum();
    Ok(delta / eta * xs + max_dist(iterates, x_star, false) * tr / (2.0 * eta) + eta * tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::updates_l1::{lasso_lars, DenseGram};

    #[test]
    fn full_single_step_isotropic() {
        let g = [1.0, -2.0, 0.5];
        let gram = DMatrix::zeros(3, 3);
        let x = full_adagrad_update(&gram, &[0.0; 3], &g, 0.5, Composite::none(), 2.0).unwrap();
        for (a, b) in x.iter().zip(&g) {
            assert!((a + 0.5 * b / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_gradient_fixed_point() {
        let mut gram = DMatrix::identity(3, 3);
        gram[(0, 1)] = 0.2;
        gram[(1, 0)] = 0.2;
        let x0 = [0.3, -1.0, 2.0];
        let x = full_adagrad_update(&gram, &x0, &[0.0; 3], 1.0, Composite::none(), 0.1).unwrap();
        for (a, b) in x.iter().zip(&x0) {
            assert!((a - b).abs() < 1e-12);
        }
        let d = diag_adagrad_update(&[1.0; 3], &x0, &[0.0; 3], 1.0, Composite::none(), 0.1);
        assert_eq!(d, x0.to_vec());
    }

    #[test]
    fn dense_guard_refuses_large() {
        assert!(matches!(
            FullAdaGrad::new(512, 1.0, 1.0, Composite::none()),
            Err(Error::DenseGuard { .. })
        ));
    }

    #[test]
    fn diag_l1_full_threshold() {
        let phi = Composite::new(Regularizer::L1, 10.0);
        let x = diag_adagrad_update(&[1.0, 4.0], &[0.5, -0.5], &[0.2, 0.1], 1.0, phi, 0.0);
        assert_eq!(x, vec![0.0, 0.0]);
    }

    #[test]
    fn ogd_one_step_on_quadratic() {
        let c = [1.5, -2.0];
        let mut o = Ogd::new(2, 1.0, Composite::none());
        let g: Vec<f64> = o.iterate().iter().zip(&c).map(|(x, ci)| x - ci).collect();
        o.step(&g).unwrap();
        assert_eq!(o.iterate(), &c);
    }

    #[test]
    fn bounds_on_trivial_traces() {
        let zero = vec![vec![0.0; 2]; 3];
        let its = vec![vec![0.0; 2]; 3];
        let xs = [1.0, 1.0];
        assert_eq!(bound_rhs_diag(&zero, &its, &xs, 0.5), 0.0);
        let full = bound_rhs_full(&zero, &its, &xs, 0.5, 0.25).unwrap();
        assert!((full - 0.25 / 0.5 * 2.0).abs() < 1e-14);
        assert!((column_norm_sum(&[vec![-3.0]]) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn cd_matches_lars() {
        let a = DMatrix::from_fn(6, 6, |i, j| if i == j { 3.0 } else { 0.4 / (1.0 + (i + j) as f64) });
        let u: Vec<f64> = (0..6).map(|i| (i as f64 * 1.7).sin() * 2.0).collect();
        for lam in [0.0, 0.1, 1.0] {
            let (cd, gap) = dense_lasso_cd(&a, &u, lam).unwrap();
            assert!(gap < 1e-10);
            let lars = lasso_lars(&mut DenseGram(a.clone()), &u, lam).unwrap();
            for (p, q) in cd.iter().zip(&lars.x) {
                assert!((p - q).abs() < 1e-10);
            }
        }
    }
}
