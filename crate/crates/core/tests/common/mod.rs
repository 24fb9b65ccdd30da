//! Dense reference implementations that share no code with the library's fast paths.
#![allow(dead_code)]

use compadagrad::learner::Instance;
use compadagrad::{Scaling, SketchOperator, SparseVector};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

pub fn gauss_mat(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.sample(StandardNormal))
}

/// Unnormalized Sylvester Hadamard matrix built by block doubling.
pub fn sylvester(n: usize) -> DMatrix<f64> {
    let mut h = DMatrix::from_element(1, 1, 1.0);
    while h.nrows() < n {
        let m = h.nrows();
        let mut next = DMatrix::zeros(2 * m, 2 * m);
        next.view_mut((0, 0), (m, m)).copy_from(&h);
        next.view_mut((0, m), (m, m)).copy_from(&h);
        next.view_mut((m, 0), (m, m)).copy_from(&h);
        next.view_mut((m, m), (m, m)).copy_from(&(-&h));
        h = next;
    }
    h
}

/// The sketch as an explicit `k x n` matrix, including its scaling.
pub fn dense_pi(s: &SketchOperator) -> DMatrix<f64> {
    let n = s.n();
    let h = sylvester(n) / (n as f64).sqrt();
    let c = match s.scaling() {
        Scaling::Scaled if s.k() > 0 => (n as f64 / s.k() as f64).sqrt(),
        _ => 1.0,
    };
    DMatrix::from_fn(s.k(), n, |i, j| c * h[(s.rows()[i], j)] * s.signs()[j])
}

/// Orthogonal projector onto the row space of `pi`.
pub fn dense_projector(pi: &DMatrix<f64>) -> DMatrix<f64> {
    let n = pi.ncols();
    if pi.nrows() == 0 {
        return DMatrix::zeros(n, n);
    }
    let inner = (pi * pi.transpose()).try_inverse().expect("full row rank");
    pi.transpose() * inner * pi
}

/// `A = Pi^T K Pi + P_perp D P_perp`.
pub fn dense_metric(pi: &DMatrix<f64>, k: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    let n = pi.ncols();
    let perp = DMatrix::identity(n, n) - dense_projector(pi);
    let dm = DMatrix::from_diagonal(&DVector::from_column_slice(d));
    pi.transpose() * k * pi + &perp * dm * &perp
}

/// Symmetric PSD square root by eigendecomposition, clamping round-off negatives.
pub fn sqrtm(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() == 0 {
        return m.clone();
    }
    let e = m.clone().symmetric_eigen();
    let vals = e.eigenvalues.map(|v| v.max(0.0).sqrt());
    &e.eigenvectors * DMatrix::from_diagonal(&vals) * e.eigenvectors.transpose()
}

/// Joint solve of the l2 step `(A + lam I) x = A x_t - g_eff`.
pub fn dense_l2_step(a: &DMatrix<f64>, x_t: &[f64], g_eff: &[f64], lam: f64) -> Vec<f64> {
    let n = a.nrows();
    let m = a + DMatrix::identity(n, n) * lam;
    let rhs = a * DVector::from_column_slice(x_t) - DVector::from_column_slice(g_eff);
    m.lu().solve(&rhs).expect("nonsingular").as_slice().to_vec()
}

/// KKT system of `min <P_perp g, x> + 1/2 ||x - P_perp x_t||_D^2 + lam/2 ||x||^2` s.t. `Pi x = 0`.
pub fn dense_perp_kkt(pi: &DMatrix<f64>, d: &[f64], g_eff: &[f64], x_t: &[f64], lam: f64) -> (Vec<f64>, Vec<f64>) {
    let (k, n) = (pi.nrows(), pi.ncols());
    let perp = DMatrix::identity(n, n) - dense_projector(pi);
    let y = -(&perp * DVector::from_column_slice(g_eff))
        + DMatrix::from_diagonal(&DVector::from_column_slice(d)) * (&perp * DVector::from_column_slice(x_t));
    let mut m = DMatrix::zeros(n + k, n + k);
    for i in 0..n {
        m[(i, i)] = d[i] + lam;
    }
    m.view_mut((0, n), (n, k)).copy_from(&pi.transpose());
    m.view_mut((n, 0), (k, n)).copy_from(pi);
    let mut rhs = DVector::zeros(n + k);
    rhs.rows_mut(0, n).copy_from(&y);
    let sol = m.lu().solve(&rhs).expect("nonsingular KKT");
    (sol.rows(0, n).as_slice().to_vec(), sol.rows(n, k).as_slice().to_vec())
}

/// Worst violation of the LASSO optimality conditions for `<u,x> + 1/2 x^T A x + lam ||x||_1`.
pub fn lasso_kkt_violation(a: &DMatrix<f64>, u: &[f64], x: &[f64], lam: f64) -> f64 {
    let grad = a * DVector::from_column_slice(x) + DVector::from_column_slice(u);
    (0..u.len())
        .map(|j| {
            if x[j] == 0.0 {
                (grad[j].abs() - lam).max(0.0)
            } else {
                (grad[j] + lam * x[j].signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Random SPD `k x k` matrix with eigenvalues in `[lo, lo + spread]`.
pub fn random_spd(r: &mut ChaCha8Rng, k: usize, lo: f64, spread: f64) -> DMatrix<f64> {
    let q = gauss_mat(r, k, k).qr().q();
    let vals = DVector::from_fn(k, |_, _| lo + spread * r.random::<f64>());
    &q * DMatrix::from_diagonal(&vals) * q.transpose()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// The subspace metric from the raw gradients via an SVD of `Pi [g_1 ... g_T]`, which
/// avoids squaring: `sqrt(M M^T) = U diag(s) U^T`.
pub fn sketched_sqrt(pi: &DMatrix<f64>, grads: &[DVector<f64>], delta: f64, mode: compadagrad::DeltaMode) -> DMatrix<f64> {
    let k = pi.nrows();
    if k == 0 {
        return DMatrix::zeros(0, 0);
    }
    let cols = grads.len().max(k);
    let mut m = DMatrix::zeros(k, cols);
    for (j, g) in grads.iter().enumerate() {
        m.set_column(j, &(pi * g));
    }
    let svd = m.svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let s = &svd.singular_values;
    let vals = DVector::from_fn(k, |i, _| match mode {
        compadagrad::DeltaMode::InsideSqrt => (s[i] * s[i] + delta).sqrt(),
        compadagrad::DeltaMode::OutsideSqrt => s[i] + delta,
    });
    &u * DMatrix::from_diagonal(&vals) * u.transpose()
}

/// Labels from a random linear separator on uniform features, with a fraction `flip` flipped.
pub fn logistic_stream(r: &mut ChaCha8Rng, n: usize, t: usize, flip: f64) -> Vec<Instance> {
    let w = gauss_vec(r, n);
    (0..t)
        .map(|_| {
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
            let s: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
            let mut y = if s >= 0.0 { 1.0 } else { -1.0 };
            if r.random_bool(flip) {
                y = -y;
            }
            Instance::new(SparseVector::from_dense(&x), y)
        })
        .collect()
}
