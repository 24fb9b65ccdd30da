//! Dense-oracle checks for the worked examples of each operation.

mod common;

use approx::assert_relative_eq;
use common::*;
use compadagrad::adastate::{matrix_sqrt_psd, CompParams, CompState, DeltaMode, RegularizerPair};
use compadagrad::baselines::{diag_adagrad_update, trace_sqrt_gram};
use compadagrad::harness::{gen_rbf_prototypes, Dataset};
use compadagrad::learner::{
    bound_rhs_comp, compute_regret, run_game, CompAdaGrad, GameOptions, Instance, LossFn, LossKind, OnlineLearner,
    RegretLedger,
};
use compadagrad::transforms::*;
use compadagrad::updates_l1::{apply_a, lasso_lars, precompute_q, LarsWorkspace};
use compadagrad::updates_l2::{build_sketch_gram, update_l2};
use compadagrad::{Composite, Regularizer};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

fn state_with_history(seed: u64, n: usize, k: usize, scaling: Scaling, params: CompParams, rounds: usize) -> (CompState, Vec<Vec<f64>>) {
    let mut r = rng(seed);
    let sketch = SketchOperator::sample(n, k, r.random(), scaling).unwrap();
    let x = gauss_vec(&mut r, n);
    let mut st = CompState::new(sketch, params).unwrap().with_iterate(x).unwrap();
    let grads: Vec<Vec<f64>> = (0..rounds).map(|_| gauss_vec(&mut r, n)).collect();
    for g in &grads {
        st.observe_gradient(g).unwrap();
    }
    (st, grads)
}

#[test]
fn one_sparse_matches_dense_rows() {
    assert_eq!(wht_one_sparse(4, 3, 2.0).unwrap(), vec![2.0, -2.0, -2.0, 2.0]);
    let mut e5 = vec![0.0; 8];
    e5[5] = 1.0;
    assert_eq!(wht_one_sparse(8, 5, 1.0).unwrap(), wht_dense(&e5).unwrap());
}

#[test]
fn sparse_transform_matches_dense() {
    let mut r = rng(64);
    for _ in 0..20 {
        let idx = rand::seq::index::sample(&mut r, 256, 3).into_vec();
        let entries: Vec<(usize, f64)> = idx.iter().map(|&i| (i, r.random_range(-2.0..2.0))).collect();
        let v = SparseVector::new(256, entries).unwrap();
        let got = wht_sparse(&v).unwrap();
        assert!(max_abs_diff(&got, &wht_dense(&v.to_dense()).unwrap()) < 1e-12);
    }
}

#[test]
fn trimmed_transform_is_dense_then_select() {
    let mut r = rng(75);
    let h = sylvester(64);
    for _ in 0..20 {
        let v = gauss_vec(&mut r, 64);
        let j = r.random_range(0..64);
        let single = wht_trimmed(&v, &[j]).unwrap();
        assert!((single[0] - h.row(j).dot(&dvec(&v).transpose())).abs() < 1e-12);
        let mut rows = rand::seq::index::sample(&mut r, 64, 4).into_vec();
        rows.sort_unstable();
        let full = wht_dense(&v).unwrap();
        let want: Vec<f64> = rows.iter().map(|&i| full[i]).collect();
        assert!(max_abs_diff(&wht_trimmed(&v, &rows).unwrap(), &want) < 1e-12);
    }
}

#[test]
fn sketch_matches_dense_matrix() {
    let mut r = rng(95);
    for scaling in [Scaling::Scaled, Scaling::Unscaled] {
        let s = SketchOperator::sample(16, 4, r.random(), scaling).unwrap();
        let pi = dense_pi(&s);
        let proj = dense_projector(&pi);
        for _ in 0..100 {
            let v = gauss_vec(&mut r, 16);
            let z = gauss_vec(&mut r, 4);
            assert!(max_abs_diff(&s.apply(&v).unwrap(), (&pi * dvec(&v)).as_slice()) < 1e-12);
            assert!(max_abs_diff(&s.apply_adjoint(&z).unwrap(), (pi.transpose() * dvec(&z)).as_slice()) < 1e-12);
            assert!(max_abs_diff(&s.apply_projector(&v).unwrap(), (&proj * dvec(&v)).as_slice()) < 1e-12);
        }
    }
}

#[test]
fn statistics_match_dense_accumulation() {
    let params = CompParams::default();
    let (st, grads) = state_with_history(158, 16, 4, Scaling::Scaled, params, 12);
    let pi = dense_pi(st.sketch());
    let perp = DMatrix::identity(16, 16) - dense_projector(&pi);
    let mut gram = DMatrix::zeros(16, 16);
    for g in &grads {
        gram += dvec(g) * dvec(g).transpose();
    }
    let want = &pi * &gram * pi.transpose();
    assert!((st.gtilde() - &want).amax() < 1e-10 * want.amax().max(1.0));
    let gp = &perp * &gram * &perp;
    let diag: Vec<f64> = (0..16).map(|j| gp[(j, j)]).collect();
    assert!(max_abs_diff(st.perp_sq(), &diag) < 1e-10);
}

#[test]
fn matrix_sqrt_squares_back() {
    let mut r = rng(169);
    for _ in 0..10 {
        let a = gauss_mat(&mut r, 8, 5);
        let m = &a * a.transpose();
        let s = matrix_sqrt_psd(&m).unwrap();
        assert!((&s * &s - &m).norm() <= 1e-9 * m.norm());
    }
}

#[test]
fn full_sketch_metric_is_gram_root() {
    let delta = 0.3;
    let params = CompParams {
        delta_r: delta,
        delta_mode: DeltaMode::OutsideSqrt,
        ..CompParams::default()
    };
    let (st, grads) = state_with_history(178, 8, 8, Scaling::Unscaled, params, 12);
    let regs = st.regularizer_matrices().unwrap();
    let pi = dense_pi(st.sketch());
    let mut gram = DMatrix::zeros(8, 8);
    for g in &grads {
        gram += dvec(g) * dvec(g).transpose();
    }
    let got = pi.transpose() * &regs.k * &pi;
    let want = sqrtm(&gram) + DMatrix::identity(8, 8) * delta;
    assert!((got - want).amax() < 1e-9);
}

#[test]
fn sketch_gram_and_q_match_dense() {
    let mut r = rng(241);
    let s = SketchOperator::sample(16, 4, r.random(), Scaling::Scaled).unwrap();
    let w: Vec<f64> = (0..16).map(|_| r.random_range(0.1..3.0)).collect();
    let unscaled = dense_pi(&s) / s.scale();
    let dw = DMatrix::from_diagonal(&dvec(&w));
    let want = &unscaled * &dw * unscaled.transpose();
    let got = build_sketch_gram(&s, &w).unwrap();
    assert!((&got - &want).amax() < 1e-10);
    assert!((&got - got.transpose()).amax() < 1e-12);

    let regs = RegularizerPair {
        k: random_spd(&mut r, 4, 0.5, 2.0),
        d: w,
    };
    let q = precompute_q(&s, &regs).unwrap();
    let want_q = &regs.k * 4.0 + want;
    assert!((&q - &want_q).amax() < 1e-10);
    assert!((&q - q.transpose()).amax() < 1e-12);
}

#[test]
fn implicit_metric_degenerates_to_sketched_part() {
    let mut r = rng(294);
    let s = SketchOperator::sample(16, 16, r.random(), Scaling::Unscaled).unwrap();
    let regs = RegularizerPair {
        k: random_spd(&mut r, 16, 0.5, 2.0),
        d: vec![0.0; 16],
    };
    let q = precompute_q(&s, &regs).unwrap();
    let pi = dense_pi(&s);
    for _ in 0..20 {
        let beta = gauss_vec(&mut r, 16);
        let got = apply_a(&s, &q, &regs.d, &beta).unwrap();
        let want = pi.transpose() * &regs.k * &pi * dvec(&beta);
        assert!(max_abs_diff(&got, want.as_slice()) < 1e-9);
    }
}

#[test]
fn gram_entries_at_start_match_dense() {
    let params = CompParams {
        delta_r: 0.4,
        delta_c: 0.7,
        ..CompParams::default()
    };
    let (st, _) = state_with_history(302, 16, 4, Scaling::Scaled, params, 0);
    let regs = st.regularizer_matrices().unwrap();
    let a = dense_metric(&dense_pi(st.sketch()), &regs.k, &regs.d);
    let mut ws = LarsWorkspace::new(st.sketch().clone());
    ws.prepare(&regs).unwrap();
    for i in 0..16 {
        assert!((ws.gram_entry_diag(i).unwrap() - a[(i, i)]).abs() < 1e-9);
        for j in 0..16 {
            if i != j {
                assert!((ws.gram_entry_cross(i, j).unwrap() - a[(i, j)]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn lars_with_zero_lambda_solves_metric_system() {
    let (st, _) = state_with_history(313, 16, 4, Scaling::Scaled, CompParams::default(), 6);
    let regs = st.regularizer_matrices().unwrap();
    let a = dense_metric(&dense_pi(st.sketch()), &regs.k, &regs.d);
    let mut r = rng(314);
    let u = gauss_vec(&mut r, 16);
    let mut ws = LarsWorkspace::new(st.sketch().clone());
    ws.prepare(&regs).unwrap();
    let x = lasso_lars(&mut ws, &u, 0.0).unwrap().x;
    let want = a.clone().lu().solve(&(-dvec(&u))).unwrap();
    assert!(rel_err(&x, want.as_slice()) < 1e-7);
    let sparse = lasso_lars(&mut ws, &u, 0.1).unwrap().x;
    assert!(lasso_kkt_violation(&a, &u, &sparse, 0.1) < 1e-7);
}

#[test]
fn diagonal_step_matches_dense_solve() {
    let mut r = rng(371);
    let n = 16;
    let sq: Vec<f64> = (0..n).map(|_| r.random_range(0.0..4.0)).collect();
    let x = gauss_vec(&mut r, n);
    let g = gauss_vec(&mut r, n);
    let (eta, lambda, delta) = (0.6, 0.25, 0.1);
    let got = diag_adagrad_update(&sq, &x, &g, eta, Composite::new(Regularizer::L2Sq, lambda), delta);
    let h = DMatrix::from_diagonal(&DVector::from_iterator(n, sq.iter().map(|s| s.sqrt() + delta)));
    let m = &h + DMatrix::identity(n, n) * (eta * lambda);
    let want = m.lu().solve(&(&h * dvec(&x) - dvec(&g) * eta)).unwrap();
    assert!(max_abs_diff(&got, want.as_slice()) < 1e-10);
}

#[test]
fn l2_step_does_not_increase_its_objective() {
    let params = CompParams {
        eta: 0.8,
        lambda: 0.3,
        ..CompParams::default()
    };
    let (st, _) = state_with_history(250, 16, 4, Scaling::Scaled, params, 4);
    let regs = st.regularizer_matrices().unwrap();
    let a = dense_metric(&dense_pi(st.sketch()), &regs.k, &regs.d);
    let mut r = rng(251);
    let g = gauss_vec(&mut r, 16);
    let x_t = dvec(st.x());
    let objective = |x: &DVector<f64>| {
        let d = x - &x_t;
        params.eta * dvec(&g).dot(x) + 0.5 * d.dot(&(&a * &d)) + 0.5 * params.eta * params.lambda * x.norm_squared()
    };
    let next = dvec(&update_l2(&st, &regs, &g).unwrap());
    assert!(objective(&next) <= objective(&x_t) + 1e-12);
    assert!(objective(&next) <= objective(&DVector::zeros(16)) + 1e-12);
}

#[test]
fn trace_sqrt_matches_eigendecomposition() {
    let mut r = rng(381);
    let grads: Vec<Vec<f64>> = (0..20).map(|_| gauss_vec(&mut r, 8)).collect();
    let mut gram = DMatrix::zeros(8, 8);
    for g in &grads {
        gram += dvec(g) * dvec(g).transpose();
    }
    let eig: f64 = gram.symmetric_eigenvalues().iter().map(|v| v.max(0.0).sqrt()).sum();
    assert!((trace_sqrt_gram(&grads).unwrap() - eig).abs() < 1e-9);
}

fn analyzed(eta: f64, delta: f64) -> CompParams {
    CompParams {
        eta,
        lambda: 0.01,
        tau: 1.0,
        delta_r: delta,
        delta_c: delta,
        delta_mode: DeltaMode::OutsideSqrt,
    }
}

fn recorded<A: OnlineLearner>(learner: &mut A, losses: &[LossFn<'_>]) -> compadagrad::learner::RunTrace {
    let opts = GameOptions {
        record_history: true,
        ..GameOptions::default()
    };
    run_game(learner, losses, opts).unwrap()
}

#[test]
fn logistic_regret_is_nonnegative() {
    let mut r = rng(432);
    for _ in 0..5 {
        let data = logistic_stream(&mut r, 8, 50, 0.1);
        let losses: Vec<LossFn<'_>> = data.iter().map(|d| LossFn::new(LossKind::Logistic, d)).collect();
        let sketch = SketchOperator::sample(8, 2, r.random(), Scaling::Scaled).unwrap();
        let mut learner = CompAdaGrad::new(sketch, analyzed(0.5, 0.5), Regularizer::L2Sq).unwrap();
        let trace = recorded(&mut learner, &losses);
        let report = compute_regret(&trace, &losses, learner.composite()).unwrap();
        assert!(report.regret >= -1e-8, "regret {}", report.regret);
    }
}

#[test]
fn single_round_bound_uses_gradient_norm() {
    let (eta, delta) = (0.7, 0.4);
    let params = analyzed(eta, delta);
    let datum = Instance::new(SparseVector::from_dense(&[0.5, -1.0, 0.25, 2.0, 0.0, 1.0, -0.5, 0.75]), 1.0);
    let losses = [LossFn::new(LossKind::Logistic, &datum)];
    let sketch = SketchOperator::sample(8, 8, 3, Scaling::Unscaled).unwrap();
    let mut learner = CompAdaGrad::new(sketch.clone(), params, Regularizer::L2Sq).unwrap();
    let trace = recorded(&mut learner, &losses);
    let ledger = RegretLedger::new(&trace, &sketch, &params).unwrap();
    let x_star: Vec<f64> = (0..8).map(|i| 0.1 * i as f64 - 0.3).collect();
    let g = &trace.gradients[0];
    let gnorm = sketch.apply(g).unwrap().iter().map(|v| v * v).sum::<f64>().sqrt();
    let dist: f64 = x_star.iter().zip(&trace.iterates[0]).map(|(a, b)| (a - b) * (a - b)).sum();
    let want = delta / (2.0 * eta) * dist + dist * gnorm / (2.0 * eta) + eta * gnorm;
    let got = bound_rhs_comp(&ledger, &x_star).unwrap().total;
    assert_relative_eq!(got, want, max_relative = 1e-10);
}

#[test]
fn complement_column_norms_match_dense() {
    let mut r = rng(442);
    let data = logistic_stream(&mut r, 8, 30, 0.1);
    let losses: Vec<LossFn<'_>> = data.iter().map(|d| LossFn::new(LossKind::Logistic, d)).collect();
    let params = analyzed(0.5, 0.2);
    let sketch = SketchOperator::sample(8, 2, r.random(), Scaling::Unscaled).unwrap();
    let mut learner = CompAdaGrad::new(sketch.clone(), params, Regularizer::L2Sq).unwrap();
    let trace = recorded(&mut learner, &losses);
    let ledger = RegretLedger::new(&trace, &sketch, &params).unwrap();
    let perp = DMatrix::identity(8, 8) - dense_projector(&dense_pi(&sketch));
    let mut z = DMatrix::zeros(30, 8);
    for (t, g) in trace.gradients.iter().enumerate() {
        z.set_row(t, &(&perp * dvec(g)).transpose());
    }
    let want: f64 = z.column_iter().map(|c| c.norm()).sum();
    assert!((ledger.z_perp_21() - want).abs() < 1e-10);
}

#[test]
fn rbf_features_match_formula() {
    let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]];
    let data = Dataset {
        n: 2,
        instances: pts
            .iter()
            .map(|p| Instance::new(SparseVector::from_dense(p), 1.0))
            .collect(),
    };
    let bw = 1.5;
    let out = gen_rbf_prototypes(&data, 2, bw, 9).unwrap();
    assert_eq!(out.n, 2);
    // Both prototypes are drawn from the data; recover them from the unit entries.
    let feats: Vec<Vec<f64>> = out.instances.iter().map(|i| i.features.to_dense()).collect();
    let protos: Vec<usize> = (0..2)
        .map(|j| (0..3).find(|&i| feats[i][j] == 1.0).expect("prototype row"))
        .collect();
    for (i, f) in feats.iter().enumerate() {
        for (j, &p) in protos.iter().enumerate() {
            let sq: f64 = pts[i].iter().zip(&pts[p]).map(|(a, b)| (a - b) * (a - b)).sum();
            assert_relative_eq!(f[j], (-sq / (2.0 * bw * bw)).exp(), max_relative = 1e-15);
        }
    }
}
