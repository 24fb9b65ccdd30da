//! A full sketch recovers full-matrix AdaGrad; an empty one recovers diagonal AdaGrad.

use compadagrad::baselines::{DiagAdaGrad, FullAdaGrad};
use compadagrad::learner::{run_game, GameOptions, Instance, LossFn, LossKind};
use compadagrad::{
    CompAdaGrad, CompParams, Composite, OnlineLearner, Regularizer, Scaling, SketchOperator, SparseVector,
};

fn final_iterate<L: OnlineLearner>(learner: &mut L, losses: &[LossFn<'_>]) -> compadagrad::Result<Vec<f64>> {
    Ok(run_game(learner, losses, GameOptions::default())?.final_x)
}

fn main() -> compadagrad::Result<()> {
    let n = 8;
    let data: Vec<Instance> = (0..60)
        .map(|t| {
            let x: Vec<f64> = (0..n).map(|i| ((t * 7 + i * 3) as f64 * 0.37).sin()).collect();
            let y = if x[0] + x[3] - x[5] >= 0.0 { 1.0 } else { -1.0 };
            Instance::new(SparseVector::from_dense(&x), y)
        })
        .collect();
    let losses: Vec<LossFn<'_>> = data.iter().map(|d| LossFn::new(LossKind::Logistic, d)).collect();
    let params = CompParams {
        eta: 0.5,
        lambda: 0.01,
        delta_r: 0.1,
        delta_c: 0.1,
        ..CompParams::default()
    };
    let phi = Composite::new(Regularizer::L2Sq, params.lambda);
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let full = SketchOperator::sample(n, n, 2, Scaling::Scaled)?;
    let a = final_iterate(&mut CompAdaGrad::new(full, params, Regularizer::L2Sq)?, &losses)?;
    let b = final_iterate(&mut FullAdaGrad::new(n, params.eta, params.delta_r, phi)?, &losses)?;
    println!("k = n vs full-matrix AdaGrad: {:.1e}", diff(&a, &b));

    let empty = SketchOperator::sample(n, 0, 2, Scaling::Scaled)?;
    let a = final_iterate(&mut CompAdaGrad::new(empty, params, Regularizer::L2Sq)?, &losses)?;
    let b = final_iterate(&mut DiagAdaGrad::new(n, params.eta, params.delta_c, phi), &losses)?;
    println!("k = 0 vs diagonal AdaGrad:    {:.1e}", diff(&a, &b));
    Ok(())
}
