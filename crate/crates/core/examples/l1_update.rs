//! Compressed steps with an l1 composite term, solved by LARS on the implicit metric.

use compadagrad::composite::soft_threshold;
use compadagrad::learner::{run_game, GameOptions, Quadratic};
use compadagrad::{CompAdaGrad, CompParams, OnlineLearner, Regularizer, Scaling, SketchOperator};

fn main() -> compadagrad::Result<()> {
    let n = 64;
    let center: Vec<f64> = (0..n).map(|i| if i % 8 == 0 { 2.0 } else { 0.05 }).collect();
    let stream = vec![Quadratic::new(center.clone(), 1.0); 4000];
    let params = CompParams {
        eta: 0.5,
        lambda: 0.2,
        ..CompParams::default()
    };
    let sketch = SketchOperator::sample(n, 8, 1, Scaling::Scaled)?;
    let mut learner = CompAdaGrad::new(sketch, params, Regularizer::L1)?;
    let trace = run_game(&mut learner, &stream, GameOptions::default())?;
    // Every round shares the minimizer soft_threshold(center, lambda), supported on i % 8 == 0.
    let x = learner.iterate();
    let target: Vec<f64> = center.iter().map(|&c| soft_threshold(c, params.lambda)).collect();
    let dist = x.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let zeros = x.iter().filter(|v| **v == 0.0).count();
    println!("after {} rounds: {zeros} of {n} coordinates exactly zero", trace.updates());
    println!("max distance to the minimizer {dist:.2e}");
    Ok(())
}
