//! Measured regret of a logistic game against the evaluated regret bound.

use compadagrad::learner::{
    bound_rhs_comp, compute_regret, run_game, GameOptions, Instance, LossFn, LossKind, RegretLedger,
};
use compadagrad::{CompAdaGrad, CompParams, DeltaMode, OnlineLearner, Regularizer, Scaling, SketchOperator, SparseVector};

fn main() -> compadagrad::Result<()> {
    let n = 16;
    let data: Vec<Instance> = (0..100)
        .map(|t| {
            let x: Vec<f64> = (0..n).map(|i| ((t * 13 + i * 5) as f64 * 0.61).cos()).collect();
            let y = if x[1] - x[4] + 0.5 * x[9] >= 0.0 { 1.0 } else { -1.0 };
            Instance::new(SparseVector::from_dense(&x), y)
        })
        .collect();
    let losses: Vec<LossFn<'_>> = data.iter().map(|d| LossFn::new(LossKind::Logistic, d)).collect();
    // The bound covers unscaled sketches, tau = 1 and one ridge outside the square root.
    let params = CompParams {
        eta: 0.8,
        lambda: 0.01,
        tau: 1.0,
        delta_r: 0.3,
        delta_c: 0.3,
        delta_mode: DeltaMode::OutsideSqrt,
    };
    let sketch = SketchOperator::sample(n, 4, 9, Scaling::Unscaled)?;
    let mut learner = CompAdaGrad::new(sketch.clone(), params, Regularizer::L2Sq)?;
    let opts = GameOptions {
        record_history: true,
        ..GameOptions::default()
    };
    let trace = run_game(&mut learner, &losses, opts)?;
    let report = compute_regret(&trace, &losses, learner.composite())?;
    let ledger = RegretLedger::new(&trace, &sketch, &params)?;
    let bound = bound_rhs_comp(&ledger, &report.x_star)?;
    println!("regret {:.4} (shifted {:.4}) <= bound {:.4}", report.regret, report.regret_shifted, bound.total);
    println!("terms: ridge {:.4}, distance {:.4}, gradient {:.4}", bound.ridge, bound.distance, bound.gradient);
    Ok(())
}
