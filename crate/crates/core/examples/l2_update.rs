//! One compressed step with a squared-l2 composite term, split into its two parts.

use compadagrad::updates_l2::{solve_parallel, solve_perp, update_l2};
use compadagrad::{CompParams, CompState, Scaling, SketchOperator};

fn main() -> compadagrad::Result<()> {
    let (n, k) = (256, 8);
    let params = CompParams {
        eta: 0.5,
        lambda: 0.1,
        ..CompParams::default()
    };
    let sketch = SketchOperator::sample(n, k, 3, Scaling::Scaled)?;
    let mut state = CompState::new(sketch, params)?;
    for t in 0..5 {
        let g: Vec<f64> = (0..n).map(|i| ((i + 3 * t) as f64 * 0.1).sin()).collect();
        state.observe_gradient(&g)?;
    }
    let regs = state.regularizer_matrices()?;
    let g: Vec<f64> = (0..n).map(|i| (i as f64 * 0.05).cos()).collect();
    let x = update_l2(&state, &regs, &g)?;

    let g_eff: Vec<f64> = g.iter().map(|v| params.eta * v).collect();
    let lam = params.eta * params.lambda;
    let par = solve_parallel(&state, &regs.k, &g_eff, lam)?;
    let perp = solve_perp(&state, &regs.d, &g_eff, lam)?;
    let gap = (0..n).map(|i| (x[i] - par[i] - perp.x[i]).abs()).fold(0.0, f64::max);
    let leak = state.sketch().apply(&perp.x)?.iter().map(|v| v.abs()).fold(0.0, f64::max);
    println!("step norm {:.4}; split vs joint {gap:.1e}; |Pi x_perp|_inf {leak:.1e}",
        x.iter().map(|v| v * v).sum::<f64>().sqrt());
    Ok(())
}
