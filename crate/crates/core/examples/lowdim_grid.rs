//! Compressed versus diagonal AdaGrad on data with low-dimensional correlated features.

use compadagrad::harness::{gen_lowdim_correlated, run_grid_on, Algorithm, RunConfig};

fn main() -> compadagrad::Result<()> {
    let data = gen_lowdim_correlated(256, 8, 1500, 0.05, 4)?;
    let base = RunConfig {
        k: 16,
        batch_size: 10,
        permutations: 2,
        grid_eta: vec![0.1, 0.3, 1.0],
        grid_delta: vec![0.1, 1.0],
        ..RunConfig::default()
    };
    for algorithm in [Algorithm::CompAdagrad, Algorithm::DiagAdagrad] {
        let grid = run_grid_on(&RunConfig { algorithm, ..base.clone() }, &data)?;
        let best = grid.best();
        println!(
            "{algorithm:?}: eta {} delta {:?}: online error {:.4}, test error {:.4}",
            best.eta, best.delta, best.summary.online_error, best.summary.test_error
        );
    }
    Ok(())
}
