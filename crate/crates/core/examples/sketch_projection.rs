//! A subsampled randomized Hadamard sketch, its adjoint and the induced projector.

use compadagrad::{Scaling, SketchOperator};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn main() -> compadagrad::Result<()> {
    let (n, k) = (1024, 16);
    let sketch = SketchOperator::sample(n, k, 7, Scaling::Scaled)?;
    println!("n = {n}, k = {k}, Pi Pi^T = {} I, rows {:?}...", sketch.gram_scale(), &sketch.rows()[..4]);

    let v: Vec<f64> = (0..n).map(|i| ((i * 37) % 101) as f64 / 50.0 - 1.0).collect();
    let pv = sketch.apply_projector(&v)?;
    let cv = sketch.apply_complement(&v)?;
    let cross: f64 = pv.iter().zip(&cv).map(|(a, b)| a * b).sum();
    println!("|v| = {:.4}, |Pv| = {:.4}, |P_perp v| = {:.4}, <Pv, P_perp v> = {cross:.1e}", norm(&v), norm(&pv), norm(&cv));

    let again = sketch.apply_projector(&pv)?;
    let drift = pv.iter().zip(&again).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("projector idempotence drift {drift:.1e}");
    Ok(())
}
