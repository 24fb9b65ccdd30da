//! Median wall time of the transform kernels and the l2 step as n doubles.

use compadagrad::harness::{bench_scaling, BenchOp, BenchSpec};

fn main() -> compadagrad::Result<()> {
    for op in [BenchOp::WhtDense, BenchOp::WhtTrimmed, BenchOp::UpdateL2] {
        let spec = BenchSpec {
            op,
            reps: 5,
            k: 16,
            sparsity: 1,
            seed: 1,
        };
        let rows = bench_scaling(&spec, &[10, 12, 14])?;
        for r in rows {
            println!("{op:?} n = {:>6}: {:>10} ns", r.n, r.median_ns);
        }
    }
    Ok(())
}
