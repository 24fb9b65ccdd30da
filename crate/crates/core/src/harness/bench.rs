use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::config::{BenchOp, RunConfig};
use super::experiment::subseed;
use crate::adastate::CompParams;
use crate::composite::Regularizer;
use crate::error::{Error, Result};
use crate::learner::{CompAdaGrad, OnlineLearner};
use crate::transforms::{
    wht_dense_in_place, wht_one_sparse_counted, wht_sparse_counted, wht_trimmed_counted, Scaling, SketchOperator,
    SparseVector,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub op: BenchOp,
    pub n: usize,
    pub k: usize,
    pub sparsity: usize,
    pub reps: usize,
    pub median_ns: u64,
    /// Arithmetic work reported by the kernel's counter; zero when the op has none.
    pub ops: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct BenchSpec {
    pub op: BenchOp,
    pub reps: usize,
    pub k: usize,
    pub sparsity: usize,
    pub seed: u64,
}

impl BenchSpec {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            op: cfg.bench_op,
            reps: cfg.bench_reps,
            k: cfg.bench_k,
            sparsity: cfg.bench_sparsity,
            seed: cfg.seed,
        }
    }
}

pub fn median(samples: &mut [u64]) -> u64 {
    samples.sort_unstable();
    let m = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[m]
    } else {
        (samples[m - 1] + samples[m]) / 2
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn time<F: FnMut() -> Result<u64>>(reps: usize, mut f: F) -> Result<(u64, u64)> {
    let mut samples = Vec::with_capacity(reps);
    let mut ops = 0;
    for _ in 0..reps {
        let start = Instant::now();
        ops = f()?;
        samples.push(start.elapsed().as_nanos() as u64);
    }
    Ok((median(&mut samples), ops))
}

/// Times one operation at dimension `n`. Repetitions run sequentially so they do not contend.
pub fn bench_one(spec: &BenchSpec, n: usize) -> Result<BenchRow> {
    if spec.reps < 5 {
        return Err(Error::InvalidParameter("at least 5 repetitions are required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(spec.seed, n as u64));
    let (median_ns, ops) = match spec.op {
        BenchOp::WhtDense => {
            let v = gaussian(&mut rng, n);
            time(spec.reps, || {
                let mut w = v.clone();
                wht_dense_in_place(&mut w)?;
                std::hint::black_box(&w);
                Ok((n * n.trailing_zeros() as usize) as u64)
            })?
        }
        BenchOp::WhtOneSparse => {
            let i = rng.random_range(0..n);
            time(spec.reps, || {
                let mut ops = 0;
                std::hint::black_box(wht_one_sparse_counted(n, i, 1.0, &mut ops)?);
                Ok(ops)
            })?
        }
        BenchOp::WhtSparse => {
            let r = spec.sparsity.clamp(1, n);
            let support = rand::seq::index::sample(&mut rng, n, r).into_vec();
            let vals = gaussian(&mut rng, r);
            let v = SparseVector::scatter(n, &support, &vals)?;
            time(spec.reps, || {
                let mut ops = 0;
                std::hint::black_box(wht_sparse_counted(&v, &mut ops)?);
                Ok(ops)
            })?
        }
        BenchOp::WhtTrimmed => {
            let v = gaussian(&mut rng, n);
            let sketch = SketchOperator::sample(n, spec.k.min(n), spec.seed, Scaling::Scaled)?;
            time(spec.reps, || {
                let mut ops = 0;
                std::hint::black_box(wht_trimmed_counted(&v, sketch.rows(), &mut ops)?);
                Ok(ops)
            })?
        }
        BenchOp::UpdateL2 => {
            let sketch = SketchOperator::sample(n, spec.k.min(n), spec.seed, Scaling::Scaled)?;
            let mut learner = CompAdaGrad::new(sketch, CompParams::default(), Regularizer::L2Sq)?;
            for _ in 0..3 {
                learner.step(&gaussian(&mut rng, n))?;
            }
            let g = gaussian(&mut rng, n);
            let mut samples = Vec::with_capacity(spec.reps);
            for _ in 0..spec.reps {
                let mut l = learner.clone();
                let start = Instant::now();
                l.step(&g)?;
                samples.push(start.elapsed().as_nanos() as u64);
                std::hint::black_box(l.iterate());
            }
            (median(&mut samples), 0)
        }
    };
    Ok(BenchRow {
        op: spec.op,
        n,
        k: spec.k,
        sparsity: spec.sparsity,
        reps: spec.reps,
        median_ns,
        ops,
    })
}

/// One row per dimension `2^p` for `p` in `exponents`.
pub fn bench_scaling(spec: &BenchSpec, exponents: &[u32]) -> Result<Vec<BenchRow>> {
    exponents
        .iter()
        .map(|&p| {
            if p >= usize::BITS - 1 {
                return Err(Error::InvalidParameter(format!("exponent {p} too large")));
            }
            bench_one(spec, 1usize << p)
        })
        .collect()
}

/// Writes `<prefix>.bench.csv`.
pub fn write_bench(rows: &[BenchRow], prefix: &str) -> Result<PathBuf> {
    let path = PathBuf::from(format!("{prefix}.bench.csv"));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = csv::Writer::from_writer(std::fs::File::create(&path)?);
    out.write_record(["op", "n", "k", "sparsity", "reps", "median_ns", "ops"])?;
    for r in rows {
        let op = serde_json::to_value(r.op)?;
        out.write_record([
            op.as_str().unwrap_or_default().to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.sparsity.to_string(),
            r.reps.to_string(),
            r.median_ns.to_string(),
            r.ops.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(path)
}
