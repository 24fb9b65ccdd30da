use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Algorithm, DatasetKind, RunConfig, Selection};
use super::data::{gen_lowdim_correlated, gen_rbf_prototypes, load_svmlight, Dataset};
use crate::baselines::{DiagAdaGrad, FullAdaGrad, Ogd};
use crate::composite::Regularizer;
use crate::error::Result;
use crate::learner::{
    bound_rhs_comp, compute_regret, run_game, BoundTerms, CompAdaGrad, GameOptions, LossFn, OnlineLearner,
    RegretLedger, RoundLoss, RunTrace,
};
use crate::transforms::SketchOperator;

/// Independent seed for stream `tag` derived from the run seed.
pub fn subseed(seed: u64, tag: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng.next_u64()
}

const TAG_SKETCH: u64 = 1 << 32;
const TAG_PERM: u64 = 2 << 32;

pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let data = match cfg.dataset {
        DatasetKind::Lowdim => gen_lowdim_correlated(
            cfg.n.unwrap_or(1024),
            cfg.d_true,
            cfg.samples,
            cfg.noise,
            cfg.data_seed(),
        )?,
        DatasetKind::Svmlight => load_svmlight(cfg.path.as_deref().unwrap_or_default(), cfg.n)?,
        DatasetKind::Rbf => {
            let base = load_svmlight(cfg.path.as_deref().unwrap_or_default(), cfg.n)?;
            gen_rbf_prototypes(
                &base,
                cfg.prototypes.unwrap_or(0),
                cfg.bandwidth.unwrap_or(0.0),
                cfg.data_seed(),
            )?
        }
    };
    data.require_nonempty()?;
    Ok(data)
}

/// The learner described by `cfg`; `sketch_seed` only matters for the compressed learner.
pub fn build_learner(cfg: &RunConfig, n: usize, sketch_seed: u64) -> Result<Box<dyn OnlineLearner + Send>> {
    let phi = cfg.composite();
    Ok(match cfg.algorithm {
        Algorithm::CompAdagrad => {
            let sketch = SketchOperator::sample(n, cfg.k, sketch_seed, cfg.scaling)?;
            Box::new(CompAdaGrad::new(sketch, cfg.comp_params(), cfg.regularizer)?)
        }
        Algorithm::DiagAdagrad => Box::new(DiagAdaGrad::new(n, cfg.eta, cfg.delta_c, phi)),
        Algorithm::FullAdagrad => Box::new(FullAdaGrad::new(n, cfg.eta, cfg.delta_r, phi)?),
        Algorithm::Ogd => Box::new(Ogd::new(n, cfg.eta, phi)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PermSummary {
    pub permutation: usize,
    pub updates: usize,
    pub online_error: f64,
    pub final_train_error: f64,
    pub test_error: f64,
    pub cumulative_composite: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegretSummary {
    pub played: f64,
    pub played_shifted: f64,
    pub comparator: f64,
    pub regret: f64,
    pub regret_shifted: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSummary {
    pub ridge: f64,
    pub distance: f64,
    pub gradient: f64,
    pub total: f64,
}

impl From<BoundTerms> for BoundSummary {
    fn from(b: BoundTerms) -> Self {
        Self {
            ridge: b.ridge,
            distance: b.distance,
            gradient: b.gradient,
            total: b.total,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub regularizer: Regularizer,
    pub n: usize,
    pub k: usize,
    pub eta: f64,
    pub lambda: f64,
    pub tau: f64,
    pub delta_r: f64,
    pub delta_c: f64,
    pub batch_size: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub online_error: f64,
    pub final_train_error: f64,
    pub test_error: f64,
    pub permutations: Vec<PermSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regret: Option<RegretSummary>,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub summary: RunSummary,
    pub traces: Vec<RunTrace>,
}

/// Sizes of the leading training block and the trailing test block.
pub fn split_sizes(total: usize, train_fraction: f64) -> (usize, usize) {
    let train = ((total as f64 * train_fraction).floor() as usize).clamp(1.min(total), total);
    (train, total - train)
}

fn error_rate(losses: &[LossFn<'_>], x: &[f64]) -> f64 {
    let (mut wrong, mut seen) = (0.0, 0usize);
    for f in losses {
        if let Some(z) = f.zero_one(x) {
            wrong += z;
            seen += 1;
        }
    }
    if seen == 0 {
        f64::NAN
    } else {
        wrong / seen as f64
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    s / c as f64
}

/// Runs every permutation of `cfg` on an already loaded dataset.
pub fn run_on_dataset(cfg: &RunConfig, data: &Dataset) -> Result<Experiment> {
    cfg.validate()?;
    data.require_nonempty()?;
    let (train_size, test_size) = split_sizes(data.len(), cfg.train_fraction);
    let opts = GameOptions {
        batch_size: cfg.batch_size,
        record_history: cfg.regret,
        timing: cfg.timing,
    };
    let mut perms = Vec::with_capacity(cfg.permutations);
    let mut traces = Vec::with_capacity(cfg.permutations);
    let mut regret = None;
    for p in 0..cfg.permutations {
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(subseed(cfg.seed, TAG_PERM + p as u64)));
        let losses: Vec<LossFn<'_>> = order
            .iter()
            .map(|&i| LossFn::new(cfg.loss, &data.instances[i]))
            .collect();
        let (train, test) = losses.split_at(train_size);
        let mut learner = build_learner(cfg, data.n, subseed(cfg.seed, TAG_SKETCH + p as u64))?;
        let trace = run_game(&mut learner, train, opts)?;
        let x = &trace.final_x;
        perms.push(PermSummary {
            permutation: p,
            updates: trace.updates(),
            online_error: trace.online_error(),
            final_train_error: error_rate(train, x),
            test_error: if test.is_empty() { f64::NAN } else { error_rate(test, x) },
            cumulative_composite: trace.cumulative_composite(),
        });
        if cfg.regret && p == 0 {
            regret = Some(regret_summary(cfg, data.n, &trace, train)?);
        }
        traces.push(trace);
    }
    let summary = RunSummary {
        algorithm: cfg.algorithm,
        regularizer: cfg.regularizer,
        n: data.n,
        k: if cfg.algorithm == Algorithm::CompAdagrad { cfg.k } else { 0 },
        eta: cfg.eta,
        lambda: cfg.lambda,
        tau: cfg.tau,
        delta_r: cfg.delta_r,
        delta_c: cfg.delta_c,
        batch_size: cfg.batch_size,
        train_size,
        test_size,
        online_error: mean(perms.iter().map(|p| p.online_error)),
        final_train_error: mean(perms.iter().map(|p| p.final_train_error)),
        test_error: mean(perms.iter().map(|p| p.test_error)),
        permutations: perms,
        regret,
    };
    Ok(Experiment { summary, traces })
}

fn regret_summary(cfg: &RunConfig, n: usize, trace: &RunTrace, train: &[LossFn<'_>]) -> Result<RegretSummary> {
    let r = compute_regret(trace, train, cfg.composite())?;
    let mut bound = None;
    if cfg.algorithm == Algorithm::CompAdagrad {
        let sketch = SketchOperator::sample(n, cfg.k, subseed(cfg.seed, TAG_SKETCH), cfg.scaling)?;
        if let Ok(ledger) = RegretLedger::new(trace, &sketch, &cfg.comp_params()) {
            bound = Some(bound_rhs_comp(&ledger, &r.x_star)?.into());
        }
    }
    Ok(RegretSummary {
        played: r.played,
        played_shifted: r.played_shifted,
        comparator: r.comparator,
        regret: r.regret,
        regret_shifted: r.regret_shifted,
        bound,
    })
}

pub fn run_experiment(cfg: &RunConfig) -> Result<Experiment> {
    cfg.validate()?;
    run_on_dataset(cfg, &load_dataset(cfg)?)
}

/// Formats a float with 17 significant digits, independent of locale.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn with_suffix(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}

/// Writes the trace rows of every permutation as CSV.
///
/// Columns: `permutation,round,batch_len,loss,composite,mistakes,cum_composite,cum_mistakes`,
/// plus `wall_ns` when timing was recorded.
pub fn write_trace_csv<W: Write>(traces: &[RunTrace], w: W) -> Result<()> {
    let timed = traces.iter().flat_map(|t| &t.rows).any(|r| r.wall_ns.is_some());
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec![
        "permutation",
        "round",
        "batch_len",
        "loss",
        "composite",
        "mistakes",
        "cum_composite",
        "cum_mistakes",
    ];
    if timed {
        header.push("wall_ns");
    }
    out.write_record(&header)?;
    for (p, t) in traces.iter().enumerate() {
        for r in &t.rows {
            let mut rec = vec![
                p.to_string(),
                r.round.to_string(),
                r.batch_len.to_string(),
                fmt_f64(r.loss),
                fmt_f64(r.composite),
                r.mistakes.to_string(),
                fmt_f64(r.cum_composite),
                r.cum_mistakes.to_string(),
            ];
            if timed {
                rec.push(r.wall_ns.unwrap_or(0).to_string());
            }
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    create_parent(path)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes `<prefix>.trace.csv` and `<prefix>.summary.json`.
pub fn write_experiment(exp: &Experiment, prefix: &str) -> Result<(PathBuf, PathBuf)> {
    let csv_path = with_suffix(prefix, ".trace.csv");
    let json_path = with_suffix(prefix, ".summary.json");
    create_parent(&csv_path)?;
    write_trace_csv(&exp.traces, fs::File::create(&csv_path)?)?;
    write_json(&exp.summary, &json_path)?;
    Ok((csv_path, json_path))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCell {
    pub index: usize,
    pub eta: f64,
    pub delta: Option<f64>,
    pub tau: f64,
    pub lambda: f64,
    pub summary: RunSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub select_by: Selection,
    pub winner: usize,
    pub cells: Vec<GridCell>,
}

impl GridSummary {
    pub fn best(&self) -> &GridCell {
        &self.cells[self.winner]
    }
}

fn axis(values: &[f64], base: f64) -> Vec<f64> {
    if values.is_empty() {
        vec![base]
    } else {
        values.to_vec()
    }
}

/// The grid cells of `base`, in row-major order over (eta, delta, tau, lambda).
pub fn grid_configs(base: &RunConfig) -> Vec<(RunConfig, Option<f64>)> {
    let mut out = Vec::new();
    let deltas: Vec<Option<f64>> = if base.grid_delta.is_empty() {
        vec![None]
    } else {
        base.grid_delta.iter().map(|&d| Some(d)).collect()
    };
    for eta in axis(&base.grid_eta, base.eta) {
        for &delta in &deltas {
            for tau in axis(&base.grid_tau, base.tau) {
                for lambda in axis(&base.grid_lambda, base.lambda) {
                    let mut c = base.clone();
                    c.eta = eta;
                    c.tau = tau;
                    c.lambda = lambda;
                    if let Some(d) = delta {
                        c.delta_r = d;
                        c.delta_c = d;
                    }
                    out.push((c, delta));
                }
            }
        }
    }
    out
}

/// Runs every grid cell on `data` in parallel and selects the winner.
///
/// Ties go to the earliest cell.
pub fn run_grid_on(base: &RunConfig, data: &Dataset) -> Result<GridSummary> {
    base.validate()?;
    let configs = grid_configs(base);
    let results: Vec<Result<RunSummary>> = configs
        .par_iter()
        .map(|(c, _)| run_on_dataset(c, data).map(|e| e.summary))
        .collect();
    let mut cells = Vec::with_capacity(configs.len());
    for (index, ((c, delta), r)) in configs.iter().zip(results).enumerate() {
        cells.push(GridCell {
            index,
            eta: c.eta,
            delta: *delta,
            tau: c.tau,
            lambda: c.lambda,
            summary: r?,
        });
    }
    let score = |c: &GridCell| match base.select_by {
        Selection::Online => c.summary.online_error,
        Selection::FinalTrain => c.summary.final_train_error,
    };
    let mut winner = 0;
    for (i, c) in cells.iter().enumerate() {
        if score(c) < score(&cells[winner]) {
            winner = i;
        }
    }
    Ok(GridSummary {
        select_by: base.select_by,
        winner,
        cells,
    })
}

pub fn run_grid(base: &RunConfig) -> Result<GridSummary> {
    base.validate()?;
    run_grid_on(base, &load_dataset(base)?)
}

/// Writes `<prefix>.grid.csv` (one row per cell) and `<prefix>.grid.json`.
pub fn write_grid(grid: &GridSummary, prefix: &str) -> Result<(PathBuf, PathBuf)> {
    let csv_path = with_suffix(prefix, ".grid.csv");
    let json_path = with_suffix(prefix, ".grid.json");
    create_parent(&csv_path)?;
    let mut out = csv::Writer::from_writer(fs::File::create(&csv_path)?);
    out.write_record([
        "cell",
        "eta",
        "delta_r",
        "delta_c",
        "tau",
        "lambda",
        "online_error",
        "final_train_error",
        "test_error",
        "winner",
    ])?;
    for c in &grid.cells {
        let s = &c.summary;
        out.write_record([
            c.index.to_string(),
            fmt_f64(c.eta),
            fmt_f64(s.delta_r),
            fmt_f64(s.delta_c),
            fmt_f64(c.tau),
            fmt_f64(c.lambda),
            fmt_f64(s.online_error),
            fmt_f64(s.final_train_error),
            fmt_f64(s.test_error),
            (c.index == grid.winner).to_string(),
        ])?;
    }
    out.flush()?;
    write_json(grid, &json_path)?;
    Ok((csv_path, json_path))
}
