use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use compadagrad::harness::{
    bench_scaling, load_dataset, run_experiment, run_grid, write_bench, write_experiment, write_grid,
    write_svmlight, BenchSpec, RunConfig,
};
use compadagrad::Error;

#[derive(Parser)]
#[command(name = "compadagrad", version, about = "Compressed adaptive-gradient online learning experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one configuration and write its trace and summary.
    Run(Common),
    /// Run a hyperparameter grid and select the best cell.
    Grid(Common),
    /// Time an operation across dimensions.
    Bench(Common),
    /// Generate the configured dataset as svmlight text.
    Gen(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output prefix.
    #[arg(long)]
    out: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cmd: Cmd) -> Result<serde_json::Value, Error> {
    match cmd {
        Cmd::Run(c) => {
            let cfg = c.resolve()?;
            let exp = run_experiment(&cfg)?;
            let (trace, summary) = write_experiment(&exp, &cfg.out)?;
            Ok(json!({
                "trace": trace,
                "summary": summary,
                "online_error": exp.summary.online_error,
                "test_error": exp.summary.test_error,
            }))
        }
        Cmd::Grid(c) => {
            let cfg = c.resolve()?;
            let grid = run_grid(&cfg)?;
            let (table, summary) = write_grid(&grid, &cfg.out)?;
            Ok(json!({
                "table": table,
                "summary": summary,
                "winner": grid.winner,
                "online_error": grid.best().summary.online_error,
                "test_error": grid.best().summary.test_error,
            }))
        }
        Cmd::Bench(c) => {
            let cfg = c.resolve()?;
            let rows = bench_scaling(&BenchSpec::from_config(&cfg), &cfg.bench_exponents)?;
            Ok(json!({ "table": write_bench(&rows, &cfg.out)?, "rows": rows.len() }))
        }
        Cmd::Gen(c) => {
            let cfg = c.resolve()?;
            let data = load_dataset(&cfg)?;
            let path = PathBuf::from(format!("{}.svm", cfg.out));
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write_svmlight(&data, file)?;
            Ok(json!({ "dataset": path, "n": data.n, "instances": data.len() }))
        }
    }
}

fn fail(kind: &str, message: String) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail("usage", e.to_string()),
    };
    match execute(cli.cmd) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), e.to_string()),
    }
}
