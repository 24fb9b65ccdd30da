//! Round trip through svmlight text, prototype features, and one run with written outputs.

use compadagrad::harness::{
    gen_lowdim_correlated, gen_rbf_prototypes, load_svmlight, run_on_dataset, write_experiment, write_svmlight,
    RunConfig,
};

fn main() -> compadagrad::Result<()> {
    let dir = std::env::temp_dir().join("compadagrad-svmlight-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("data.svm");
    let raw = gen_lowdim_correlated(32, 3, 600, 0.1, 8)?;
    write_svmlight(&raw, std::fs::File::create(&path)?)?;
    let data = load_svmlight(&path, None)?;
    let feats = gen_rbf_prototypes(&data, 60, 2.0, 8)?;
    println!("{} rows, {} raw features, {} prototype features", feats.len(), data.n, feats.n);

    let cfg = RunConfig {
        k: 8,
        batch_size: 5,
        permutations: 2,
        ..RunConfig::default()
    };
    let exp = run_on_dataset(&cfg, &feats)?;
    let prefix = dir.join("run");
    let (trace, summary) = write_experiment(&exp, prefix.to_str().expect("utf-8 path"))?;
    println!("test error {:.4}; wrote {} and {}", exp.summary.test_error, trace.display(), summary.display());
    Ok(())
}
