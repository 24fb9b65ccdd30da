use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::learner::Instance;
use crate::transforms::SparseVector;

/// A labeled dataset whose dimension is a power of two.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub n: usize,
    pub instances: Vec<Instance>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyDataset)
        } else {
            Ok(())
        }
    }
}

type Row = (f64, Vec<(usize, f64)>);

fn parse_line(line: &str, lineno: usize) -> Result<Option<Row>> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let mut tokens = body.split_whitespace();
    let label_tok = tokens.next().unwrap_or_default();
    let label: f64 = label_tok
        .parse()
        .map_err(|_| err(format!("bad label {label_tok:?}")))?;
    if !label.is_finite() {
        return Err(err("non-finite label".into()));
    }
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for tok in tokens {
        let (i, v) = tok
            .split_once(':')
            .ok_or_else(|| err(format!("expected index:value, got {tok:?}")))?;
        let idx: usize = i.parse().map_err(|_| err(format!("bad index {i:?}")))?;
        if idx == 0 {
            return Err(err("indices are 1-based; index 0 is not allowed".into()));
        }
        let val: f64 = v.parse().map_err(|_| err(format!("bad value {v:?}")))?;
        if !val.is_finite() {
            return Err(err(format!("non-finite value at index {idx}")));
        }
        entries.push((idx - 1, val));
    }
    entries.sort_by_key(|e| e.0);
    if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(err(format!("duplicate index {}", w[0].0 + 1)));
    }
    Ok(Some((label, entries)))
}

/// Parses svmlight text (`label idx:val ...`, 1-based indices, `#` comments).
///
/// The dimension is the largest index seen (or `n_override`), rounded up to a power of two.
pub fn parse_svmlight<R: BufRead>(reader: R, n_override: Option<usize>) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut max_index = 0;
    for (i, line) in reader.lines().enumerate() {
        if let Some((label, entries)) = parse_line(&line?, i + 1)? {
            if let Some(&(j, _)) = entries.last() {
                max_index = max_index.max(j + 1);
            }
            rows.push((label, entries));
        }
    }
    let dim = match n_override {
        Some(n) if n < max_index => {
            return Err(Error::InvalidParameter(format!(
                "dimension override {n} is below the largest index {max_index}"
            )))
        }
        Some(n) => n,
        None => max_index,
    };
    let n = if rows.is_empty() && dim == 0 {
        0
    } else {
        dim.max(1).next_power_of_two()
    };
    let instances = rows
        .into_iter()
        .map(|(label, entries)| Ok(Instance::new(SparseVector::new(n, entries)?, label)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { n, instances })
}

pub fn load_svmlight(path: impl AsRef<Path>, n_override: Option<usize>) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    parse_svmlight(std::io::BufReader::new(file), n_override)
}

pub fn write_svmlight<W: Write>(data: &Dataset, mut w: W) -> Result<()> {
    for inst in &data.instances {
        write!(w, "{}", inst.label)?;
        for &(i, v) in inst.features.entries() {
            write!(w, " {}:{}", i + 1, v)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Points `U z + noise * eps` on a random `d_true`-dimensional subspace, labeled by
/// a separator that lies inside the subspace and sees only the noise-free signal.
pub fn gen_lowdim_correlated(n: usize, d_true: usize, samples: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if d_true == 0 || d_true > n {
        return Err(Error::InvalidParameter(format!("need 1 <= d_true <= n, got d_true = {d_true}, n = {n}")));
    }
    if !(noise >= 0.0) {
        return Err(Error::InvalidParameter("noise must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = gaussian_matrix(&mut rng, n, d_true).qr().q();
    let v: Vec<f64> = (0..d_true).map(|_| StandardNormal.sample(&mut rng)).collect();
    let padded = n.next_power_of_two();
    let mut instances = Vec::with_capacity(samples);
    for _ in 0..samples {
        let z: Vec<f64> = (0..d_true).map(|_| StandardNormal.sample(&mut rng)).collect();
        let score: f64 = z.iter().zip(&v).map(|(a, b)| a * b).sum();
        let label = if score >= 0.0 { 1.0 } else { -1.0 };
        let mut x = vec![0.0; padded];
        for (i, xi) in x.iter_mut().enumerate().take(n) {
            let clean: f64 = (0..d_true).map(|j| frame[(i, j)] * z[j]).sum();
            let eps: f64 = StandardNormal.sample(&mut rng);
            *xi = clean + noise * eps;
        }
        instances.push(Instance::new(SparseVector::from_dense(&x), label));
    }
    Ok(Dataset { n: padded, instances })
}

/// Gaussian-kernel features against `m` prototypes sampled from `data`.
pub fn gen_rbf_prototypes(data: &Dataset, m: usize, bandwidth: f64, seed: u64) -> Result<Dataset> {
    if !(bandwidth > 0.0) {
        return Err(Error::InvalidParameter("bandwidth must be positive".into()));
    }
    data.require_nonempty()?;
    if m == 0 || m > data.len() {
        return Err(Error::InvalidParameter(format!("need 1 <= m <= {}, got {m}", data.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, data.len(), m).into_vec();
    picks.sort_unstable();
    let protos: Vec<Vec<f64>> = picks.iter().map(|&i| data.instances[i].features.to_dense()).collect();
    let out_n = m.next_power_of_two();
    let scale = 1.0 / (2.0 * bandwidth * bandwidth);
    let instances = data
        .instances
        .iter()
        .map(|inst| {
            let x = inst.features.to_dense();
            let mut f = vec![0.0; out_n];
            for (fj, p) in f.iter_mut().zip(&protos) {
                let sq: f64 = x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
                *fj = (-sq * scale).exp();
            }
            Instance::new(SparseVector::from_dense(&f), inst.label)
        })
        .collect();
    Ok(Dataset { n: out_n, instances })
}
