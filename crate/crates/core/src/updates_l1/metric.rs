//! Implicit access to `A = Pi^T K Pi + P_perp D P_perp` without forming any `n x n` object.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::adastate::RegularizerPair;
use crate::error::{check_len, Error, Result};
use crate::transforms::SketchOperator;
use crate::updates_l2::build_sketch_gram;

/// Matrix-vector products and Gram entries of a symmetric positive definite metric.
pub trait GramOracle {
    fn dim(&self) -> usize;

    /// `A v`.
    fn apply(&mut self, v: &[f64]) -> Result<Vec<f64>>;

    /// `A[i, i]` and `A[i, j]` for every `j` in `others`.
    fn column(&mut self, i: usize, others: &[usize]) -> Result<(f64, Vec<f64>)>;
}

/// `Q = s K + R H D H^T R^T` (orthogonal `H`), where `Pi Pi^T = s I`.
pub fn precompute_q(sketch: &SketchOperator, regs: &RegularizerPair) -> Result<DMatrix<f64>> {
    let gram = build_sketch_gram(sketch, &regs.d)?;
    Ok(&regs.k * sketch.gram_scale() + gram)
}

/// `A beta = D beta - D Pi~^T (Pi~ beta) + Pi~^T (Q Pi~ beta - Pi~ D beta)`.
pub fn apply_a(sketch: &SketchOperator, q: &DMatrix<f64>, d: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
    check_len(sketch.n(), beta.len())?;
    check_len(sketch.n(), d.len())?;
    let db: Vec<f64> = d.iter().zip(beta).map(|(a, b)| a * b).collect();
    if sketch.k() == 0 {
        return Ok(db);
    }
    let t = sketch.apply_unscaled(beta)?;
    let back = sketch.apply_unscaled_adjoint(&t)?;
    let pdb = sketch.apply_unscaled(&db)?;
    let inner = q * DVector::from_vec(t) - DVector::from_vec(pdb);
    let lifted = sketch.apply_unscaled_adjoint(inner.as_slice())?;
    Ok(db
        .iter()
        .zip(d)
        .zip(back.iter().zip(&lifted))
        .map(|((dbi, di), (bi, li))| dbi - di * bi + li)
        .collect())
}

/// Per-learner LARS workspace.
///
/// The basis columns `R H e_j` depend only on the sketch, so they are cached
/// across rounds. `Q`, `D` and the products `Q R H e_j` are refreshed by
/// [`LarsWorkspace::prepare`] at the start of every update.
#[derive(Clone, Debug)]
pub struct LarsWorkspace {
    sketch: SketchOperator,
    basis_cache: HashMap<usize, Vec<f64>>,
    q: DMatrix<f64>,
    d: Vec<f64>,
    qb_cache: HashMap<usize, Vec<f64>>,
}

impl LarsWorkspace {
    pub fn new(sketch: SketchOperator) -> Self {
        let (n, k) = (sketch.n(), sketch.k());
        Self {
            sketch,
            basis_cache: HashMap::new(),
            q: DMatrix::zeros(k, k),
            d: vec![0.0; n],
            qb_cache: HashMap::new(),
        }
    }

    pub fn sketch(&self) -> &SketchOperator {
        &self.sketch
    }

    pub fn prepare(&mut self, regs: &RegularizerPair) -> Result<()> {
        self.q = precompute_q(&self.sketch, regs)?;
        self.d = regs.d.clone();
        self.qb_cache.clear();
        Ok(())
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn cached_columns(&self) -> usize {
        self.basis_cache.len()
    }

    pub fn basis(&mut self, j: usize) -> Result<&[f64]> {
        if !self.basis_cache.contains_key(&j) {
            let col = self.sketch.basis_column(j)?;
            self.basis_cache.insert(j, col);
        }
        Ok(&self.basis_cache[&j])
    }

    fn q_basis(&mut self, j: usize) -> Result<Vec<f64>> {
        if let Some(v) = self.qb_cache.get(&j) {
            return Ok(v.clone());
        }
        let b = DVector::from_column_slice(self.basis(j)?);
        let qb = (&self.q * b).as_slice().to_vec();
        self.qb_cache.insert(j, qb.clone());
        Ok(qb)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        let n = self.sketch.n();
        if i >= n {
            Err(Error::IndexOutOfRange { index: i, len: n })
        } else {
            Ok(())
        }
    }

    /// `A[i, i] = d_i + <b_i, Q b_i> - 2 d_i k/n` with `b_i = R H e_i`.
    pub fn gram_entry_diag(&mut self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        let (n, k) = (self.sketch.n(), self.sketch.k());
        let di = self.d[i];
        let qb = self.q_basis(i)?;
        let quad: f64 = self.basis(i)?.iter().zip(&qb).map(|(a, b)| a * b).sum();
        Ok(di + quad - 2.0 * di * k as f64 / n as f64)
    }

    /// `A[i, j] = s_i s_j (<b_j, Q b_i> - (d_i + d_j) <b_j, b_i>)` for `i != j`.
    ///
    /// Evaluated with `i` and `j` ordered so the result is symmetric bit for bit.
    pub fn gram_entry_cross(&mut self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let qb_lo = self.q_basis(lo)?;
        let b_lo = self.basis(lo)?.to_vec();
        let b_hi = self.basis(hi)?;
        let quad: f64 = b_hi.iter().zip(&qb_lo).map(|(a, b)| a * b).sum();
        let inner: f64 = b_hi.iter().zip(&b_lo).map(|(a, b)| a * b).sum();
        let signs = self.sketch.signs();
        Ok(signs[lo] * signs[hi] * (quad - (self.d[lo] + self.d[hi]) * inner))
    }
}

impl GramOracle for LarsWorkspace {
    fn dim(&self) -> usize {
        self.sketch.n()
    }

    fn apply(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        apply_a(&self.sketch, &self.q, &self.d, v)
    }

    fn column(&mut self, i: usize, others: &[usize]) -> Result<(f64, Vec<f64>)> {
        let diag = self.gram_entry_diag(i)?;
        let cross = others
            .iter()
            .map(|&j| self.gram_entry_cross(i, j))
            .collect::<Result<Vec<_>>>()?;
        Ok((diag, cross))
    }
}

/// An explicitly stored symmetric matrix; used by the dense baselines.
#[derive(Clone, Debug)]
pub struct DenseGram(pub DMatrix<f64>);

impl GramOracle for DenseGram {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), v.len())?;
        Ok((&self.0 * DVector::from_column_slice(v)).as_slice().to_vec())
    }

    fn column(&mut self, i: usize, others: &[usize]) -> Result<(f64, Vec<f64>)> {
        Ok((self.0[(i, i)], others.iter().map(|&j| self.0[(i, j)]).collect()))
    }
}
