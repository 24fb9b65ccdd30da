//! Subsampled randomized Hadamard transform `Pi = c * R H Sigma`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use std::cell::RefCell;

use super::wht::{check_pow2, check_rows, hadamard_sign, wht_sparse_into, wht_trimmed_in_place, SparseVector};
use crate::error::{check_len, Error, Result};

thread_local! {
    // Signed copy consumed by the trimmed transform; kept to avoid an n-sized allocation per call.
    static SCRATCH: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

/// Which normalization the sketch applies on top of the orthogonal `R H Sigma`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `Pi = sqrt(n/k) R H Sigma`, so `Pi Pi^T = (n/k) I`.
    #[default]
    Scaled,
    /// `Pi = R H Sigma`, so `Pi Pi^T = I`.
    Unscaled,
}

/// A sampled SRHT. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchOperator {
    n: usize,
    signs: Vec<f64>,
    rows: Vec<usize>,
    seed: u64,
    scaling: Scaling,
}

impl SketchOperator {
    /// Draws Rademacher signs and a uniform `k`-subset of rows from `seed`.
    pub fn sample(n: usize, k: usize, seed: u64, scaling: Scaling) -> Result<Self> {
        check_pow2(n)?;
        if k > n {
            return Err(Error::SketchTooLarge { k, n });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let signs = (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        // partial Fisher-Yates
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.random_range(i..n);
            idx.swap(i, j);
        }
        let mut rows = idx[..k].to_vec();
        rows.sort_unstable();
        Ok(Self { n, signs, rows, seed, scaling })
    }

    /// Builds an operator from explicit signs and rows (rows sorted, distinct).
    pub fn from_parts(signs: Vec<f64>, rows: Vec<usize>, scaling: Scaling) -> Result<Self> {
        let n = signs.len();
        check_pow2(n)?;
        check_rows(&rows, n)?;
        if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidParameter("signs must be +1 or -1".into()));
        }
        Ok(Self { n, signs, rows, seed: 0, scaling })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    /// The constant `s` with `Pi Pi^T = s I` (taken as 1 for an empty sketch).
    pub fn gram_scale(&self) -> f64 {
        match self.scaling {
            Scaling::Scaled if self.k() > 0 => self.n as f64 / self.k() as f64,
            _ => 1.0,
        }
    }

    /// Scale of `Pi` relative to the unscaled `R H Sigma`.
    pub fn scale(&self) -> f64 {
        self.gram_scale().sqrt()
    }

    /// `R H Sigma v` with orthogonal `H`.
    pub fn apply_unscaled(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, v.len())?;
        if self.rows.is_empty() {
            return Ok(Vec::new());
        }
        let inv = 1.0 / (self.n as f64).sqrt();
        let mut out = Vec::with_capacity(self.k());
        SCRATCH.with(|cell| -> Result<()> {
            let mut buf = cell.borrow_mut();
            buf.clear();
            buf.extend(v.iter().zip(&self.signs).map(|(a, s)| a * s));
            wht_trimmed_in_place(&mut buf, &self.rows, &mut out)
        })?;
        out.iter_mut().for_each(|x| *x *= inv);
        Ok(out)
    }

    /// `Sigma H R^T z` with orthogonal `H`.
    pub fn apply_unscaled_adjoint(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.apply_unscaled_adjoint_into(z, &mut out)?;
        Ok(out)
    }

    /// As [`Self::apply_unscaled_adjoint`], overwriting `out` (length `n`).
    pub fn apply_unscaled_adjoint_into(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.k(), z.len())?;
        check_len(self.n, out.len())?;
        if self.rows.is_empty() {
            out.fill(0.0);
            return Ok(());
        }
        let inv = 1.0 / (self.n as f64).sqrt();
        let scattered = SparseVector::scatter(self.n, &self.rows, z)?;
        wht_sparse_into(&scattered, out)?;
        for (x, s) in out.iter_mut().zip(&self.signs) {
            *x *= s * inv;
        }
        Ok(())
    }

    /// `Pi v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let c = self.scale();
        let mut out = self.apply_unscaled(v)?;
        out.iter_mut().for_each(|x| *x *= c);
        Ok(out)
    }

    /// `Pi^T z`.
    pub fn apply_adjoint(&self, z: &[f64]) -> Result<Vec<f64>> {
        let c = self.scale();
        let mut out = self.apply_unscaled_adjoint(z)?;
        out.iter_mut().for_each(|x| *x *= c);
        Ok(out)
    }

    /// Returns `(R H Sigma v, P v)`, sharing the trimmed transform.
    pub fn project_parts(&self, v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let tilde = self.apply_unscaled(v)?;
        let pv = self.apply_unscaled_adjoint(&tilde)?;
        Ok((tilde, pv))
    }

    /// Orthogonal projector onto the row space of the sketch. Independent of scaling.
    pub fn apply_projector(&self, v: &[f64]) -> Result<Vec<f64>> {
        Ok(self.project_parts(v)?.1)
    }

    /// `v - P v`.
    pub fn apply_complement(&self, v: &[f64]) -> Result<Vec<f64>> {
        let pv = self.apply_projector(v)?;
        Ok(v.iter().zip(&pv).map(|(a, b)| a - b).collect())
    }

    /// The length-`k` vector `R H e_j` with orthogonal `H`, read off the Sylvester signs.
    pub fn basis_column(&self, j: usize) -> Result<Vec<f64>> {
        if j >= self.n {
            return Err(Error::IndexOutOfRange { index: j, len: self.n });
        }
        let inv = 1.0 / (self.n as f64).sqrt();
        Ok(self.rows.iter().map(|&r| hadamard_sign(r, j) * inv).collect())
    }
}
