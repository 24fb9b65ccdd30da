use nalgebra::DMatrix;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;

/// Growable lower-triangular factor `L` with `L L^T = G` for an active-set Gram block.
///
/// Row `i` stores `i + 1` entries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CholeskyFactor {
    rows: Vec<Vec<f64>>,
}

impl CholeskyFactor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row/column to `G`: `cross[j] = G[new, j]` for existing `j`, `diag = G[new, new]`.
    pub fn insert(&mut self, cross: &[f64], diag: f64) -> Result<()> {
        let m = self.dim();
        if cross.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: cross.len(),
            });
        }
        let w = self.forward(cross);
        let pivot = diag - w.iter().map(|v| v * v).sum::<f64>();
        if !(pivot > PIVOT_TOL * diag.abs().max(1.0)) {
            return Err(Error::Singular(format!("cholesky pivot {pivot:e}")));
        }
        let mut row = w;
        row.push(pivot.sqrt());
        self.rows.push(row);
        Ok(())
    }

    /// Removes row/column `pos` of `G`, restoring triangularity with Givens rotations.
    pub fn delete(&mut self, pos: usize) -> Result<()> {
        let m = self.dim();
        if pos >= m {
            return Err(Error::IndexOutOfRange { index: pos, len: m });
        }
        self.rows.remove(pos);
        // rows pos.. now carry one extra entry past the diagonal
        for i in pos..m - 1 {
            let (a, b) = (self.rows[i][i], self.rows[i][i + 1]);
            let r = a.hypot(b);
            if r == 0.0 {
                return Err(Error::Singular("zero pivot during delete".into()));
            }
            let (c, s) = (a / r, b / r);
            for row in self.rows[i..].iter_mut() {
                let (x, y) = (row[i], row[i + 1]);
                row[i] = c * x + s * y;
                row[i + 1] = -s * x + c * y;
            }
            self.rows[i][i + 1] = 0.0;
        }
        for (i, row) in self.rows.iter_mut().enumerate().skip(pos) {
            row.truncate(i + 1);
        }
        Ok(())
    }

    /// Solves `L w = b`.
    fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut w = Vec::with_capacity(b.len());
        for (i, row) in self.rows.iter().enumerate() {
            let acc: f64 = row[..i].iter().zip(&w).map(|(l, x)| l * x).sum();
            w.push((b[i] - acc) / row[i]);
        }
        w
    }

    /// Solves `L L^T x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let m = self.dim();
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: b.len(),
            });
        }
        let mut x = self.forward(b);
        for i in (0..m).rev() {
            let mut acc = x[i];
            for j in i + 1..m {
                acc -= self.rows[j][i] * x[j];
            }
            x[i] = acc / self.rows[i][i];
        }
        Ok(x)
    }

    pub fn to_lower(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |i, j| if j <= i { self.rows[i][j] } else { 0.0 })
    }

    /// `L L^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let l = self.to_lower();
        &l * l.transpose()
    }
}
