//! Walsh-Hadamard transform kernels.
//!
//! Every kernel computes the unnormalized transform `H v`, where `H` is the
//! Sylvester-ordered matrix with entries `H[i][j] = (-1)^popcount(i & j)`.
//! Orthogonal scaling by `1/sqrt(n)` is left to callers.

use crate::error::{check_len, Error, Result};

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    n: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Builds a sparse vector from `(index, value)` pairs in any order.
    /// Zero values are dropped; duplicate or out-of-range indices are rejected.
    pub fn new(n: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.retain(|&(_, v)| v != 0.0);
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::MalformedSparse(format!("duplicate index {}", w[0].0)));
            }
        }
        if let Some(&(i, _)) = entries.last() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
        }
        if entries.iter().any(|&(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite("sparse vector"));
        }
        Ok(Self { n, entries })
    }

    pub fn from_dense(v: &[f64]) -> Self {
        let entries = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(i, &x)| (i, x))
            .collect();
        Self { n: v.len(), entries }
    }

    /// Scatters `values` into positions `rows` (the `R^T z` operation).
    pub fn scatter(n: usize, rows: &[usize], values: &[f64]) -> Result<Self> {
        if rows.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: values.len(),
            });
        }
        Self::new(n, rows.iter().copied().zip(values.iter().copied()).collect())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

pub(crate) fn check_pow2(n: usize) -> Result<()> {
    if n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo { len: n })
    }
}

/// Sign of `H[i][j]` in Sylvester ordering.
#[inline]
pub fn hadamard_sign(i: usize, j: usize) -> f64 {
    if (i & j).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// In-place butterfly transform. `v.len()` must be a power of two.
pub fn wht_dense_in_place(v: &mut [f64]) -> Result<()> {
    check_pow2(v.len())?;
    butterfly(v);
    Ok(())
}

fn butterfly(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Dense transform `H v` in `O(n log n)`.
pub fn wht_dense(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    wht_dense_in_place(&mut out)?;
    Ok(out)
}

/// `value * H e_i`: the doubling construction with exactly `n - 1` copies.
pub fn wht_one_sparse(n: usize, index: usize, value: f64) -> Result<Vec<f64>> {
    let mut ops = 0;
    wht_one_sparse_counted(n, index, value, &mut ops)
}

/// As [`wht_one_sparse`], adding the number of component copies to `ops`.
pub fn wht_one_sparse_counted(n: usize, index: usize, value: f64, ops: &mut u64) -> Result<Vec<f64>> {
    check_pow2(n)?;
    if index >= n {
        return Err(Error::IndexOutOfRange { index, len: n });
    }
    let mut out = vec![0.0; n];
    one_sparse_into(&mut out, index, value, ops);
    Ok(out)
}

/// Writes `value * H e_index` into `out`, reusing its storage.
pub fn wht_one_sparse_into(out: &mut [f64], index: usize, value: f64) -> Result<()> {
    check_pow2(out.len())?;
    if index >= out.len() {
        return Err(Error::IndexOutOfRange { index, len: out.len() });
    }
    let mut ops = 0;
    one_sparse_into(out, index, value, &mut ops);
    Ok(())
}

fn one_sparse_into(out: &mut [f64], mut index: usize, value: f64, ops: &mut u64) {
    let n = out.len();
    out[0] = value;
    let mut m = 1;
    while m < n {
        let (done, rest) = out.split_at_mut(m);
        let dst = &mut rest[..m];
        if index.is_multiple_of(2) {
            dst.copy_from_slice(done);
        } else {
            for (d, s) in dst.iter_mut().zip(done.iter()) {
                *d = -*s;
            }
        }
        *ops += m as u64;
        index /= 2;
        m *= 2;
    }
}

/// Transform of a sparse input by recursive halving, skipping zero halves.
pub fn wht_sparse(v: &SparseVector) -> Result<Vec<f64>> {
    let mut ops = 0;
    wht_sparse_counted(v, &mut ops)
}

/// As [`wht_sparse`], adding the arithmetic operation count to `ops`.
///
/// Additions, subtractions, copies and negations each count as one operation;
/// zero fills count one per written component.
pub fn wht_sparse_counted(v: &SparseVector, ops: &mut u64) -> Result<Vec<f64>> {
    check_pow2(v.n)?;
    let mut out = vec![0.0; v.n];
    sparse_rec(&v.entries, &mut out, ops);
    Ok(out)
}

/// As [`wht_sparse`], overwriting `out` (length `v.len()`) instead of allocating.
pub fn wht_sparse_into(v: &SparseVector, out: &mut [f64]) -> Result<()> {
    check_pow2(v.n)?;
    check_len(v.n, out.len())?;
    let mut ops = 0;
    sparse_rec(&v.entries, out, &mut ops);
    Ok(())
}

fn sparse_rec(entries: &[(usize, f64)], out: &mut [f64], ops: &mut u64) {
    let m = out.len();
    match entries.len() {
        0 => {
            out.fill(0.0);
            *ops += m as u64;
            return;
        }
        1 => {
            let (i, v) = entries[0];
            one_sparse_into(out, i, v, ops);
            return;
        }
        r if 2 * r >= m => {
            // Dense enough that the butterfly is cheaper than further splitting.
            out.fill(0.0);
            for &(i, v) in entries {
                out[i] = v;
            }
            butterfly(out);
            *ops += (m * m.trailing_zeros() as usize) as u64;
            return;
        }
        _ => {}
    }

    let h = m / 2;
    let split = entries.partition_point(|&(i, _)| i < h);
    let (top, bot) = entries.split_at(split);
    let (lo, hi) = out.split_at_mut(h);

    if bot.is_empty() {
        sparse_rec(top, lo, ops);
        hi.copy_from_slice(lo);
        *ops += h as u64;
    } else if top.is_empty() {
        let shifted: Vec<(usize, f64)> = bot.iter().map(|&(i, v)| (i - h, v)).collect();
        sparse_rec(&shifted, lo, ops);
        for (d, s) in hi.iter_mut().zip(lo.iter_mut()) {
            *d = -*s;
        }
        *ops += h as u64;
    } else {
        let (sum, diff) = merge_halves(top, bot, h);
        *ops += (sum.len() + diff.len()) as u64;
        sparse_rec(&sum, lo, ops);
        sparse_rec(&diff, hi, ops);
    }
}

/// Sparse `x_top + x_bot` and `x_top - x_bot` over relative indices `[0, h)`.
type Entries = Vec<(usize, f64)>;

fn merge_halves(top: &[(usize, f64)], bot: &[(usize, f64)], h: usize) -> (Entries, Entries) {
    let cap = top.len() + bot.len();
    let mut sum = Vec::with_capacity(cap);
    let mut diff = Vec::with_capacity(cap);
    let (mut a, mut b) = (0, 0);
    while a < top.len() || b < bot.len() {
        let ta = top.get(a).map(|e| e.0).unwrap_or(usize::MAX);
        let tb = bot.get(b).map(|e| e.0 - h).unwrap_or(usize::MAX);
        let (idx, x, y) = if ta < tb {
            a += 1;
            (ta, top[a - 1].1, 0.0)
        } else if tb < ta {
            b += 1;
            (tb, 0.0, bot[b - 1].1)
        } else {
            a += 1;
            b += 1;
            (ta, top[a - 1].1, bot[b - 1].1)
        };
        let (s, d) = (x + y, x - y);
        if s != 0.0 {
            sum.push((idx, s));
        }
        if d != 0.0 {
            diff.push((idx, d));
        }
    }
    (sum, diff)
}

/// Selected outputs `(H v)[rows]`, in increasing row order.
///
/// The output-side recursion only descends into halves that contain a
/// selected row, giving `O(n log k)` work for `k` rows.
pub fn wht_trimmed(v: &[f64], rows: &[usize]) -> Result<Vec<f64>> {
    let mut ops = 0;
    wht_trimmed_counted(v, rows, &mut ops)
}

pub fn wht_trimmed_counted(v: &[f64], rows: &[usize], ops: &mut u64) -> Result<Vec<f64>> {
    check_pow2(v.len())?;
    check_rows(rows, v.len())?;
    let mut buf = v.to_vec();
    let mut out = Vec::with_capacity(rows.len());
    trimmed_rec(&mut buf, rows, 0, &mut out, ops);
    Ok(out)
}

/// As [`wht_trimmed`], transforming `buf` in place (its contents are destroyed) and
/// appending the selected outputs to `out`.
pub fn wht_trimmed_in_place(buf: &mut [f64], rows: &[usize], out: &mut Vec<f64>) -> Result<()> {
    check_pow2(buf.len())?;
    check_rows(rows, buf.len())?;
    let mut ops = 0;
    trimmed_rec(buf, rows, 0, out, &mut ops);
    Ok(())
}

pub(crate) fn check_rows(rows: &[usize], n: usize) -> Result<()> {
    for w in rows.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::MalformedSparse("row selector must be strictly increasing".into()));
        }
    }
    match rows.last() {
        Some(&r) if r >= n => Err(Error::IndexOutOfRange { index: r, len: n }),
        _ => Ok(()),
    }
}

fn trimmed_rec(buf: &mut [f64], rows: &[usize], base: usize, out: &mut Vec<f64>, ops: &mut u64) {
    let m = buf.len();
    if rows.is_empty() {
        return;
    }
    if m == 1 {
        out.push(buf[0]);
        return;
    }
    if rows.len() == m {
        butterfly(buf);
        *ops += (m * m.trailing_zeros() as usize) as u64;
        out.extend_from_slice(buf);
        return;
    }
    let h = m / 2;
    let split = rows.partition_point(|&r| r < base + h);
    let (top, bot) = rows.split_at(split);
    let (lo, hi) = buf.split_at_mut(h);
    match (top.is_empty(), bot.is_empty()) {
        (false, false) => {
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
            *ops += m as u64;
        }
        (false, true) => {
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a += *b;
            }
            *ops += h as u64;
        }
        _ => {
            for (b, a) in hi.iter_mut().zip(lo.iter()) {
                *b = *a - *b;
            }
            *ops += h as u64;
        }
    }
    trimmed_rec(lo, top, base, out, ops);
    trimmed_rec(hi, bot, base + h, out, ops);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_matrix_apply(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|i| (0..n).map(|j| hadamard_sign(i, j) * v[j]).sum())
            .collect()
    }

    #[test]
    fn dense_small_cases() {
        assert_eq!(wht_dense(&[1.0, 0.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(wht_dense(&[1.0, 1.0, 1.0, 1.0]).unwrap(), vec![4.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn dense_matches_sylvester_matrix() {
        let v: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let fast = wht_dense(&v).unwrap();
        let slow = dense_matrix_apply(&v);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_twice_scales_by_n() {
        let v: Vec<f64> = (0..32).map(|i| i as f64 - 7.5).collect();
        let twice = wht_dense(&wht_dense(&v).unwrap()).unwrap();
        for (a, b) in twice.iter().zip(&v) {
            assert!((a - 32.0 * b).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(wht_dense(&[1.0, 2.0, 3.0]), Err(Error::NotPowerOfTwo { len: 3 })));
        assert!(wht_one_sparse(6, 0, 1.0).is_err());
    }

    #[test]
    fn one_sparse_examples() {
        assert_eq!(wht_one_sparse(4, 0, 1.0).unwrap(), vec![1.0; 4]);
        assert_eq!(wht_one_sparse(4, 3, 2.0).unwrap(), vec![2.0, -2.0, -2.0, 2.0]);
        let mut e5 = vec![0.0; 8];
        e5[5] = 1.0;
        assert_eq!(wht_one_sparse(8, 5, 1.0).unwrap(), wht_dense(&e5).unwrap());
        assert!(matches!(
            wht_one_sparse(8, 8, 1.0),
            Err(Error::IndexOutOfRange { index: 8, len: 8 })
        ));
    }

    #[test]
    fn one_sparse_copy_count() {
        for m in 0..12 {
            let n = 1usize << m;
            let mut ops = 0;
            wht_one_sparse_counted(n, n / 3, 1.0, &mut ops).unwrap();
            assert_eq!(ops, n as u64 - 1);
        }
    }

    #[test]
    fn sparse_top_half_support_duplicates() {
        let v = SparseVector::new(16, vec![(1, 2.0), (5, -1.0)]).unwrap();
        let out = wht_sparse(&v).unwrap();
        assert_eq!(out[..8], out[8..]);
    }

    #[test]
    fn sparse_vector_validation() {
        assert!(SparseVector::new(4, vec![(1, 1.0), (1, 2.0)]).is_err());
        assert!(SparseVector::new(4, vec![(4, 1.0)]).is_err());
        let v = SparseVector::new(4, vec![(2, 1.0), (0, 0.0), (1, 3.0)]).unwrap();
        assert_eq!(v.entries(), &[(1, 3.0), (2, 1.0)]);
    }

    #[test]
    fn trimmed_single_row() {
        let v: Vec<f64> = (0..16).map(|i| (i * i) as f64 * 0.1).collect();
        let full = dense_matrix_apply(&v);
        for j in 0..16 {
            let t = wht_trimmed(&v, &[j]).unwrap();
            assert!((t[0] - full[j]).abs() < 1e-12);
        }
        assert_eq!(wht_trimmed(&v, &(0..16).collect::<Vec<_>>()).unwrap(), wht_dense(&v).unwrap());
    }

    #[test]
    fn trimmed_rejects_unsorted_rows() {
        assert!(wht_trimmed(&[0.0; 8], &[3, 1]).is_err());
        assert!(wht_trimmed(&[0.0; 8], &[8]).is_err());
    }
}
