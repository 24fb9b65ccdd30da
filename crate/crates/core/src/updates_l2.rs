//! Composite mirror-descent step for `phi(x) = (lambda/2) ||x||^2`.
//!
//! With `g = eta g_t` and `lam = eta lambda` the step minimizes
//!
//! ```text
//! <g, x> + 1/2 ||Pi (x - x_t)||_K^2 + 1/2 ||P_perp (x - x_t)||_D^2 + lam/2 ||x||^2
//! ```
//!
//! which splits into an unconstrained k-dimensional solve on `Im(P)` and an
//! equality-constrained diagonal problem on `Im(P_perp)` handled through its
//! k-dimensional dual.

use nalgebra::{DMatrix, DVector};

use crate::adastate::{CompState, RegularizerPair};
use crate::error::{check_finite, check_len, Error, Result};
use crate::transforms::{wht_one_sparse_into, wht_trimmed_in_place, SketchOperator};

/// `R H diag(w) H^T R^T` with orthogonal `H`, i.e. `Pi~ diag(w) Pi~^T`.
///
/// Column `j` is the 1-sparse transform of `e_{rows[j]}`, scaled by `w`, then
/// trimmed back to the selected rows: `O(n log k)` per column.
pub fn build_sketch_gram(sketch: &SketchOperator, w: &[f64]) -> Result<DMatrix<f64>> {
    let n = sketch.n();
    check_len(n, w.len())?;
    let rows = sketch.rows();
    let k = rows.len();
    let inv_n = 1.0 / n as f64;
    let mut m = DMatrix::zeros(k, k);
    let mut col = vec![0.0; n];
    let mut t = Vec::with_capacity(k);
    for (j, &r) in rows.iter().enumerate() {
        wht_one_sparse_into(&mut col, r, 1.0)?;
        for (c, wi) in col.iter_mut().zip(w) {
            *c *= wi;
        }
        t.clear();
        wht_trimmed_in_place(&mut col, rows, &mut t)?;
        for (i, v) in t.iter().enumerate() {
            m[(i, j)] = v * inv_n;
        }
    }
    Ok((&m + m.transpose()) * 0.5)
}

fn cholesky_solve(m: DMatrix<f64>, rhs: DVector<f64>, what: &str) -> Result<DVector<f64>> {
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("{what} is not positive definite")))?;
    Ok(chol.solve(&rhs))
}

/// Coefficients `z` of the subspace component `Pi^T z`, from `tx = Pi~ x_t` and `tg = Pi~ g`.
///
/// `z = (s K + lam I)^{-1} (K Pi x_t - Pi g / s)` where `Pi Pi^T = s I`.
fn parallel_coeffs(sketch: &SketchOperator, k_mat: &DMatrix<f64>, tx: &[f64], tg: &[f64], lam: f64) -> Result<DVector<f64>> {
    let k = sketch.k();
    let (s, c) = (sketch.gram_scale(), sketch.scale());
    let pix = DVector::from_iterator(k, tx.iter().map(|v| v * c));
    let pig = DVector::from_iterator(k, tg.iter().map(|v| v * c));
    let rhs = k_mat * pix - pig / s;
    let m = k_mat * s + DMatrix::identity(k, k) * lam;
    cholesky_solve(m, rhs, "s K + lam I")
}

/// Subspace component `Pi^T (s K + lam I)^{-1} (K Pi x_t - Pi g / s)` where `Pi Pi^T = s I`.
pub fn solve_parallel(state: &CompState, k_mat: &DMatrix<f64>, g_eff: &[f64], lam: f64) -> Result<Vec<f64>> {
    let sketch = state.sketch();
    check_len(sketch.n(), g_eff.len())?;
    if sketch.k() == 0 {
        return Ok(vec![0.0; sketch.n()]);
    }
    let tx = sketch.apply_unscaled(state.x())?;
    let tg = sketch.apply_unscaled(g_eff)?;
    let z = parallel_coeffs(sketch, k_mat, &tx, &tg, lam)?;
    sketch.apply_adjoint(z.as_slice())
}

/// Complement component and the multiplier of its constraint `Pi x = 0`.
#[derive(Clone, Debug)]
pub struct PerpSolution {
    pub x: Vec<f64>,
    pub nu: Vec<f64>,
}

/// Dual pieces of the complement problem: `x = b (y - Pi^T nu)`.
struct PerpDual {
    y: Vec<f64>,
    b: Vec<f64>,
    nu: DVector<f64>,
}

/// `g_eff = eta g`; `tx` and `tg` are `Pi~ x_t` and `Pi~ g`. `buf` is length-n scratch.
#[allow(clippy::too_many_arguments)]
fn perp_dual(
    state: &CompState,
    d: &[f64],
    g: &[f64],
    eta: f64,
    tx: &[f64],
    tg: &[f64],
    lam: f64,
    buf: &mut [f64],
) -> Result<PerpDual> {
    let sketch = state.sketch();
    let k = sketch.k();
    let b: Vec<f64> = d.iter().map(|&di| 1.0 / (di + lam)).collect();
    if b.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Singular("D + lam I must be entrywise positive".into()));
    }
    // y = -P_perp g_eff + D P_perp x_t, with P v = Sigma H R^T Pi~ v.
    sketch.apply_unscaled_adjoint_into(tg, buf)?;
    let mut y: Vec<f64> = g.iter().zip(buf.iter()).map(|(gi, pg)| eta * (pg - gi)).collect();
    sketch.apply_unscaled_adjoint_into(tx, buf)?;
    for (((yi, xi), px), di) in y.iter_mut().zip(state.x()).zip(buf.iter()).zip(d) {
        *yi += di * (xi - px);
    }
    if k == 0 {
        return Ok(PerpDual { y, b, nu: DVector::zeros(0) });
    }
    for ((o, yi), bi) in buf.iter_mut().zip(&y).zip(&b) {
        *o = yi * bi;
    }
    let rhs = DVector::from_vec(sketch.apply(buf)?);
    let m = build_sketch_gram(sketch, &b)? * sketch.gram_scale();
    let nu = cholesky_solve(m, rhs, "Pi B Pi^T")?;
    Ok(PerpDual { y, b, nu })
}

/// Solves the complement problem through its dual.
///
/// With `B = (D + lam I)^{-1}` and `y = -P_perp g + D P_perp x_t`, the
/// multiplier is `nu = (Pi B Pi^T)^{-1} Pi B y` and `x = B (y - Pi^T nu)`.
pub fn solve_perp(state: &CompState, d: &[f64], g_eff: &[f64], lam: f64) -> Result<PerpSolution> {
    let sketch = state.sketch();
    let (n, k) = (sketch.n(), sketch.k());
    check_len(n, d.len())?;
    check_len(n, g_eff.len())?;
    if k == n {
        return Ok(PerpSolution {
            x: vec![0.0; n],
            nu: vec![0.0; k],
        });
    }
    let tx = sketch.apply_unscaled(state.x())?;
    let tg = sketch.apply_unscaled(g_eff)?;
    let mut buf = vec![0.0; n];
    let dual = perp_dual(state, d, g_eff, 1.0, &tx, &tg, lam, &mut buf)?;
    let pt_nu = sketch.apply_adjoint(dual.nu.as_slice())?;
    let x = dual
        .y
        .iter()
        .zip(&pt_nu)
        .zip(&dual.b)
        .map(|((yi, pi), bi)| bi * (yi - pi))
        .collect();
    Ok(PerpSolution {
        x,
        nu: dual.nu.as_slice().to_vec(),
    })
}

/// The next iterate for the squared-l2 composite term, given the metric blocks
/// for this round. `g` is the raw gradient; `eta` and `lambda` come from the state.
///
/// Equals `solve_parallel + solve_perp` on `eta g`; both halves share the two
/// sketches `Pi~ x_t`, `Pi~ g` and one scratch vector.
pub fn update_l2(state: &CompState, regs: &RegularizerPair, g: &[f64]) -> Result<Vec<f64>> {
    let sketch = state.sketch();
    let (n, k) = (state.n(), state.k());
    check_len(n, g.len())?;
    check_len(n, regs.d.len())?;
    check_finite(g, "gradient")?;
    let p = state.params();
    let lam = p.eta * p.lambda;
    let tx = sketch.apply_unscaled(state.x())?;
    let tg: Vec<f64> = sketch.apply_unscaled(g)?.iter().map(|v| p.eta * v).collect();
    let mut buf = vec![0.0; n];
    let c = sketch.scale();

    let mut x = if k == n {
        vec![0.0; n]
    } else {
        let dual = perp_dual(state, &regs.d, g, p.eta, &tx, &tg, lam, &mut buf)?;
        let mut x = dual.y;
        if k > 0 {
            let nu: Vec<f64> = dual.nu.iter().map(|v| v * c).collect();
            sketch.apply_unscaled_adjoint_into(&nu, &mut buf)?;
            for ((xi, pi), bi) in x.iter_mut().zip(&buf).zip(&dual.b) {
                *xi = bi * (*xi - pi);
            }
        } else {
            for (xi, bi) in x.iter_mut().zip(&dual.b) {
                *xi *= bi;
            }
        }
        x
    };
    if k > 0 {
        let z: Vec<f64> = parallel_coeffs(sketch, &regs.k, &tx, &tg, lam)?.iter().map(|v| v * c).collect();
        sketch.apply_unscaled_adjoint_into(&z, &mut buf)?;
        for (xi, pi) in x.iter_mut().zip(&buf) {
            *xi += pi;
        }
    }
    check_finite(&x, "l2 update")?;
    Ok(x)
}
