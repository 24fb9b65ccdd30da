//! LARS with the LASSO modification for `min_x <u, x> + 1/2 x^T A x + lam ||x||_1`.
//!
//! Viewed as a LASSO with design `A^{1/2}` and target `-A^{-1/2} u`, the
//! correlation of the covariates with the residual is `c = -(u + A beta)`.
//! The homotopy starts at `beta = 0` with level `C = ||u||_inf` and follows the
//! piecewise-linear path down to `C = lam`.

use super::cholesky::CholeskyFactor;
use super::metric::GramOracle;
use crate::error::{check_len, Error, Result};

const STOP_REL: f64 = 1e-9;
const STEP_EPS: f64 = 1e-14;

/// Solution of one LASSO solve and the path it followed.
#[derive(Clone, Debug)]
pub struct LassoPath {
    pub x: Vec<f64>,
    /// Correlation level `C` at each breakpoint (nonincreasing).
    pub breakpoints: Vec<f64>,
    pub active: Vec<usize>,
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Event {
    Target,
    Join(usize),
    Drop(usize),
}

fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn correlation<O: GramOracle>(oracle: &mut O, u: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
    let ab = oracle.apply(beta)?;
    Ok(u.iter().zip(&ab).map(|(ui, ai)| -(ui + ai)).collect())
}

/// Runs the LASSO-LARS homotopy to the target level `lam`.
pub fn lasso_lars<O: GramOracle>(oracle: &mut O, u: &[f64], lam: f64) -> Result<LassoPath> {
    let n = oracle.dim();
    check_len(n, u.len())?;
    if !(lam >= 0.0) {
        return Err(Error::InvalidParameter("lambda must be nonnegative".into()));
    }
    let cap = 3 * n.max(1);
    let mut beta = vec![0.0; n];
    let mut c: Vec<f64> = u.iter().map(|v| -v).collect();

    let (mut first, mut level) = (0, 0.0);
    for (j, &cj) in c.iter().enumerate() {
        if cj.abs() > level {
            first = j;
            level = cj.abs();
        }
    }
    let mut path = LassoPath {
        x: beta.clone(),
        breakpoints: vec![level],
        active: Vec::new(),
        steps: 0,
    };
    if level <= lam * (1.0 + STOP_REL) {
        return Ok(path);
    }

    let mut active: Vec<usize> = Vec::new();
    let mut signs: Vec<f64> = Vec::new();
    let mut in_active = vec![false; n];
    let mut chol = CholeskyFactor::new();
    let (diag, _) = oracle.column(first, &[])?;
    chol.insert(&[], diag)?;
    active.push(first);
    signs.push(sign(c[first]));
    in_active[first] = true;
    // A dropped index may not re-enter at once with its old sign; that crossing is
    // linear along the segment and vanishes at its start, so it has no other root.
    let mut just_dropped: Option<(usize, f64)> = None;

    loop {
        if path.steps >= cap {
            return Err(Error::IterationCap { solver: "lasso_lars", cap });
        }
        path.steps += 1;

        let w = chol.solve(&signs)?;
        let mut dir = vec![0.0; n];
        for (&j, &wj) in active.iter().zip(&w) {
            dir[j] = wj;
        }
        let a = oracle.apply(&dir)?;

        let mut gamma = level - lam;
        let mut event = Event::Target;
        // Lowest index wins ties: strict comparison while scanning upward.
        for j in 0..n {
            if in_active[j] {
                continue;
            }
            let blocked = just_dropped.filter(|&(d, _)| d == j).map(|(_, s)| s);
            for (side, num, den) in [(1.0, level - c[j], 1.0 - a[j]), (-1.0, level + c[j], 1.0 + a[j])] {
                if den > STEP_EPS && blocked != Some(side) {
                    // A correlation already at the level (a tie) joins with a zero step.
                    let g = num / den;
                    let g = if g > STEP_EPS * level { g } else { 0.0 };
                    if g < gamma {
                        gamma = g;
                        event = Event::Join(j);
                    }
                }
            }
        }
        for (pos, (&j, &wj)) in active.iter().zip(&w).enumerate() {
            if wj != 0.0 && beta[j] != 0.0 {
                let g = -beta[j] / wj;
                if g > STEP_EPS * level && g < gamma {
                    gamma = g;
                    event = Event::Drop(pos);
                }
            }
        }

        for (b, d) in beta.iter_mut().zip(&dir) {
            *b += gamma * d;
        }
        level -= gamma;
        just_dropped = None;

        match event {
            Event::Target => break,
            Event::Drop(pos) => {
                let j = active.remove(pos);
                let s = signs.remove(pos);
                in_active[j] = false;
                beta[j] = 0.0;
                chol.delete(pos)?;
                just_dropped = Some((j, s));
            }
            Event::Join(j) => {
                let (diag, cross) = oracle.column(j, &active)?;
                chol.insert(&cross, diag)?;
                active.push(j);
                in_active[j] = true;
            }
        }
        c = correlation(oracle, u, &beta)?;
        if let Event::Join(j) = event {
            signs.push(sign(c[j]));
        }
        path.breakpoints.push(level);
        if level <= lam * (1.0 + STOP_REL) {
            break;
        }
    }

    // Re-solve the active-set stationarity system exactly to shed path drift.
    let rhs: Vec<f64> = active
        .iter()
        .zip(&signs)
        .map(|(&j, &s)| -u[j] - lam * s)
        .collect();
    let exact = chol.solve(&rhs)?;
    if exact.iter().zip(&signs).all(|(v, s)| v * s >= 0.0) {
        for (&j, &v) in active.iter().zip(&exact) {
            beta[j] = v;
        }
    }
    path.breakpoints.push(lam.min(level));
    path.x = beta;
    path.active = active;
    Ok(path)
}
