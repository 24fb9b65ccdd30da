//! Composite mirror-descent step for `phi(x) = lambda ||x||_1`.
//!
//! The step is the LASSO `min_x <u, x> + 1/2 <x, A x> + lam ||x||_1` with
//! `u = eta g - A x_t`, `lam = eta lambda` and the implicit metric
//! `A = Pi^T K Pi + P_perp D P_perp`. It is solved by LARS with all metric
//! access going through [`LarsWorkspace`].

mod cholesky;
mod lars;
mod metric;

pub use cholesky::CholeskyFactor;
pub use lars::{lasso_lars, LassoPath};
pub use metric::{apply_a, precompute_q, DenseGram, GramOracle, LarsWorkspace};

use crate::adastate::{CompState, RegularizerPair};
use crate::error::{check_finite, check_len, Error, Result};

/// The next iterate for the l1 composite term. `ws` must belong to the state's sketch.
pub fn update_l1(
    state: &CompState,
    regs: &RegularizerPair,
    ws: &mut LarsWorkspace,
    g: &[f64],
) -> Result<LassoPath> {
    let n = state.n();
    check_len(n, g.len())?;
    check_finite(g, "gradient")?;
    if ws.sketch() != state.sketch() {
        return Err(Error::InvalidParameter("workspace built for a different sketch".into()));
    }
    let p = state.params();
    let k = state.k();
    let weak_perp = k < n && regs.d.iter().any(|&d| d <= 0.0);
    let weak_sub = k > 0 && p.delta_r <= 0.0;
    if weak_perp || weak_sub {
        return Err(Error::Singular("l1 update needs positive ridge constants and tau".into()));
    }
    ws.prepare(regs)?;
    let ax = ws.apply(state.x())?;
    let u: Vec<f64> = g.iter().zip(&ax).map(|(gi, ai)| p.eta * gi - ai).collect();
    let path = lasso_lars(ws, &u, p.eta * p.lambda)?;
    check_finite(&path.x, "l1 update")?;
    Ok(path)
}
