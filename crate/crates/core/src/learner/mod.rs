//! The online game loop, losses, regret accounting and the compressed learner.

mod comp;
mod game;
mod loss;
mod regret;

pub use comp::CompAdaGrad;
pub use game::{run_game, GameOptions, RunTrace, TraceRow};
pub use loss::{Instance, LossFn, LossKind, Quadratic, RoundLoss};
pub use regret::{
    batch_objective, bound_rhs_comp, check_analyzed, compute_regret, minimize_composite, BoundTerms, RegretLedger,
    RegretReport, LEDGER_MAX_N, LEDGER_MAX_T,
};

use crate::composite::Composite;
use crate::error::Result;

/// A learner playing the online game: predicts `iterate()`, then receives a (sub)gradient.
pub trait OnlineLearner {
    fn name(&self) -> &'static str;

    fn dim(&self) -> usize;

    fn iterate(&self) -> &[f64];

    fn composite(&self) -> Composite;

    /// Consumes the gradient at the current iterate and moves to the next one.
    fn step(&mut self, g: &[f64]) -> Result<()>;
}

impl<L: OnlineLearner + ?Sized> OnlineLearner for Box<L> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn iterate(&self) -> &[f64] {
        (**self).iterate()
    }

    fn composite(&self) -> Composite {
        (**self).composite()
    }

    fn step(&mut self, g: &[f64]) -> Result<()> {
        (**self).step(g)
    }
}
