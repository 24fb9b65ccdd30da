use super::OnlineLearner;
use crate::adastate::{CompParams, CompState};
use crate::composite::{Composite, Regularizer};
use crate::error::Result;
use crate::transforms::SketchOperator;
use crate::updates_l1::{update_l1, LarsWorkspace};
use crate::updates_l2::update_l2;

/// The compressed full-matrix learner: full-matrix metric inside the sketch's
/// row space, diagonal metric on its complement.
#[derive(Clone, Debug)]
pub struct CompAdaGrad {
    state: CompState,
    regularizer: Regularizer,
    workspace: Option<LarsWorkspace>,
}

impl CompAdaGrad {
    pub fn new(sketch: SketchOperator, params: CompParams, regularizer: Regularizer) -> Result<Self> {
        let workspace = match regularizer {
            Regularizer::L1 => Some(LarsWorkspace::new(sketch.clone())),
            Regularizer::L2Sq => None,
        };
        Ok(Self {
            state: CompState::new(sketch, params)?,
            regularizer,
            workspace,
        })
    }

    pub fn state(&self) -> &CompState {
        &self.state
    }

    pub fn sketch(&self) -> &SketchOperator {
        self.state.sketch()
    }

    pub fn params(&self) -> &CompParams {
        self.state.params()
    }
}

impl OnlineLearner for CompAdaGrad {
    fn name(&self) -> &'static str {
        "comp_adagrad"
    }

    fn dim(&self) -> usize {
        self.state.n()
    }

    fn iterate(&self) -> &[f64] {
        self.state.x()
    }

    fn composite(&self) -> Composite {
        Composite::new(self.regularizer, self.state.params().lambda)
    }

    fn step(&mut self, g: &[f64]) -> Result<()> {
        self.state.observe_gradient(g)?;
        let regs = self.state.regularizer_matrices()?;
        let x = match self.workspace.as_mut() {
            None => update_l2(&self.state, &regs, g)?,
            Some(ws) => update_l1(&self.state, &regs, ws, g)?.x,
        };
        self.state.set_x(x)
    }
}
