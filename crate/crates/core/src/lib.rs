//! Online learning with a compressed full-matrix adaptive regularizer.
//!
//! The learner keeps a full-matrix AdaGrad metric inside the row space of a
//! subsampled randomized Hadamard sketch and a diagonal AdaGrad metric on the
//! orthogonal complement, so each round costs `O(n log n + k^3)` instead of
//! the `O(n^3)` of full-matrix AdaGrad.
//!
//! The crate is organized bottom-up:
//!
//! - [`transforms`]: Walsh-Hadamard kernels and the sketch operator
//! - [`adastate`]: the adaptive statistics and the metric blocks `K`, `D`
//! - [`updates_l2`], [`updates_l1`]: the composite mirror-descent steps
//! - [`baselines`]: full-matrix and diagonal AdaGrad and online gradient descent
//! - [`learner`]: the online game, losses, regret and its bound
//! - [`harness`]: datasets, generators, experiment runs, grids and benchmarks

// `!(x >= 0.0)` guards also reject NaN; index loops mirror the triangular algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod adastate;
pub mod baselines;
pub mod composite;
pub mod error;
pub mod harness;
pub mod learner;
pub mod transforms;
pub mod updates_l1;
pub mod updates_l2;

pub use adastate::{CompParams, CompState, DeltaMode, RegularizerPair};
pub use composite::{Composite, Regularizer};
pub use error::{Error, Result};
pub use learner::{CompAdaGrad, OnlineLearner};
pub use transforms::{Scaling, SketchOperator, SparseVector};
