//! Walsh-Hadamard kernels and the SRHT sketch built on them.

mod sketch;
mod wht;

pub use sketch::{Scaling, SketchOperator};
pub use wht::{
    hadamard_sign, wht_dense, wht_dense_in_place, wht_one_sparse, wht_one_sparse_counted, wht_one_sparse_into, wht_sparse,
    wht_sparse_into,
    wht_sparse_counted, wht_trimmed, wht_trimmed_counted, wht_trimmed_in_place, SparseVector,
};
