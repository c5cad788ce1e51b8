// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod bounds;
pub mod brute;
pub mod error;
pub mod geo;
pub mod harness;
pub mod instance;
pub mod linalg;
pub mod minimax;
pub mod minimization;
pub mod oracle;
pub mod prox;
pub mod reference;
pub mod zero_chain;

pub use error::{Error, Result};
