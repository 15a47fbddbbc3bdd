// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bnb;
pub mod error;
pub mod gp;
pub mod harness;
pub mod kernels;
pub mod lattice;
pub mod metrics;
pub mod sampler;
pub mod trace;
