//! Constant-round resettable zero-knowledge arguments with concurrent
//! soundness in the bare public-key model, plus the adversarial harness
//! used to exercise them.

pub mod circuit;
pub mod codec;
pub mod commitments;
pub mod primitives;
pub mod sigma;
pub mod rszk;
pub mod bpk;
pub mod harness;
pub mod vectors;
