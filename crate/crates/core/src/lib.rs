//! Bi-directional full-duplex MIMO link optimization.
//!
//! Jointly computes transmit precoders, receive combiners and minimum
//! transmit powers for two full-duplex nodes with per-node SINR targets and a
//! multi-tap analog self-interference canceller, plus a Monte-Carlo harness
//! comparing MRT against ZF-RQ and RQ-RQ precoding.

// negated comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod cancellation;
pub mod channel;
pub mod error;
pub mod harness;
pub mod power_control;
pub mod solver;
pub mod types;

pub use error::{Error, Result};
pub use solver::{solve, SolveResult, TxMode};
pub use types::{ComplexMatrix, ComplexVector, LinkState, SinrTargets, SystemConfig};
