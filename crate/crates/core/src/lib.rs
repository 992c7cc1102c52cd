//! Transmit beampattern synthesis for colocated MIMO radar.
// Negated comparisons are used on purpose so NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod array_model;
pub mod design;
pub mod error;
pub mod numerics;
pub mod oracles;
pub mod quadrature;
pub mod rayleigh;
pub mod runner;
pub mod sdp;
pub mod sdr_recovery;

pub use error::{Error, Result};
