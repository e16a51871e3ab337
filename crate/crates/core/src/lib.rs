//! Digital twin of a dual-diaphragm pneumatic pressure cell with
//! vibrating-cantilever pickups.
//!
//! The crate models the mechanics (shell diaphragm deflection, strip and
//! wire vibration), synthesizes the opto-coupler signal, runs the
//! acquisition chain (duty-cycled excitation, 2 kHz sampling, FFT
//! frequency estimation, lookup-table inversion) and produces average and
//! differential pressure readings with 4–20 mA transmitter outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cantilever;
pub mod cell;
pub mod error;
pub mod experiment;
pub mod shell;
pub mod signal;
pub mod wire;

pub use error::{Error, Result};
