//! Noisy one- and two-qubit simulation of gate-based and pulse-based data
//! re-uploading classifiers.

pub mod datasets;
pub mod error;
pub mod gates;
pub mod models;
pub mod noise;
pub mod pulses;
pub mod qcore;
pub mod training;

pub use error::{Error, Result};
