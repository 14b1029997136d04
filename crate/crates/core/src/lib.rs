// SPDX-License-Identifier: Apache-2.0

//! Exact, reproducible experiments on learning infinite binary sequences:
//! extrapolators that guess the next bit, forecasters that output next-bit
//! probabilities, their adversaries, and category certificates.

pub mod category;
pub mod error;
pub mod extrapolation;
pub mod forecasting_eval;
pub mod measures;
pub mod rational;
pub mod registry;
pub mod seq_core;

pub use error::{Error, Result};
pub use rational::Rational;
pub use seq_core::{bits, BitStream, BitString, IndexSet, Verdict};
