// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for `condosc-core`: JSON configs in, CSV and JSON
//! artifacts out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod validate;

pub use commands::{fmt_f64, run, Artifact, Command, RunError};
pub use config::{ConfigError, RunConfig};
