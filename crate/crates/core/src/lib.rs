// SPDX-License-Identifier: Apache-2.0

//! Conditional quantum oscillations of two coupled qubits.
//!
//! Qubit A (control) and qubit B (target) are coupled through `Jσ^zσ^z`.
//! When the control's tunnelling is negligible the Hamiltonian splits into
//! two conditional 2×2 blocks, and the target oscillates with a frequency and
//! amplitude that depend on the control state. Tuning the drive so that the
//! resonant (Rabi) and off-resonant (non-Rabi) oscillations are synchronised
//! realises a CNOT; suppressing the non-Rabi amplitude realises a
//! controlled-U.
//!
//! Modules, bottom up:
//! - [`hamiltonian`]: Pauli algebra, Hamiltonians, exact propagators
//! - [`static_dynamics`]: undriven closed forms
//! - [`rwa`]: rotating-wave closed forms and validity ratios
//! - [`gate`]: probability tables, fidelity, frequency matching
//! - [`oracle`]: exact driven Schrödinger evolution
//! - [`sweep`]: synchronisation search and parameter sweeps

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gate;
pub mod hamiltonian;
pub mod ode;
pub mod oracle;
pub mod params;
pub mod rwa;
pub mod static_dynamics;
pub mod sweep;

pub use error::{Error, Result};
pub use params::{ControlState, Drive, ResonanceBranch, SystemParams};
