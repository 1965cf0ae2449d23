// SPDX-License-Identifier: Apache-2.0

//! Undriven conditional evolution of the target qubit.
//!
//! With the drive off and Δ_A negligible, each control state leaves qubit B
//! with a static 2×2 Hamiltonian whose Larmor frequency depends on the
//! control through the effective bias `ε_B + 2sJ`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::{ControlState, SystemParams};

/// Mixing angle and oscillation frequency of one conditional block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalFrame {
    pub eta: f64,
    pub omega: f64,
}

impl ConditionalFrame {
    /// Builds the frame from the rotation numerator/denominator pair
    /// (`tan η = transverse / longitudinal`).
    pub(crate) fn from_components(transverse: f64, longitudinal: f64) -> Option<Self> {
        if transverse == 0.0 && longitudinal == 0.0 {
            return None;
        }
        Some(Self { eta: transverse.atan2(longitudinal), omega: transverse.hypot(longitudinal) })
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// Real amplitudes of the initial target state `a|↑⟩ + b|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialAmplitudes {
    pub a: f64,
    pub b: f64,
}

impl InitialAmplitudes {
    pub const UP: InitialAmplitudes = InitialAmplitudes { a: 1.0, b: 0.0 };
    pub const DOWN: InitialAmplitudes = InitialAmplitudes { a: 0.0, b: 1.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        let amps = Self { a, b };
        amps.validate()?;
        Ok(amps)
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.a * self.a + self.b * self.b;
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(invalid("initial amplitudes", format!("a² + b² = {norm}, expected 1")));
        }
        Ok(())
    }
}

/// `η⁽⁰⁾ = atan2(Δ_B, ε_B + 2sJ)`, `Ω⁽⁰⁾ = √((ε_B + 2sJ)² + Δ_B²)`.
pub fn static_frame(p: &SystemParams, s: ControlState) -> Result<ConditionalFrame> {
    let bias = p.eps_b + 2.0 * s.sign() * p.coupling;
    ConditionalFrame::from_components(p.delta_b, bias).ok_or(Error::UndefinedMixingAngle)
}

/// Eigenvalues `(ε₋, ε₊)` of the undriven conditional Hamiltonian,
/// `½(sε_A ∓ Ω⁽⁰⁾_s)`.
pub fn static_eigenvalues(p: &SystemParams, s: ControlState) -> (f64, f64) {
    let omega = (p.eps_b + 2.0 * s.sign() * p.coupling).hypot(p.delta_b);
    let centre = 0.5 * s.sign() * p.eps_a;
    (centre - 0.5 * omega, centre + 0.5 * omega)
}

/// Probability that qubit B is found in `|↑⟩` at time `t`, given control
/// state `s` and initial target state `init`:
///
/// `P_{s↑}(t) = a² + [b² − (a sin η + b cos η)²] sin²(Ω t / 2)`.
pub fn static_occupation(p: &SystemParams, s: ControlState, init: InitialAmplitudes, t: f64) -> Result<f64> {
    let frame = static_frame(p, s)?;
    let (sin_eta, cos_eta) = frame.eta.sin_cos();
    let InitialAmplitudes { a, b } = init;
    let overlap = a * sin_eta + b * cos_eta;
    let swing = (0.5 * frame.omega * t).sin();
    Ok(a * a + (b * b - overlap * overlap) * swing * swing)
}

/// Coupling and bias placing the static device at its CNOT point, where the
/// non-Rabi frequency is exactly twice the Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticCnotPoint {
    pub coupling: f64,
    pub eps_b: f64,
}

/// `J = (√3/4)Δ_B`, `ε_B = 2J`.
pub fn static_cnot_point(delta_b: f64) -> Result<StaticCnotPoint> {
    if !(delta_b > 0.0) || !delta_b.is_finite() {
        return Err(invalid("delta_b", format!("must be positive and finite, got {delta_b}")));
    }
    let coupling = 3f64.sqrt() / 4.0 * delta_b;
    Ok(StaticCnotPoint { coupling, eps_b: 2.0 * coupling })
}
