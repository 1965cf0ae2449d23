// SPDX-License-Identifier: Apache-2.0

//! Device and drive parameters.
//!
//! Units: ħ = 1, so every energy, frequency and inverse time shares one
//! angular-frequency unit.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Static parameters of the coupled pair: qubit A (control) and qubit B (target).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub eps_a: f64,
    pub delta_a: f64,
    pub eps_b: f64,
    pub delta_b: f64,
    /// Ising coupling J.
    pub coupling: f64,
}

impl SystemParams {
    pub fn new(eps_a: f64, delta_a: f64, eps_b: f64, delta_b: f64, coupling: f64) -> Self {
        Self { eps_a, delta_a, eps_b, delta_b, coupling }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_a", self.eps_a),
            ("delta_a", self.delta_a),
            ("eps_b", self.eps_b),
            ("delta_b", self.delta_b),
            ("coupling", self.coupling),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Undriven splitting of qubit B alone, √(ε_B² + Δ_B²).
    pub fn splitting_b(&self) -> f64 {
        self.eps_b.hypot(self.delta_b)
    }
}

/// Harmonic drive `V_i cos(ωt)` on each qubit, sharing one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Drive {
    pub v_a: f64,
    pub v_b: f64,
    pub omega: f64,
}

impl Drive {
    pub const ZERO: Drive = Drive { v_a: 0.0, v_b: 0.0, omega: 0.0 };

    pub fn new(v_a: f64, v_b: f64, omega: f64) -> Self {
        Self { v_a, v_b, omega }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("v_a", self.v_a), ("v_b", self.v_b), ("omega", self.omega)] {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.omega < 0.0 {
            return Err(invalid("omega", format!("must be >= 0, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn field_a(&self, t: f64) -> f64 {
        self.v_a * (self.omega * t).cos()
    }

    pub fn field_b(&self, t: f64) -> f64 {
        self.v_b * (self.omega * t).cos()
    }

    pub fn is_zero(&self) -> bool {
        self.v_a == 0.0 && self.v_b == 0.0
    }
}

/// State of the control qubit A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlState {
    Up,
    Down,
}

impl ControlState {
    pub const ALL: [ControlState; 2] = [ControlState::Up, ControlState::Down];

    pub fn sign(self) -> f64 {
        match self {
            ControlState::Up => 1.0,
            ControlState::Down => -1.0,
        }
    }

    /// Offset of this control state's block in the two-qubit basis.
    pub fn block_offset(self) -> usize {
        match self {
            ControlState::Up => 0,
            ControlState::Down => 2,
        }
    }
}

/// Which of the two driven resonances, `ω = Ω_B ± 2Jε_B/Ω_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResonanceBranch {
    Plus,
    Minus,
}

impl ResonanceBranch {
    pub fn sign(self) -> f64 {
        match self {
            ResonanceBranch::Plus => 1.0,
            ResonanceBranch::Minus => -1.0,
        }
    }

    /// The control state that undergoes the full Rabi flip on this resonance.
    pub fn rabi_control(self) -> ControlState {
        match self {
            ResonanceBranch::Plus => ControlState::Up,
            ResonanceBranch::Minus => ControlState::Down,
        }
    }

    pub fn non_rabi_control(self) -> ControlState {
        match self {
            ResonanceBranch::Plus => ControlState::Down,
            ResonanceBranch::Minus => ControlState::Up,
        }
    }
}
