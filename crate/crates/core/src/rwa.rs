// SPDX-License-Identifier: Apache-2.0

//! Driven conditional oscillations in the rotating-wave approximation.
//!
//! Qubit B is first rotated into its own eigenbasis `{|0⟩, |1⟩}` by
//! `U(η⁽⁰⁾_B)`, `η⁽⁰⁾_B = atan2(Δ_B, ε_B)`. In that basis the coupling shifts
//! the splitting to `Ω⁽⁰⁾_B ± 2Jε_B/Ω⁽⁰⁾_B` depending on the control state, and
//! the transverse part of the drive, `V_B Δ_B/Ω⁽⁰⁾_B cos ωt`, becomes a static
//! field of half that strength in the frame rotating at `ω`.
//!
//! The frame rotation `exp(iωtσ^z/2)` commutes with `σ^z`, so populations
//! computed here compare directly to lab-frame populations measured in the
//! rotated basis.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{pauli, CMat2, Pauli};
use crate::params::{ControlState, Drive, ResonanceBranch, SystemParams};
use crate::static_dynamics::ConditionalFrame;

/// Default cutoff applied to each of the three validity ratios.
pub const DEFAULT_REGIME_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaContext {
    /// `Ω⁽⁰⁾_B = √(ε_B² + Δ_B²)`.
    pub omega0_b: f64,
    /// `η⁽⁰⁾_B = atan2(Δ_B, ε_B)`.
    pub eta0_b: f64,
    /// Conditional level shift `2Jε_B/Ω⁽⁰⁾_B`.
    pub shift: f64,
    /// Rotating-frame transverse field `Δ_B V_B / (2Ω⁽⁰⁾_B)` (signed).
    pub drive_strength: f64,
}

impl RwaContext {
    /// `ω − Ω⁽⁰⁾_B − 2sJε_B/Ω⁽⁰⁾_B`.
    pub fn detuning(&self, omega: f64, s: ControlState) -> f64 {
        omega - self.omega0_b - s.sign() * self.shift
    }

    pub fn resonance(&self, branch: ResonanceBranch) -> f64 {
        self.omega0_b + branch.sign() * self.shift
    }
}

pub fn rwa_context(p: &SystemParams, d: &Drive) -> Result<RwaContext> {
    let omega0_b = p.splitting_b();
    if !(omega0_b > 0.0) {
        return Err(Error::ZeroSplitting);
    }
    Ok(RwaContext {
        omega0_b,
        eta0_b: p.delta_b.atan2(p.eps_b),
        shift: 2.0 * p.coupling * p.eps_b / omega0_b,
        drive_strength: p.delta_b * d.v_b / (2.0 * omega0_b),
    })
}

/// Static rotating-frame Hamiltonian for control state `s`:
/// `½[(Ω⁽⁰⁾_B + 2sJε_B/Ω⁽⁰⁾_B − ω)σ^z + sε_A σ⁰ + (V_B/2)(Δ_B/Ω⁽⁰⁾_B)σ^x]`.
pub fn effective_hamiltonian(p: &SystemParams, d: &Drive, s: ControlState) -> Result<CMat2> {
    let ctx = rwa_context(p, d)?;
    let z = -ctx.detuning(d.omega, s);
    Ok(pauli(Pauli::Z).map(|e| e * (0.5 * z))
        + pauli(Pauli::Id).map(|e| e * (0.5 * s.sign() * p.eps_a))
        + pauli(Pauli::X).map(|e| e * (0.5 * ctx.drive_strength)))
}

/// Conditional frequency `Ω_{B:s}` and angle `η_{B:s}` with
/// `sin η_{B:s} = (Δ_B V_B / 2Ω⁽⁰⁾_B) / Ω_{B:s}`.
pub fn conditional_frequency(p: &SystemParams, d: &Drive, s: ControlState) -> Result<ConditionalFrame> {
    let ctx = rwa_context(p, d)?;
    ConditionalFrame::from_components(ctx.drive_strength, ctx.detuning(d.omega, s)).ok_or(Error::DegenerateFrame)
}

/// `P_{|s1⟩←|s0⟩}(t) = sin²η_{B:s} sin²(Ω_{B:s} t / 2)`.
pub fn transition_probability(p: &SystemParams, d: &Drive, s: ControlState, t: f64) -> Result<f64> {
    let frame = conditional_frequency(p, d, s)?;
    Ok(flip_probability(&frame, t))
}

pub(crate) fn flip_probability(frame: &ConditionalFrame, t: f64) -> f64 {
    let amp = frame.eta.sin();
    let swing = (0.5 * frame.omega * t).sin();
    amp * amp * swing * swing
}

/// Resonant Rabi frequency `|V_B| Δ_B / (2Ω⁽⁰⁾_B)`; independent of J.
pub fn rabi_frequency(p: &SystemParams, d: &Drive) -> Result<f64> {
    Ok(rwa_context(p, d)?.drive_strength.abs())
}

/// Off-resonant frequency `[16J²(ε_B/Ω⁽⁰⁾_B)² + (V_B²/4)(Δ_B/Ω⁽⁰⁾_B)²]^½`.
pub fn non_rabi_frequency(p: &SystemParams, d: &Drive) -> Result<f64> {
    let ctx = rwa_context(p, d)?;
    Ok((2.0 * ctx.shift).hypot(ctx.drive_strength))
}

/// `η_{n-R} = atan2(Δ_B V_B, 8Jε_B)`; `sin²η_{n-R}` is the non-Rabi amplitude.
pub fn non_rabi_angle(p: &SystemParams, d: &Drive) -> Result<f64> {
    let y = p.delta_b * d.v_b;
    let x = 8.0 * p.coupling * p.eps_b;
    if y == 0.0 && x == 0.0 {
        return Err(Error::UndefinedMixingAngle);
    }
    Ok(y.atan2(x))
}

/// `(Ω⁽⁰⁾_B + 2Jε_B/Ω⁽⁰⁾_B, Ω⁽⁰⁾_B − 2Jε_B/Ω⁽⁰⁾_B)`.
pub fn resonant_frequencies(p: &SystemParams) -> Result<(f64, f64)> {
    let ctx = rwa_context(p, &Drive::ZERO)?;
    Ok((ctx.resonance(ResonanceBranch::Plus), ctx.resonance(ResonanceBranch::Minus)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationPair {
    pub rabi: ConditionalFrame,
    pub non_rabi: ConditionalFrame,
    pub resonance_branch: ResonanceBranch,
}

/// Rabi and non-Rabi frames when the drive sits exactly on `branch`.
/// The drive's own `omega` is ignored.
pub fn oscillation_pair(p: &SystemParams, d: &Drive, branch: ResonanceBranch) -> Result<OscillationPair> {
    let ctx = rwa_context(p, d)?;
    let rabi = ConditionalFrame::from_components(ctx.drive_strength, 0.0).ok_or(Error::DegenerateFrame)?;
    // the non-Rabi block sits 2·shift away from its own resonance
    let offset = (branch.sign() - branch.non_rabi_control().sign()) * ctx.shift;
    let non_rabi = ConditionalFrame::from_components(ctx.drive_strength, offset).ok_or(Error::DegenerateFrame)?;
    Ok(OscillationPair { rabi, non_rabi, resonance_branch: branch })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    /// `|ε_B V_B| / Ω⁽⁰⁾_B²`
    pub r1: f64,
    /// `|V_A / ε_A|`
    pub r2: f64,
    /// `|2J / V_B|`
    pub r3: f64,
    pub threshold: f64,
    pub in_regime: bool,
}

impl RegimeReport {
    pub fn ratios(&self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }
}

pub fn regime_check(p: &SystemParams, d: &Drive) -> Result<RegimeReport> {
    regime_check_with(p, d, DEFAULT_REGIME_THRESHOLD)
}

/// Advisory check of the RWA validity ratios against `threshold`.
pub fn regime_check_with(p: &SystemParams, d: &Drive, threshold: f64) -> Result<RegimeReport> {
    let omega0 = p.splitting_b();
    if omega0 == 0.0 {
        return Err(Error::ZeroSplitting);
    }
    if p.eps_a == 0.0 {
        return Err(invalid("eps_a", "regime ratio V_A/ε_A needs ε_A ≠ 0"));
    }
    if d.v_b == 0.0 {
        return Err(invalid("v_b", "regime ratio |2J|/V_B needs V_B ≠ 0"));
    }
    let r1 = (p.eps_b * d.v_b).abs() / (omega0 * omega0);
    let r2 = (d.v_a / p.eps_a).abs();
    let r3 = (2.0 * p.coupling / d.v_b).abs();
    Ok(RegimeReport { r1, r2, r3, threshold, in_regime: r1 < threshold && r2 < threshold && r3 < threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Operator;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn cnot_point_params() -> SystemParams {
        SystemParams::new(4.0, 0.0, 0.866, 1.0, 0.433)
    }

    #[test]
    fn context_values() {
        let p = cnot_point_params();
        let ctx = rwa_context(&p, &Drive::new(0.0, 0.1, 1.0)).unwrap();
        assert!((ctx.omega0_b - 1.75f64.sqrt()).abs() < 1e-3);
        assert!((ctx.omega0_b - 1.3229).abs() < 1e-4);
        assert!((ctx.shift - 0.5669).abs() < 1e-4);

        let flat = SystemParams::new(1.0, 0.0, 2.0, 0.0, 0.3);
        let ctx = rwa_context(&flat, &Drive::new(0.0, 0.5, 1.0)).unwrap();
        assert_eq!(ctx.eta0_b, 0.0);
        assert_eq!(ctx.drive_strength, 0.0);

        let free = SystemParams::new(1.0, 0.0, 2.0, 1.0, 0.0);
        assert_eq!(rwa_context(&free, &Drive::ZERO).unwrap().shift, 0.0);

        let dead = SystemParams::new(1.0, 0.0, 0.0, 0.0, 0.3);
        assert_eq!(rwa_context(&dead, &Drive::ZERO), Err(Error::ZeroSplitting));
    }

    #[test]
    fn effective_hamiltonian_on_resonance() {
        let p = cnot_point_params();
        let ctx = rwa_context(&p, &Drive::ZERO).unwrap();
        let d = Drive::new(0.0, 0.2, ctx.omega0_b + ctx.shift);
        let ctx = rwa_context(&p, &d).unwrap();
        let up = effective_hamiltonian(&p, &d, ControlState::Up).unwrap();
        let down = effective_hamiltonian(&p, &d, ControlState::Down).unwrap();
        // σ^z coefficient is (H00 − H11)/2 after halving
        let z_up = 0.5 * (up[(0, 0)] - up[(1, 1)]).re;
        let z_down = 0.5 * (down[(0, 0)] - down[(1, 1)]).re;
        assert!(z_up.abs() < 1e-15);
        assert!((z_down - 0.5 * (-4.0 * 0.433 * 0.866 / ctx.omega0_b)).abs() < 1e-14);
        assert!((up[(0, 1)].re - 0.5 * ctx.drive_strength).abs() < 1e-15);

        let undriven = effective_hamiltonian(&p, &Drive::new(0.0, 0.0, 1.0), ControlState::Up).unwrap();
        assert_eq!(undriven[(0, 1)].norm(), 0.0);
    }

    #[test]
    fn frequencies_on_and_off_resonance() {
        let p = SystemParams::new(3.0, 0.0, 1.4, 0.8, 0.07);
        let v_b = 0.3;
        let ctx = rwa_context(&p, &Drive::new(0.0, v_b, 0.0)).unwrap();
        let d = Drive::new(0.0, v_b, ctx.omega0_b + ctx.shift);
        let up = conditional_frequency(&p, &d, ControlState::Up).unwrap();
        let omega_r = 0.5 * v_b * p.delta_b / ctx.omega0_b;
        assert!((up.eta - FRAC_PI_2).abs() < 1e-12);
        assert!((up.omega - omega_r).abs() < 1e-12);

        let down = conditional_frequency(&p, &d, ControlState::Down).unwrap();
        let ratio = p.eps_b / ctx.omega0_b;
        let rd = p.delta_b / ctx.omega0_b;
        let omega_nr = (16.0 * p.coupling.powi(2) * ratio * ratio + v_b * v_b / 4.0 * rd * rd).sqrt();
        assert!((down.omega - omega_nr).abs() < 1e-12);
        assert!((non_rabi_frequency(&p, &d).unwrap() - omega_nr).abs() < 1e-12);
        assert!((rabi_frequency(&p, &d).unwrap() - omega_r).abs() < 1e-15);

        let strong = Drive::new(0.0, 1e9, 5.0);
        let f = conditional_frequency(&p, &strong, ControlState::Up).unwrap();
        assert!((f.eta - FRAC_PI_2).abs() < 1e-6);

        let free = SystemParams { coupling: 0.0, ..p };
        let exact = Drive::new(0.0, 0.0, free.splitting_b());
        assert_eq!(conditional_frequency(&free, &exact, ControlState::Up), Err(Error::DegenerateFrame));
    }

    #[test]
    fn transition_probability_examples() {
        let p = SystemParams::new(3.0, 0.0, 1.4, 0.8, 0.07);
        let ctx = rwa_context(&p, &Drive::new(0.0, 0.3, 0.0)).unwrap();
        let d = Drive::new(0.0, 0.3, ctx.omega0_b + ctx.shift);
        let omega_r = rabi_frequency(&p, &d).unwrap();
        let omega_nr = non_rabi_frequency(&p, &d).unwrap();
        assert_eq!(transition_probability(&p, &d, ControlState::Up, 0.0).unwrap(), 0.0);
        let flip = transition_probability(&p, &d, ControlState::Up, PI / omega_r).unwrap();
        assert!((flip - 1.0).abs() < 1e-12);
        let back = transition_probability(&p, &d, ControlState::Down, 2.0 * PI / omega_nr).unwrap();
        assert!(back.abs() < 1e-12);
    }

    #[test]
    fn non_rabi_angle_examples() {
        let p = SystemParams::new(3.0, 0.0, 2.0, 1.0, 0.5);
        // Δ_B V_B = 8Jε_B
        let d = Drive::new(0.0, 8.0, 1.0);
        assert!((non_rabi_angle(&p, &d).unwrap() - FRAC_PI_4).abs() < 1e-15);
        let weak = Drive::new(0.0, 1e-6, 1.0);
        assert!(non_rabi_angle(&p, &weak).unwrap().sin().powi(2) < 1e-12);
        let free = SystemParams { coupling: 0.0, ..p };
        assert!((non_rabi_angle(&free, &d).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(non_rabi_angle(&free, &Drive::ZERO).is_err());
    }

    #[test]
    fn resonances() {
        let free = SystemParams::new(1.0, 0.0, 0.866, 1.0, 0.0);
        let (plus, minus) = resonant_frequencies(&free).unwrap();
        assert_eq!(plus, minus);

        let p = cnot_point_params();
        let (plus, minus) = resonant_frequencies(&p).unwrap();
        // hand arithmetic: Ω = √(0.866² + 1), shift = 2·0.433·0.866/Ω
        let omega0 = (0.749956f64 + 1.0).sqrt();
        let shift = 0.749956 / omega0;
        assert!((plus - (omega0 + shift)).abs() < 1e-12);
        assert!((minus - (omega0 - shift)).abs() < 1e-12);
        assert!((plus - 1.8898).abs() < 1e-4 && (minus - 0.7560).abs() < 1e-4);

        let flipped = SystemParams { coupling: -p.coupling, ..p };
        let (p2, m2) = resonant_frequencies(&flipped).unwrap();
        assert!((p2 - minus).abs() < 1e-15 && (m2 - plus).abs() < 1e-15);
    }

    #[test]
    fn regime_examples() {
        let p = SystemParams::new(5.0, 0.0, 3.0, 1.0, 0.01);
        let r = regime_check(&p, &Drive::new(0.0, 0.14, 3.2)).unwrap();
        assert_eq!(r.r2, 0.0);
        assert!(r.in_regime);
        let unbiased = SystemParams { eps_b: 0.0, ..p };
        assert_eq!(regime_check(&unbiased, &Drive::new(0.0, 100.0, 1.0)).unwrap().r1, 0.0);
        let a = regime_check(&p, &Drive::new(0.1, 0.14, 3.2)).unwrap();
        let b = regime_check(&p, &Drive::new(0.2, 0.28, 3.2)).unwrap();
        assert!(b.r1 > a.r1 && b.r2 > a.r2);
        assert!(regime_check(&p, &Drive::new(0.0, 0.0, 1.0)).is_err());
        assert!(regime_check(&SystemParams { eps_a: 0.0, ..p }, &Drive::new(0.0, 0.1, 1.0)).is_err());
        let strict = regime_check_with(&p, &Drive::new(0.0, 0.14, 3.2), 0.01).unwrap();
        assert!(!strict.in_regime);
    }

    #[test]
    fn branch_exchange_at_minus_resonance() {
        let p = SystemParams::new(3.0, 0.0, 1.2, 0.9, 0.11);
        let v_b = 0.4;
        let (_, minus) = resonant_frequencies(&p).unwrap();
        let d = Drive::new(0.0, v_b, minus);
        let omega_r = rabi_frequency(&p, &d).unwrap();
        let omega_nr = non_rabi_frequency(&p, &d).unwrap();
        let down = conditional_frequency(&p, &d, ControlState::Down).unwrap();
        let up = conditional_frequency(&p, &d, ControlState::Up).unwrap();
        assert!((down.omega - omega_r).abs() < 1e-12);
        assert!((up.omega - omega_nr).abs() < 1e-12);

        let pair = oscillation_pair(&p, &d, ResonanceBranch::Minus).unwrap();
        assert!((pair.rabi.omega - omega_r).abs() < 1e-15);
        assert!((pair.non_rabi.omega - up.omega).abs() < 1e-12);
        assert!((pair.non_rabi.eta - up.eta).abs() < 1e-12);
        let plus = oscillation_pair(&p, &d, ResonanceBranch::Plus).unwrap();
        assert!((plus.non_rabi.eta - non_rabi_angle(&p, &d).unwrap()).abs() < 1e-12);
    }

    fn arb_driven() -> impl Strategy<Value = (SystemParams, Drive, ControlState, f64)> {
        (-3.0..3.0f64, -3.0..3.0f64, 0.05..3.0f64, -1.0..1.0f64, -2.0..2.0f64, 0.0..5.0f64, any::<bool>(), 0.0..40.0f64)
            .prop_map(|(eps_a, eps_b, delta_b, j, v_b, omega, up, t)| {
                let s = if up { ControlState::Up } else { ControlState::Down };
                (SystemParams::new(eps_a, 0.0, eps_b, delta_b, j), Drive::new(0.0, v_b, omega), s, t)
            })
    }

    proptest! {
        #[test]
        fn closed_form_matches_effective_propagator((p, d, s, t) in arb_driven()) {
            let closed = transition_probability(&p, &d, s, t).unwrap();
            let u = effective_hamiltonian(&p, &d, s).unwrap().propagator(t).unwrap();
            let exact = u[(1, 0)].norm_sqr();
            prop_assert!((closed - exact).abs() < 1e-12, "closed {closed} exact {exact}");
        }

        #[test]
        fn rabi_never_exceeds_non_rabi((p, d, _s, _t) in arb_driven()) {
            let r = rabi_frequency(&p, &d).unwrap();
            let nr = non_rabi_frequency(&p, &d).unwrap();
            prop_assert!(r <= nr);
            if p.coupling * p.eps_b != 0.0 {
                prop_assert!(r < nr);
            }
        }

        #[test]
        fn rabi_frequency_ignores_coupling((p, d, _s, _t) in arb_driven(), j2 in -2.0..2.0f64) {
            let other = SystemParams { coupling: j2, ..p };
            prop_assert_eq!(rabi_frequency(&p, &d).unwrap(), rabi_frequency(&other, &d).unwrap());
        }

        #[test]
        fn plus_branch_roles((p, d, _s, _t) in arb_driven()) {
            prop_assume!(d.v_b.abs() > 1e-3);
            let (plus, _) = resonant_frequencies(&p).unwrap();
            let on = Drive { omega: plus, ..d };
            let up = conditional_frequency(&p, &on, ControlState::Up).unwrap();
            let down = conditional_frequency(&p, &on, ControlState::Down).unwrap();
            prop_assert!((up.omega - rabi_frequency(&p, &on).unwrap()).abs() < 1e-12);
            prop_assert!((down.omega - non_rabi_frequency(&p, &on).unwrap()).abs() < 1e-12);
        }
    }
}
