// SPDX-License-Identifier: Apache-2.0

//! Exact time-dependent Schrödinger evolution under the full driven
//! Hamiltonian, used as the brute-force reference for every closed form.
//!
//! Nothing here renormalises the state: norm drift is measured and reported,
//! and exceeding the configured bound is an error.

use std::f64::consts::TAU;

use nalgebra::{Vector2, Vector4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gate::ProbabilityTable;
use crate::hamiltonian::{conditional_hamiltonian, full_hamiltonian, CMat2, CMat4};
use crate::ode::{integrate, StepControl};
use crate::params::{ControlState, Drive, SystemParams};
use crate::rwa::{rabi_frequency, resonant_frequencies, transition_probability};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Largest step as a fraction of the fastest period in the problem.
    pub max_step_fraction: f64,
    /// Spacing of recorded samples; `None` records only the endpoints.
    pub output_step: Option<f64>,
    pub norm_drift_bound: f64,
    pub max_steps: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step_fraction: 1.0 / 50.0,
            output_step: None,
            norm_drift_bound: 1e-9,
            max_steps: 200_000_000,
        }
    }
}

impl IntegrationConfig {
    pub fn with_output_step(mut self, step: f64) -> Self {
        self.output_step = Some(step);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(invalid("tolerances", "rtol and atol must be positive"));
        }
        if !(self.max_step_fraction > 0.0) {
            return Err(invalid("max_step_fraction", "must be positive"));
        }
        if let Some(step) = self.output_step {
            if !(step > 0.0) {
                return Err(invalid("output_step", "must be positive"));
            }
        }
        if !(self.norm_drift_bound > 0.0) {
            return Err(invalid("norm_drift_bound", "must be positive"));
        }
        Ok(())
    }
}

/// Normalised two-qubit state in the `{|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector(pub Vector4<C64>);

impl StateVector {
    pub fn new(amplitudes: Vector4<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid("state", format!("norm {norm} is not 1")));
        }
        Ok(Self(amplitudes))
    }

    pub fn basis(index: usize) -> Self {
        let mut v = Vector4::from_element(ZERO);
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    /// `|s⟩ ⊗ (up|↑⟩ + down|↓⟩)`.
    pub fn product(control: ControlState, up: C64, down: C64) -> Result<Self> {
        let o = control.block_offset();
        let mut v = Vector4::from_element(ZERO);
        v[o] = up;
        v[o + 1] = down;
        Self::new(v)
    }

    /// `|s⟩ ⊗ |k⟩` with `|k⟩` the `k`-th state of the target basis rotated
    /// by `eta`.
    pub fn rotated(control: ControlState, level: usize, eta: f64) -> Self {
        let [up, down] = rotated_target(level, eta);
        let o = control.block_offset();
        let mut v = Vector4::from_element(ZERO);
        v[o] = C64::from(up);
        v[o + 1] = C64::from(down);
        Self(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn lab_populations(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.0[k].norm_sqr())
    }

    /// Populations of `|s, k⟩` with `k` in the target basis rotated by `eta`,
    /// ordered `{|↑0⟩, |↑1⟩, |↓0⟩, |↓1⟩}`.
    pub fn rotated_populations(&self, eta: f64) -> [f64; 4] {
        std::array::from_fn(|idx| {
            let o = 2 * (idx / 2);
            let [up, down] = rotated_target(idx % 2, eta);
            (self.0[o] * up + self.0[o + 1] * down).norm_sqr()
        })
    }
}

/// Lab-basis components of the rotated target states: `|0⟩ = (c, −s)`,
/// `|1⟩ = (s, c)` with `c = cos(η/2)`, `s = sin(η/2)`. `|0⟩` is the upper
/// eigenstate of `ε_B σ^z − Δ_B σ^x`.
fn rotated_target(level: usize, eta: f64) -> [f64; 2] {
    let (s, c) = (0.5 * eta).sin_cos();
    match level {
        0 => [c, -s],
        _ => [s, c],
    }
}

/// `η⁽⁰⁾_B = atan2(Δ_B, ε_B)`, the angle of the target's computational basis.
pub fn target_basis_angle(p: &SystemParams) -> f64 {
    p.delta_b.atan2(p.eps_b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Target basis angle used for `rotated_populations`.
    pub basis_angle: f64,
    pub steps: usize,
}

impl EvolutionTrace {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trace is never empty")
    }

    pub fn lab_populations(&self) -> Vec<[f64; 4]> {
        self.states.iter().map(StateVector::lab_populations).collect()
    }

    pub fn rotated_populations(&self) -> Vec<[f64; 4]> {
        self.states.iter().map(|s| s.rotated_populations(self.basis_angle)).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn output_grid(t_final: f64, step: Option<f64>) -> Vec<f64> {
    let mut grid = vec![0.0];
    if t_final == 0.0 {
        return grid;
    }
    if let Some(dt) = step {
        let count = (t_final / dt * (1.0 - 1e-12)).ceil() as usize;
        grid.extend((1..count).map(|k| k as f64 * dt));
    }
    grid.push(t_final);
    grid
}

/// Fastest period in the problem: drive, bare qubit-B splitting, and a
/// row-sum bound on the Hamiltonian's spectrum (which also covers the
/// control-qubit phase).
fn fastest_period(static_part: f64, p: &SystemParams, d: &Drive) -> f64 {
    [d.omega, p.splitting_b(), static_part]
        .into_iter()
        .filter(|w| *w > 0.0)
        .map(|w| TAU / w)
        .fold(f64::INFINITY, f64::min)
}

fn row_sum_bound<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    (0..N).map(|r| (0..N).map(|c| m[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn step_control(cfg: &IntegrationConfig, period: f64) -> StepControl {
    let max_step = if period.is_finite() { cfg.max_step_fraction * period } else { f64::MAX };
    StepControl { rtol: cfg.rtol, atol: cfg.atol, max_step, max_steps: cfg.max_steps }
}

/// Integrates `i∂ψ/∂t = H(t)ψ` with `H(t)` the full driven Hamiltonian.
pub fn evolve(
    p: &SystemParams,
    d: &Drive,
    psi0: &StateVector,
    t_final: f64,
    cfg: &IntegrationConfig,
) -> Result<EvolutionTrace> {
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(invalid("t_final", format!("must be finite and >= 0, got {t_final}")));
    }
    evolve_at(p, d, psi0, &output_grid(t_final, cfg.output_step), cfg)
}

/// Like [`evolve`] but records the state at arbitrary ascending `times`,
/// starting from `psi0` at `t = 0`. `cfg.output_step` is ignored.
pub fn evolve_at(
    p: &SystemParams,
    d: &Drive,
    psi0: &StateVector,
    times: &[f64],
    cfg: &IntegrationConfig,
) -> Result<EvolutionTrace> {
    p.validate()?;
    d.validate()?;
    cfg.validate()?;
    if times.is_empty() {
        return Err(Error::Empty("no output times"));
    }
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "must be finite, non-negative and ascending"));
    }
    let initial_drift = (psi0.norm() - 1.0).abs();
    if initial_drift > 1e-12 {
        return Err(invalid("psi0", format!("norm {} is not 1", psi0.norm())));
    }

    // H(t) = H₀ + cos(ωt)·H₁
    let h0: CMat4 = full_hamiltonian(p, &Drive::ZERO, 0.0);
    let unit = Drive { v_a: d.v_a, v_b: d.v_b, omega: 0.0 };
    let h1: CMat4 = full_hamiltonian(p, &unit, 0.0) - h0;
    let minus_i = C64::new(0.0, -1.0);
    let h0 = h0 * minus_i;
    let h1 = h1 * minus_i;
    let omega = d.omega;
    let rhs = |t: f64, y: &Vector4<C64>| (h0 + h1 * C64::from((omega * t).cos())) * y;

    let period = fastest_period(row_sum_bound(&h0) + row_sum_bound(&h1), p, d);
    let grid = times.to_vec();
    let (ys, stats) = integrate(rhs, 0.0, psi0.0, &grid, &step_control(cfg, period))?;

    let states: Vec<StateVector> = ys.into_iter().map(StateVector).collect();
    for (t, s) in grid.iter().zip(&states) {
        let drift = (s.norm() - 1.0).abs();
        if drift > cfg.norm_drift_bound {
            return Err(Error::NormDrift { time: *t, drift, bound: cfg.norm_drift_bound });
        }
    }
    Ok(EvolutionTrace { times: grid, states, basis_angle: target_basis_angle(p), steps: stats.accepted })
}

/// Integrates one conditional 2×2 block, `i∂ψ/∂t = H_{B:s}(t)ψ`.
/// Returns the target state at each grid time.
pub fn evolve_conditional(
    p: &SystemParams,
    d: &Drive,
    s: ControlState,
    psi0: Vector2<C64>,
    t_final: f64,
    cfg: &IntegrationConfig,
) -> Result<(Vec<f64>, Vec<Vector2<C64>>)> {
    cfg.validate()?;
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(invalid("t_final", format!("must be finite and >= 0, got {t_final}")));
    }
    let h0: CMat2 = conditional_hamiltonian(p, &Drive::ZERO, s, 0.0);
    let unit = Drive { v_a: d.v_a, v_b: d.v_b, omega: 0.0 };
    let h1: CMat2 = conditional_hamiltonian(p, &unit, s, 0.0) - h0;
    let minus_i = C64::new(0.0, -1.0);
    let h0 = h0 * minus_i;
    let h1 = h1 * minus_i;
    let omega = d.omega;
    let rhs = |t: f64, y: &Vector2<C64>| (h0 + h1 * C64::from((omega * t).cos())) * y;
    let period = fastest_period(row_sum_bound(&h0) + row_sum_bound(&h1), p, d);
    let grid = output_grid(t_final, cfg.output_step);
    let (ys, _) = integrate(rhs, 0.0, psi0, &grid, &step_control(cfg, period))?;
    Ok((grid, ys))
}

/// Input ordering of probability tables.
pub const TABLE_INPUTS: [(ControlState, usize); 4] =
    [(ControlState::Up, 0), (ControlState::Up, 1), (ControlState::Down, 0), (ControlState::Down, 1)];

/// Probability table from exact evolution of each rotated-basis input.
/// Requires `Δ_A = 0` exactly so that the control state is conserved.
pub fn oracle_table(p: &SystemParams, d: &Drive, t: f64, cfg: &IntegrationConfig) -> Result<ProbabilityTable> {
    if p.delta_a != 0.0 {
        return Err(Error::ConditionalTableUndefined(p.delta_a));
    }
    let eta = target_basis_angle(p);
    let endpoint_cfg = IntegrationConfig { output_step: None, ..*cfg };
    let rows = TABLE_INPUTS
        .par_iter()
        .map(|&(s, k)| {
            let psi0 = StateVector::rotated(s, k, eta);
            let trace = evolve(p, d, &psi0, t, &endpoint_cfg)?;
            Ok(trace.final_state().rotated_populations(eta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityTable { time: t, entries: [rows[0], rows[1], rows[2], rows[3]] })
}

/// Rotated-basis flip probability `P_{|s1⟩←|s0⟩}` sampled from exact
/// evolution on the configured output grid.
pub fn oracle_flip_trace(
    p: &SystemParams,
    d: &Drive,
    s: ControlState,
    t_final: f64,
    cfg: &IntegrationConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let eta = target_basis_angle(p);
    let trace = evolve(p, d, &StateVector::rotated(s, 0, eta), t_final, cfg)?;
    let flipped = s.block_offset() + 1;
    let probs = trace.rotated_populations().iter().map(|pops| pops[flipped]).collect();
    Ok((trace.times, probs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaAgreement {
    pub max_abs_error: f64,
    pub duration: f64,
    pub samples: usize,
}

/// Worst disagreement between the RWA flip probability and exact evolution
/// for both control states over `[0, duration]`.
pub fn rwa_agreement(
    p: &SystemParams,
    d: &Drive,
    duration: f64,
    samples: usize,
    cfg: &IntegrationConfig,
) -> Result<RwaAgreement> {
    if samples < 2 {
        return Err(invalid("samples", "need at least two samples"));
    }
    let grid_cfg = cfg.with_output_step(duration / (samples - 1) as f64);
    let per_branch = ControlState::ALL
        .par_iter()
        .map(|&s| {
            let (times, exact) = oracle_flip_trace(p, d, s, duration, &grid_cfg)?;
            times
                .iter()
                .zip(&exact)
                .try_fold(0.0f64, |worst, (&t, &e)| Ok(worst.max((transition_probability(p, d, s, t)? - e).abs())))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RwaAgreement { max_abs_error: per_branch.into_iter().fold(0.0, f64::max), duration, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectroscopyConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    /// Time samples per probe window when locating the maximum.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Probe window; defaults to one nominal Rabi period `2π/Ω_R`.
    #[serde(default)]
    pub duration: Option<f64>,
    /// Minimum prominence for a local maximum to count as a peak.
    #[serde(default = "default_prominence")]
    pub min_prominence: f64,
}

fn default_samples() -> usize {
    200
}

fn default_prominence() -> f64 {
    0.1
}

impl SpectroscopyConfig {
    pub fn new(omega_min: f64, omega_max: f64, points: usize) -> Self {
        Self {
            omega_min,
            omega_max,
            points,
            samples: default_samples(),
            duration: None,
            min_prominence: default_prominence(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectroscopyResult {
    pub omegas: Vec<f64>,
    /// Max flip probability over the window, control `|↑⟩`.
    pub signal_up: Vec<f64>,
    pub signal_down: Vec<f64>,
    /// Mean of the two control branches.
    pub signal: Vec<f64>,
    pub peaks: Vec<f64>,
    /// Analytic `(ω₊, ω₋)`.
    pub analytic: (f64, f64),
    pub duration: f64,
}

/// Sweeps the drive frequency and records the largest flip probability of
/// each control branch; peaks of their mean mark the conditional resonances.
pub fn spectroscopy(
    p: &SystemParams,
    template: &Drive,
    spec: &SpectroscopyConfig,
    cfg: &IntegrationConfig,
) -> Result<SpectroscopyResult> {
    if spec.points == 0 {
        return Err(Error::Empty("spectroscopy range has no points"));
    }
    if !(spec.omega_min > 0.0) || !(spec.omega_max >= spec.omega_min) || !spec.omega_max.is_finite() {
        return Err(invalid(
            "omega range",
            format!("need 0 < omega_min <= omega_max, got [{}, {}]", spec.omega_min, spec.omega_max),
        ));
    }
    if spec.samples < 2 {
        return Err(invalid("samples", "need at least two samples per window"));
    }
    let duration = match spec.duration {
        Some(t) => t,
        None => TAU / rabi_frequency(p, template)?,
    };
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(invalid("duration", format!("probe window must be positive, got {duration}")));
    }
    let omegas: Vec<f64> = if spec.points == 1 {
        vec![spec.omega_min]
    } else {
        let step = (spec.omega_max - spec.omega_min) / (spec.points - 1) as f64;
        (0..spec.points).map(|k| spec.omega_min + k as f64 * step).collect()
    };
    let grid_cfg = cfg.with_output_step(duration / (spec.samples - 1) as f64);

    let maxima = omegas
        .par_iter()
        .map(|&omega| {
            let d = Drive { omega, ..*template };
            let peak = |s| -> Result<f64> {
                let (_, probs) = oracle_flip_trace(p, &d, s, duration, &grid_cfg)?;
                Ok(probs.into_iter().fold(0.0, f64::max))
            };
            Ok((peak(ControlState::Up)?, peak(ControlState::Down)?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let signal_up: Vec<f64> = maxima.iter().map(|m| m.0).collect();
    let signal_down: Vec<f64> = maxima.iter().map(|m| m.1).collect();
    let signal: Vec<f64> = maxima.iter().map(|m| 0.5 * (m.0 + m.1)).collect();
    let peaks = find_peaks(&omegas, &signal, spec.min_prominence);
    Ok(SpectroscopyResult {
        omegas,
        signal_up,
        signal_down,
        signal,
        peaks,
        analytic: resonant_frequencies(p)?,
        duration,
    })
}

/// Interior local maxima with at least `min_prominence`, located by a
/// parabola through the three samples around each maximum.
pub fn find_peaks(xs: &[f64], ys: &[f64], min_prominence: f64) -> Vec<f64> {
    let n = ys.len();
    let mut peaks = Vec::new();
    if n < 3 {
        return peaks;
    }
    for i in 1..n - 1 {
        if !(ys[i] > ys[i - 1] && ys[i] >= ys[i + 1]) {
            continue;
        }
        // lowest point on each side before reaching higher ground
        let mut left_min = ys[i];
        for j in (0..i).rev() {
            if ys[j] > ys[i] {
                break;
            }
            left_min = left_min.min(ys[j]);
        }
        let mut right_min = ys[i];
        for &y in &ys[i + 1..] {
            if y > ys[i] {
                break;
            }
            right_min = right_min.min(y);
        }
        if ys[i] - left_min.max(right_min) < min_prominence {
            continue;
        }
        let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
        let curvature = y0 - 2.0 * y1 + y2;
        let shift = if curvature < 0.0 { 0.5 * (y0 - y2) / curvature } else { 0.0 };
        let h = 0.5 * (xs[i + 1] - xs[i - 1]);
        peaks.push(xs[i] + shift.clamp(-1.0, 1.0) * h);
    }
    peaks
}
