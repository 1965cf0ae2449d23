// SPDX-License-Identifier: Apache-2.0

//! Synchronisation search and parameter sweeps over the closed forms or the
//! exact oracle.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gate::{
    cnot_frequencies, fidelity, matching_ratio, probability_table_rwa, vb_cnot, GateTarget, MatchingIndices,
};
use crate::oracle::{oracle_flip_trace, oracle_table, IntegrationConfig};
use crate::params::{ControlState, Drive, ResonanceBranch, SystemParams};
use crate::rwa::{non_rabi_frequency, rabi_frequency, regime_check, rwa_context, transition_probability, RegimeReport};

/// Values closer than this count as equal when picking a best point.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Closed-form rotating-wave expressions.
    Rwa,
    /// Exact time-dependent integration.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncOptions {
    pub branch: ResonanceBranch,
    pub backend: Backend,
    pub integration: IntegrationConfig,
}

impl Default for SyncOptions {
    fn default() -> Self {
        Self { branch: ResonanceBranch::Plus, backend: Backend::Rwa, integration: IntegrationConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncResult {
    pub n: u32,
    pub l: u32,
    pub m: u32,
    pub branch: ResonanceBranch,
    pub v_b: f64,
    /// Drive frequency, on the chosen resonance.
    pub omega: f64,
    pub omega_r: f64,
    pub omega_nr: f64,
    pub t_op: f64,
    pub fidelity_rwa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_oracle: Option<f64>,
    pub regime_ratios: [f64; 3],
    pub in_regime: bool,
}

impl SyncResult {
    pub fn drive(&self) -> Drive {
        Drive::new(0.0, self.v_b, self.omega)
    }
}

/// Synchronised CNOT operating point for matching indices `idx`.
///
/// The gate repeats at odd multiples of the first operation time, so the
/// `m`-th occurrence is at `(2m − 1)(l − ½)τ_R`.
pub fn find_sync(p: &SystemParams, idx: &MatchingIndices, opts: &SyncOptions) -> Result<SyncResult> {
    idx.validate()?;
    p.validate()?;
    if p.delta_b == 0.0 {
        return Err(invalid("delta_b", "synchronisation needs Δ_B ≠ 0"));
    }
    if p.coupling == 0.0 {
        return Err(invalid("coupling", "no synchronisation exists for J = 0 (Ω_n-R = Ω_R)"));
    }
    if p.eps_b == 0.0 {
        return Err(invalid("eps_b", "no synchronisation exists for ε_B = 0 (Ω_n-R = Ω_R)"));
    }
    let v_b = vb_cnot(p, idx)?;
    let (omega_r, omega_nr) = cnot_frequencies(p, idx)?;
    let omega = rwa_context(p, &Drive::ZERO)?.resonance(opts.branch);
    let d = Drive::new(0.0, v_b, omega);
    let t_op = f64::from(2 * idx.m - 1) * (f64::from(idx.l) - 0.5) * TAU / omega_r;

    let target = GateTarget::cnot(opts.branch);
    let fidelity_rwa = fidelity(&probability_table_rwa(p, &d, t_op)?, &target).fidelity;
    let fidelity_oracle = match opts.backend {
        Backend::Rwa => None,
        Backend::Oracle => Some(fidelity(&oracle_table(p, &d, t_op, &opts.integration)?, &target).fidelity),
    };
    let regime: RegimeReport = regime_check(p, &d)?;
    Ok(SyncResult {
        n: idx.n,
        l: idx.l,
        m: idx.m,
        branch: opts.branch,
        v_b,
        omega,
        omega_r,
        omega_nr,
        t_op,
        fidelity_rwa,
        fidelity_oracle,
        regime_ratios: regime.ratios(),
        in_regime: regime.in_regime,
    })
}

/// `Ω_{n-R}(V) − k·Ω_R(V)` with `k` the matching ratio; decreasing in `|V|`.
fn matching_residual(p: &SystemParams, k: f64, v_b: f64) -> Result<f64> {
    let d = Drive::new(0.0, v_b, 0.0);
    Ok(non_rabi_frequency(p, &d)? - k * rabi_frequency(p, &d)?)
}

/// Bisection root of the matching condition on `(0, 10·|8Jε_B/Δ_B|]`.
pub fn solve_vb_numeric(p: &SystemParams, idx: &MatchingIndices) -> Result<f64> {
    if p.delta_b == 0.0 {
        return Err(invalid("delta_b", "synchronisation needs Δ_B ≠ 0"));
    }
    let upper = 10.0 * (8.0 * p.coupling * p.eps_b / p.delta_b).abs();
    solve_vb_numeric_in(p, idx, 0.0, upper)
}

/// Bisection root of the matching condition on `[lo, hi]`. Returns the
/// magnitude of the synchronised amplitude.
pub fn solve_vb_numeric_in(p: &SystemParams, idx: &MatchingIndices, lo: f64, hi: f64) -> Result<f64> {
    idx.validate()?;
    if !(lo >= 0.0 && hi > lo) {
        return Err(invalid("bracket", format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    let k = matching_ratio(idx);
    let (mut a, mut b) = (lo, hi);
    let f_lo = matching_residual(p, k, a)?;
    let f_hi = matching_residual(p, k, b)?;
    if f_lo == 0.0 {
        return Ok(a);
    }
    if f_hi == 0.0 {
        return Ok(b);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::RootNotBracketed { lo, hi, f_lo, f_hi });
    }
    let sign_lo = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let f_mid = matching_residual(p, k, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == sign_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    VB,
    Omega,
    T,
    J,
    EpsB,
    DeltaB,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::VB => "v_b",
            SweepParam::Omega => "omega",
            SweepParam::T => "t",
            SweepParam::J => "j",
            SweepParam::EpsB => "eps_b",
            SweepParam::DeltaB => "delta_b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisScale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: AxisScale,
}

impl Axis {
    pub fn linear(param: SweepParam, min: f64, max: f64, points: usize) -> Self {
        Self { param, min, max, points, scale: AxisScale::Linear }
    }

    /// A single fixed value.
    pub fn fixed(param: SweepParam, value: f64) -> Self {
        Self::linear(param, value, value, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(invalid("axis", format!("{} bounds must be finite", self.param.name())));
        }
        match self.points {
            0 => return Err(invalid("axis", format!("{} has no points", self.param.name()))),
            1 if self.min != self.max => {
                return Err(invalid("axis", format!("{}: a single point needs min == max", self.param.name())))
            }
            1 => {}
            _ if !(self.min < self.max) => {
                return Err(invalid("axis", format!("{}: need min < max", self.param.name())))
            }
            _ => {}
        }
        if self.scale == AxisScale::Log && !(self.min > 0.0) {
            return Err(invalid("axis", format!("{}: log axis needs min > 0", self.param.name())));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let frac = k as f64 / last;
                match self.scale {
                    AxisScale::Linear => self.min + frac * (self.max - self.min),
                    AxisScale::Log => (self.min.ln() + frac * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Fidelity of the probability table against a target gate.
    Fidelity(GateTarget),
    /// `P_{|s1⟩←|s0⟩}` for the given control state.
    TransitionProbability(ControlState),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub backend: Backend,
    pub objective: Objective,
    /// Evaluation time when `t` is not swept.
    #[serde(default)]
    pub time: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::Empty("sweep has no axes"));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            axis.validate()?;
            if self.axes[..i].iter().any(|a| a.param == axis.param) {
                return Err(invalid("axis", format!("{} appears twice", axis.param.name())));
            }
        }
        let has_t = self.axes.iter().any(|a| a.param == SweepParam::T);
        match (has_t, self.time) {
            (false, None) => Err(invalid("time", "sweep needs a `t` axis or a fixed `time`")),
            (true, Some(_)) => Err(invalid("time", "fixed `time` conflicts with the `t` axis")),
            (_, Some(t)) if !(t >= 0.0) => Err(invalid("time", "must be >= 0")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub coords: Vec<f64>,
    /// `None` when the backend failed at this point.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub params: Vec<SweepParam>,
    /// Row-major: the last axis varies fastest.
    pub points: Vec<SweepPoint>,
}

impl SweepGrid {
    pub fn coord(&self, point: &SweepPoint, param: SweepParam) -> Option<f64> {
        self.params.iter().position(|&p| p == param).map(|i| point.coords[i])
    }
}

fn apply(param: SweepParam, value: f64, p: &mut SystemParams, d: &mut Drive, t: &mut f64) {
    match param {
        SweepParam::VB => d.v_b = value,
        SweepParam::Omega => d.omega = value,
        SweepParam::T => *t = value,
        SweepParam::J => p.coupling = value,
        SweepParam::EpsB => p.eps_b = value,
        SweepParam::DeltaB => p.delta_b = value,
    }
}

/// Objective at a single parameter point.
pub fn evaluate(
    p: &SystemParams,
    d: &Drive,
    t: f64,
    backend: Backend,
    objective: &Objective,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    match (backend, objective) {
        (Backend::Rwa, Objective::Fidelity(target)) => Ok(fidelity(&probability_table_rwa(p, d, t)?, target).fidelity),
        (Backend::Oracle, Objective::Fidelity(target)) => Ok(fidelity(&oracle_table(p, d, t, cfg)?, target).fidelity),
        (Backend::Rwa, Objective::TransitionProbability(s)) => transition_probability(p, d, *s, t),
        (Backend::Oracle, Objective::TransitionProbability(s)) => {
            let endpoint = IntegrationConfig { output_step: None, ..*cfg };
            let (_, probs) = oracle_flip_trace(p, d, *s, t, &endpoint)?;
            Ok(*probs.last().expect("trace is never empty"))
        }
    }
}

/// Evaluates the objective over the Cartesian grid of `spec.axes`. Points are
/// evaluated in parallel; output order is fixed by the axes.
pub fn sweep(p: &SystemParams, template: &Drive, spec: &SweepSpec, cfg: &IntegrationConfig) -> Result<SweepGrid> {
    spec.validate()?;
    let values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let total: usize = values.iter().map(Vec::len).product();
    let coords_of = |mut flat: usize| {
        let mut coords = vec![0.0; values.len()];
        for (slot, axis) in coords.iter_mut().zip(&values).rev() {
            *slot = axis[flat % axis.len()];
            flat /= axis.len();
        }
        coords
    };
    let points = (0..total)
        .into_par_iter()
        .map(|flat| {
            let coords = coords_of(flat);
            let (mut q, mut d, mut t) = (*p, *template, spec.time.unwrap_or(0.0));
            for (axis, &v) in spec.axes.iter().zip(&coords) {
                apply(axis.param, v, &mut q, &mut d, &mut t);
            }
            let value = evaluate(&q, &d, t, spec.backend, &spec.objective, cfg).ok();
            SweepPoint { coords, value }
        })
        .collect();
    Ok(SweepGrid { params: spec.axes.iter().map(|a| a.param).collect(), points })
}

/// Inclusive bounds restricting [`best_operation_point`] to part of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisWindow {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
}

/// Highest objective value inside `window`. Near-ties (within
/// [`TIE_TOLERANCE`]) go to the smaller `t`, then the smaller `v_b`.
pub fn best_operation_point<'g>(grid: &'g SweepGrid, window: &[AxisWindow]) -> Result<(&'g SweepPoint, f64)> {
    let inside = |pt: &SweepPoint| {
        window.iter().all(|w| match grid.coord(pt, w.param) {
            Some(v) => v >= w.min && v <= w.max,
            None => true,
        })
    };
    let key = |pt: &SweepPoint, param| grid.coord(pt, param).unwrap_or(0.0);
    let mut best: Option<(&SweepPoint, f64)> = None;
    for pt in grid.points.iter().filter(|pt| inside(pt)) {
        let Some(v) = pt.value else { continue };
        best = match best {
            None => Some((pt, v)),
            Some((_, bv)) if v > bv + TIE_TOLERANCE => Some((pt, v)),
            Some((cur, bv)) if (v - bv).abs() <= TIE_TOLERANCE => {
                let challenger = (key(pt, SweepParam::T), key(pt, SweepParam::VB));
                let holder = (key(cur, SweepParam::T), key(cur, SweepParam::VB));
                if challenger < holder {
                    Some((pt, v))
                } else {
                    Some((cur, bv))
                }
            }
            keep => keep,
        };
    }
    best.ok_or(Error::Empty("no evaluated points inside the window"))
}
