// SPDX-License-Identifier: Apache-2.0

//! Cross-module invariant suite run at the configured parameters.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use condosc_core::gate::{vb_cnot, MatchingIndices};
use condosc_core::hamiltonian::{conditional_hamiltonian, full_hamiltonian, Operator, C64};
use condosc_core::oracle::{evolve_at, rwa_agreement, StateVector};
use condosc_core::rwa::{rabi_frequency, regime_check};
use condosc_core::static_dynamics::{static_frame, static_occupation, InitialAmplitudes};
use condosc_core::sweep::solve_vb_numeric;
use condosc_core::{ControlState, Drive, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::Artifact;
use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Warn,
    Fail,
    Skip,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn measured(name: &'static str, value: f64, tol: f64) -> Self {
        let status = if value <= tol { Status::Pass } else { Status::Fail };
        Self { name, status, detail: format!("{value:.3e} (tolerance {tol:.1e})") }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Self { name, status: Status::Skip, detail: why.to_string() }
    }

    fn failed(name: &'static str, err: condosc_core::Error) -> Self {
        Self { name, status: Status::Fail, detail: err.to_string() }
    }
}

/// Runs every check and renders the report. The artifact is unsuccessful iff
/// any check failed; warnings do not count.
pub fn run_validation(cfg: &RunConfig) -> Result<Artifact, ConfigError> {
    let checks = checks(cfg);
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(text, "{} {}: {}", c.status.label(), c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    let _ = writeln!(text, "{} checks, {} failed", checks.len(), failed);
    Ok(Artifact { text, success: failed == 0 })
}

pub fn checks(cfg: &RunConfig) -> Vec<Check> {
    let v = cfg.validate.unwrap_or_default();
    let tol = v.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = &cfg.system;
    vec![
        static_vs_propagator(p, v.random_cases, tol.static_closed_form, &mut rng),
        static_vs_oracle(cfg, v.samples, tol.static_oracle),
        matching_root(p, tol.matching_root),
        unitarity(p, &cfg.drive, v.random_cases, tol.unitarity, &mut rng),
        oracle_norm(cfg, v.samples),
        rwa_vs_oracle(cfg, v.samples, tol.rwa_agreement),
    ]
}

fn random_init(rng: &mut ChaCha8Rng) -> InitialAmplitudes {
    let theta: f64 = rng.random_range(0.0..TAU);
    InitialAmplitudes { a: theta.cos(), b: theta.sin() }
}

fn static_vs_propagator(p: &SystemParams, cases: usize, tol: f64, rng: &mut ChaCha8Rng) -> Check {
    const NAME: &str = "static closed form vs propagator";
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let s = if rng.random_bool(0.5) { ControlState::Up } else { ControlState::Down };
        let Ok(frame) = static_frame(p, s) else {
            return Check::skipped(NAME, "degenerate conditional frame");
        };
        let t = rng.random_range(0.0..4.0 * frame.period());
        let init = random_init(rng);
        let h = conditional_hamiltonian(p, &Drive::ZERO, s, 0.0);
        let u = match h.propagator(t) {
            Ok(u) => u,
            Err(e) => return Check::failed(NAME, e),
        };
        let up = u[(0, 0)] * init.a + u[(0, 1)] * init.b;
        match static_occupation(p, s, init, t) {
            Ok(closed) => worst = worst.max((closed - up.norm_sqr()).abs()),
            Err(e) => return Check::failed(NAME, e),
        }
    }
    Check::measured(NAME, worst, tol)
}

fn static_vs_oracle(cfg: &RunConfig, samples: usize, tol: f64) -> Check {
    const NAME: &str = "static closed form vs exact evolution";
    let p = &cfg.system;
    if p.delta_a != 0.0 {
        return Check::skipped(NAME, "control qubit tunnels (delta_a != 0)");
    }
    let mut worst = 0.0f64;
    for s in ControlState::ALL {
        let Ok(frame) = static_frame(p, s) else {
            return Check::skipped(NAME, "degenerate conditional frame");
        };
        let t_end = 2.0 * frame.period();
        let times: Vec<f64> = (0..samples).map(|k| t_end * k as f64 / (samples - 1) as f64).collect();
        let init = InitialAmplitudes::DOWN;
        let result = StateVector::product(s, C64::from(init.a), C64::from(init.b))
            .and_then(|psi0| evolve_at(p, &Drive::ZERO, &psi0, &times, &cfg.integration));
        let trace = match result {
            Ok(trace) => trace,
            Err(e) => return Check::failed(NAME, e),
        };
        for (t, pops) in times.iter().zip(trace.lab_populations()) {
            match static_occupation(p, s, init, *t) {
                Ok(closed) => worst = worst.max((closed - pops[s.block_offset()]).abs()),
                Err(e) => return Check::failed(NAME, e),
            }
        }
    }
    Check::measured(NAME, worst, tol)
}

fn matching_root(p: &SystemParams, tol: f64) -> Check {
    const NAME: &str = "synchronised amplitude vs root finder";
    if p.delta_b == 0.0 || p.coupling == 0.0 || p.eps_b == 0.0 {
        return Check::skipped(NAME, "no synchronisation for these parameters");
    }
    let mut worst = 0.0f64;
    for n in 1..=6 {
        for l in 1..=6 {
            let idx = MatchingIndices { n, l, m: 1 };
            let gap = vb_cnot(p, &idx).and_then(|closed| {
                let root = solve_vb_numeric(p, &idx)?;
                Ok(((root - closed.abs()) / closed).abs())
            });
            match gap {
                Ok(g) => worst = worst.max(g),
                Err(e) => return Check::failed(NAME, e),
            }
        }
    }
    Check::measured(NAME, worst, tol)
}

fn unitarity(p: &SystemParams, d: &Drive, cases: usize, tol: f64, rng: &mut ChaCha8Rng) -> Check {
    const NAME: &str = "propagator unitarity";
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let t_field: f64 = rng.random_range(0.0..100.0);
        let dt: f64 = rng.random_range(0.0..100.0);
        match full_hamiltonian(p, d, t_field).propagator(dt) {
            Ok(u) => worst = worst.max(u.unitary_deviation()),
            Err(e) => return Check::failed(NAME, e),
        }
    }
    Check::measured(NAME, worst, tol)
}

fn oracle_norm(cfg: &RunConfig, samples: usize) -> Check {
    const NAME: &str = "exact evolution norm drift";
    let (p, d) = (&cfg.system, &cfg.drive);
    let t_end = match rabi_frequency(p, d) {
        Ok(w) if w > 0.0 => TAU / w,
        _ => 10.0 * TAU / p.splitting_b().max(1e-3),
    };
    let times: Vec<f64> = (0..samples).map(|k| t_end * k as f64 / (samples - 1) as f64).collect();
    match evolve_at(p, d, &StateVector::basis(1), &times, &cfg.integration) {
        Ok(trace) => Check::measured(NAME, trace.max_norm_drift(), cfg.integration.norm_drift_bound),
        Err(e) => Check::failed(NAME, e),
    }
}

fn rwa_vs_oracle(cfg: &RunConfig, samples: usize, tol: f64) -> Check {
    const NAME: &str = "RWA vs exact evolution";
    let (p, d) = (&cfg.system, &cfg.drive);
    if d.v_b == 0.0 || d.omega == 0.0 {
        return Check::skipped(NAME, "no drive on qubit B");
    }
    let in_regime = matches!(regime_check(p, d), Ok(r) if r.in_regime);
    let outcome = rabi_frequency(p, d)
        .and_then(|w| rwa_agreement(p, d, TAU / w, samples, &cfg.integration))
        .map(|a| Check::measured(NAME, a.max_abs_error, tol));
    let check = match outcome {
        Ok(c) => c,
        Err(e) => Check::failed(NAME, e),
    };
    if check.status == Status::Fail && !in_regime {
        return Check { status: Status::Warn, detail: format!("{} (outside the RWA regime)", check.detail), ..check };
    }
    check
}
