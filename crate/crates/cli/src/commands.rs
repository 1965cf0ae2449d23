// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations. Each returns the artifact text so callers can
//! write it wherever they like.

use condosc_core::hamiltonian::C64;
use condosc_core::oracle::{evolve_at, spectroscopy, target_basis_angle, StateVector};
use condosc_core::rwa::{conditional_frequency, transition_probability};
use condosc_core::static_dynamics::static_occupation;
use condosc_core::sweep::{find_sync, sweep, Backend, SyncOptions};
use condosc_core::{ControlState, Drive};
use serde::Serialize;

use crate::config::{ConfigError, RunConfig};
use crate::validate::run_validation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    StaticTrace,
    RwaTrace,
    Sync,
    Sweep,
    Validate,
    Spectroscopy,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("computation failed: {0}")]
    Runtime(#[from] condosc_core::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub text: String,
    /// False when a validation check failed.
    pub success: bool,
}

impl Artifact {
    fn ok(text: String) -> Self {
        Self { text, success: true }
    }
}

/// Full-precision, locale-independent float formatting for CSV cells.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let row: Vec<String> = cells.into_iter().collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data always serialises");
    text.push('\n');
    text
}

pub fn run(cmd: Command, cfg: &RunConfig, backend: Option<Backend>) -> Result<Artifact, RunError> {
    let backend = backend.or(cfg.backend);
    match cmd {
        Command::StaticTrace => static_trace(cfg, backend.unwrap_or(Backend::Rwa)),
        Command::RwaTrace => rwa_trace(cfg, backend.unwrap_or(Backend::Rwa)),
        Command::Sync => sync(cfg, backend.unwrap_or(Backend::Rwa)),
        Command::Sweep => sweep_csv(cfg, backend),
        Command::Validate => Ok(run_validation(cfg)?),
        Command::Spectroscopy => spectroscopy_json(cfg, backend),
    }
}

fn static_trace(cfg: &RunConfig, backend: Backend) -> Result<Artifact, RunError> {
    let st = cfg.section(&cfg.static_trace, "static_trace")?;
    let times = st.grid().times();
    let columns: Vec<Vec<f64>> = match backend {
        Backend::Rwa => ControlState::ALL
            .iter()
            .map(|&s| times.iter().map(|&t| static_occupation(&cfg.system, s, st.init, t)).collect())
            .collect::<condosc_core::Result<_>>()?,
        Backend::Oracle => ControlState::ALL
            .iter()
            .map(|&s| {
                let psi0 = StateVector::product(s, C64::from(st.init.a), C64::from(st.init.b))?;
                let trace = evolve_at(&cfg.system, &Drive::ZERO, &psi0, &times, &cfg.integration)?;
                // marginal of qubit B, which also covers Δ_A ≠ 0
                Ok(trace.lab_populations().iter().map(|pops| pops[0] + pops[2]).collect())
            })
            .collect::<condosc_core::Result<_>>()?,
    };
    let mut out = String::new();
    csv_row(&mut out, ["time", "p_up_control_up", "p_up_control_down"].map(String::from));
    for (k, &t) in times.iter().enumerate() {
        csv_row(&mut out, [fmt_f64(t), fmt_f64(columns[0][k]), fmt_f64(columns[1][k])]);
    }
    Ok(Artifact::ok(out))
}

fn rwa_trace(cfg: &RunConfig, backend: Backend) -> Result<Artifact, RunError> {
    let grid = cfg.section(&cfg.rwa_trace, "rwa_trace")?;
    let (p, d) = (&cfg.system, &cfg.drive);
    let times = grid.times();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for s in ControlState::ALL {
        columns.push(times.iter().map(|&t| transition_probability(p, d, s, t)).collect::<condosc_core::Result<_>>()?);
    }
    for s in ControlState::ALL {
        let eta = conditional_frequency(p, d, s)?.eta;
        columns.push(vec![eta.sin().powi(2); times.len()]);
    }
    let mut header = vec!["time", "p_flip_up", "p_flip_down", "envelope_up", "envelope_down"];
    if backend == Backend::Oracle {
        let eta = target_basis_angle(p);
        for s in ControlState::ALL {
            let trace = evolve_at(p, d, &StateVector::rotated(s, 0, eta), &times, &cfg.integration)?;
            let flipped = s.block_offset() + 1;
            columns.push(trace.rotated_populations().iter().map(|pops| pops[flipped]).collect());
        }
        header.extend(["oracle_flip_up", "oracle_flip_down"]);
    }
    let mut out = String::new();
    csv_row(&mut out, header.into_iter().map(String::from));
    for (k, &t) in times.iter().enumerate() {
        csv_row(&mut out, std::iter::once(fmt_f64(t)).chain(columns.iter().map(|c| fmt_f64(c[k]))));
    }
    Ok(Artifact::ok(out))
}

fn sync(cfg: &RunConfig, backend: Backend) -> Result<Artifact, RunError> {
    let sc = cfg.section(&cfg.sync, "sync")?;
    let opts = SyncOptions { branch: sc.branch, backend, integration: cfg.integration };
    let result = find_sync(&cfg.system, &sc.indices(), &opts)?;
    Ok(Artifact::ok(to_json(&result)))
}

fn sweep_csv(cfg: &RunConfig, backend: Option<Backend>) -> Result<Artifact, RunError> {
    let mut spec = cfg.section(&cfg.sweep, "sweep")?.clone();
    if let Some(b) = backend {
        spec.backend = b;
    }
    let grid = sweep(&cfg.system, &cfg.drive, &spec, &cfg.integration)?;
    let mut out = String::new();
    csv_row(&mut out, grid.params.iter().map(|p| p.name().to_string()).chain(["objective".to_string()]));
    for pt in &grid.points {
        let value = pt.value.map(fmt_f64).unwrap_or_default();
        csv_row(&mut out, pt.coords.iter().copied().map(fmt_f64).chain([value]));
    }
    Ok(Artifact::ok(out))
}

fn spectroscopy_json(cfg: &RunConfig, backend: Option<Backend>) -> Result<Artifact, RunError> {
    if backend == Some(Backend::Rwa) {
        return Err(ConfigError::Invalid("spectroscopy always uses the oracle backend".into()).into());
    }
    let spec = cfg.section(&cfg.spectroscopy, "spectroscopy")?;
    let result = spectroscopy(&cfg.system, &cfg.drive, spec, &cfg.integration)?;
    Ok(Artifact::ok(to_json(&result)))
}
