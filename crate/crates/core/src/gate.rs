// SPDX-License-Identifier: Apache-2.0

//! Probability tables, gate fidelity, and the frequency-matching conditions
//! that synchronise the Rabi and non-Rabi oscillations into a CNOT or
//! controlled-U gate.
//!
//! Tables are indexed `[input][output]` over `{|↑0⟩, |↑1⟩, |↓0⟩, |↓1⟩}`, the
//! control qubit's lab state times the target's rotated-basis state. Entries
//! are probabilities; phases are not tracked.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::{ControlState, Drive, ResonanceBranch, SystemParams};
use crate::rwa::{non_rabi_angle, rabi_frequency, rwa_context, transition_probability};

/// Row-sum tolerance for a valid table.
pub const ROW_SUM_TOL: f64 = 1e-10;
/// Default ceiling on `sin²η_{n-R}` for a table to count as controlled-U.
pub const DEFAULT_SUPPRESSION_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    pub time: f64,
    /// `entries[α][β] = P_{β←α}`.
    pub entries: [[f64; 4]; 4],
}

impl ProbabilityTable {
    pub fn identity(time: f64) -> Self {
        let mut entries = [[0.0; 4]; 4];
        for (k, row) in entries.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        Self { time, entries }
    }

    /// Block-diagonal table from the two conditional 2×2 blocks.
    pub fn from_blocks(time: f64, up: [[f64; 2]; 2], down: [[f64; 2]; 2]) -> Self {
        let mut entries = [[0.0; 4]; 4];
        for r in 0..2 {
            for c in 0..2 {
                entries[r][c] = up[r][c];
                entries[r + 2][c + 2] = down[r][c];
            }
        }
        Self { time, entries }
    }

    /// Symmetric flip block `[[1 − P, P], [P, 1 − P]]`.
    pub fn flip_block(p: f64) -> [[f64; 2]; 2] {
        [[1.0 - p, p], [p, 1.0 - p]]
    }

    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.entries[input][output]
    }

    pub fn row_sums(&self) -> [f64; 4] {
        self.entries.map(|row| row.iter().sum())
    }

    /// Largest entry in the two off-diagonal 2×2 blocks (population moved
    /// between control states).
    pub fn leakage(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                if (r < 2) != (c < 2) {
                    worst = worst.max(self.entries[r][c].abs());
                }
            }
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        for (r, row) in self.entries.iter().enumerate() {
            if row.iter().any(|&v| !(-ROW_SUM_TOL..=1.0 + ROW_SUM_TOL).contains(&v)) {
                return Err(invalid("probability table", format!("row {r} has entries outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(invalid("probability table", format!("row {r} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &ProbabilityTable) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Ideal gates a realised table can be scored against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateTarget {
    /// Target flips when the control is `|↑⟩`.
    CnotPlus,
    /// Target flips when the control is `|↓⟩`.
    CnotMinus,
    /// Rotation by `angle` on the target when the control is `|↑⟩`.
    CuPlus {
        angle: f64,
    },
    CuMinus {
        angle: f64,
    },
}

impl GateTarget {
    pub fn cnot(branch: ResonanceBranch) -> Self {
        match branch {
            ResonanceBranch::Plus => GateTarget::CnotPlus,
            ResonanceBranch::Minus => GateTarget::CnotMinus,
        }
    }

    pub fn ideal(&self) -> ProbabilityTable {
        let keep = ProbabilityTable::flip_block(0.0);
        let (up, down) = match *self {
            GateTarget::CnotPlus => (ProbabilityTable::flip_block(1.0), keep),
            GateTarget::CnotMinus => (keep, ProbabilityTable::flip_block(1.0)),
            GateTarget::CuPlus { angle } => (ProbabilityTable::flip_block((0.5 * angle).sin().powi(2)), keep),
            GateTarget::CuMinus { angle } => (keep, ProbabilityTable::flip_block((0.5 * angle).sin().powi(2))),
        };
        ProbabilityTable::from_blocks(0.0, up, down)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub error: f64,
    pub at_time: f64,
}

/// `F = ¼ Tr(table · ideal)`, `δF = 1 − F`.
pub fn fidelity(table: &ProbabilityTable, target: &GateTarget) -> FidelityReport {
    let ideal = target.ideal();
    let mut trace = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            trace += table.entries[a][b] * ideal.entries[b][a];
        }
    }
    let fidelity = 0.25 * trace;
    FidelityReport { fidelity, error: 1.0 - fidelity, at_time: table.time }
}

/// RWA probability table: each control block is a symmetric flip block with
/// the conditional transition probability.
pub fn probability_table_rwa(p: &SystemParams, d: &Drive, t: f64) -> Result<ProbabilityTable> {
    let up = transition_probability(p, d, ControlState::Up, t)?;
    let down = transition_probability(p, d, ControlState::Down, t)?;
    Ok(ProbabilityTable::from_blocks(t, ProbabilityTable::flip_block(up), ProbabilityTable::flip_block(down)))
}

/// Integers parameterising a synchronised operating point: `n` non-Rabi
/// periods beyond the `l`-th Rabi flip, repeated at flip index `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingIndices {
    pub n: u32,
    pub l: u32,
    #[serde(default = "one")]
    pub m: u32,
}

fn one() -> u32 {
    1
}

impl MatchingIndices {
    pub fn new(n: u32, l: u32) -> Result<Self> {
        let idx = Self { n, l, m: 1 };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n", self.n), ("l", self.l), ("m", self.m)] {
            if v == 0 {
                return Err(invalid(name, "matching indices start at 1"));
            }
        }
        Ok(())
    }

    /// `(2l − 1) / √((2n − 1)(2n + 4l − 3))`, the common prefactor of the
    /// synchronised amplitude and frequencies.
    pub fn prefactor(&self) -> f64 {
        let n = f64::from(self.n);
        let l = f64::from(self.l);
        (2.0 * l - 1.0) / ((2.0 * n - 1.0) * (2.0 * n + 4.0 * l - 3.0)).sqrt()
    }
}

/// `Ω_{n-R} / Ω_R = 2(n + l − 1) / (2l − 1)`.
pub fn matching_ratio(idx: &MatchingIndices) -> f64 {
    let n = f64::from(idx.n);
    let l = f64::from(idx.l);
    2.0 * (n + l - 1.0) / (2.0 * l - 1.0)
}

/// Drive amplitude satisfying the matching condition,
/// `V_B = (2l − 1)/√((2n − 1)(2n + 4l − 3)) · 8Jε_B/Δ_B`.
///
/// The sign follows `Jε_B/Δ_B`; only `|V_B|` matters for the dynamics.
pub fn vb_cnot(p: &SystemParams, idx: &MatchingIndices) -> Result<f64> {
    idx.validate()?;
    if p.delta_b == 0.0 {
        return Err(invalid("delta_b", "synchronised amplitude needs Δ_B ≠ 0"));
    }
    Ok(idx.prefactor() * 8.0 * p.coupling * p.eps_b / p.delta_b)
}

/// Magnitudes `(Ω_R, Ω_{n-R})` at the synchronised amplitude.
pub fn cnot_frequencies(p: &SystemParams, idx: &MatchingIndices) -> Result<(f64, f64)> {
    idx.validate()?;
    let omega0 = p.splitting_b();
    if omega0 == 0.0 {
        return Err(Error::ZeroSplitting);
    }
    let scale = (4.0 * p.coupling * p.eps_b / omega0).abs();
    let omega_r = idx.prefactor() * scale;
    Ok((omega_r, omega_r * matching_ratio(idx)))
}

/// `count` successive flip times `(k − ½)·2π/Ω_R` for `k = l, l + 1, …`.
pub fn operation_times(omega_r: f64, l: u32, count: usize) -> Result<Vec<f64>> {
    if !(omega_r > 0.0) || !omega_r.is_finite() {
        return Err(invalid("omega_r", format!("must be positive, got {omega_r}")));
    }
    if l == 0 {
        return Err(invalid("l", "matching indices start at 1"));
    }
    let period = TAU / omega_r;
    Ok((0..count).map(|k| (f64::from(l) + k as f64 - 0.5) * period).collect())
}

/// Non-Rabi amplitude at the synchronised point, `¼((2l − 1)/(n + l − 1))²`.
pub fn cu_suppression(idx: &MatchingIndices) -> f64 {
    let n = f64::from(idx.n);
    let l = f64::from(idx.l);
    let num = 2.0 * l - 1.0;
    let den = 2.0 * (n + l - 1.0);
    (num * num) / (den * den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuTruthTable {
    pub table: ProbabilityTable,
    /// `sin²η_{n-R}` of the neglected non-Rabi block.
    pub suppression: f64,
    pub warning: Option<String>,
}

/// Controlled-U table with the non-Rabi block treated as frozen.
pub fn cu_truth_table(p: &SystemParams, d: &Drive, branch: ResonanceBranch, t: f64) -> Result<CuTruthTable> {
    cu_truth_table_with(p, d, branch, t, DEFAULT_SUPPRESSION_THRESHOLD)
}

pub fn cu_truth_table_with(
    p: &SystemParams,
    d: &Drive,
    branch: ResonanceBranch,
    t: f64,
    threshold: f64,
) -> Result<CuTruthTable> {
    rwa_context(p, d)?;
    let omega_r = rabi_frequency(p, d)?;
    let flip = ProbabilityTable::flip_block((0.5 * omega_r * t).sin().powi(2));
    let keep = ProbabilityTable::flip_block(0.0);
    let table = match branch {
        ResonanceBranch::Plus => ProbabilityTable::from_blocks(t, flip, keep),
        ResonanceBranch::Minus => ProbabilityTable::from_blocks(t, keep, flip),
    };
    let suppression = non_rabi_angle(p, d).map(|eta| eta.sin().powi(2)).unwrap_or(0.0);
    let warning = (suppression >= threshold)
        .then(|| format!("non-Rabi amplitude sin²η = {suppression:.4} is not below {threshold}; table neglects it"));
    Ok(CuTruthTable { table, suppression, warning })
}

/// Half a Rabi period, the first CNOT time for `l = 1`.
pub fn half_period(omega_r: f64) -> f64 {
    PI / omega_r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rwa::{non_rabi_frequency, resonant_frequencies};

    fn params() -> SystemParams {
        SystemParams::new(5.0, 0.0, 3.0, 1.0, 0.01)
    }

    #[test]
    fn identity_scores_half_against_cnot() {
        let f = fidelity(&ProbabilityTable::identity(0.0), &GateTarget::CnotPlus);
        assert!((f.fidelity - 0.5).abs() < 1e-15);
        assert!((f.fidelity + f.error - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&GateTarget::CnotPlus.ideal(), &GateTarget::CnotPlus).fidelity, 1.0);
        assert_eq!(fidelity(&GateTarget::CnotMinus.ideal(), &GateTarget::CnotPlus).fidelity, 0.0);
    }

    #[test]
    fn ideal_tables() {
        let plus = GateTarget::CnotPlus.ideal();
        assert_eq!(plus.entries[0], [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(plus.entries[1], [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(plus.entries[2], [0.0, 0.0, 1.0, 0.0]);
        let minus = GateTarget::CnotMinus.ideal();
        assert_eq!(minus.entries[3], [0.0, 0.0, 1.0, 0.0]);
        let cu = GateTarget::CuPlus { angle: PI }.ideal();
        assert!(cu.max_abs_diff(&plus) < 1e-15);
        for t in [GateTarget::CnotPlus, GateTarget::CuMinus { angle: 0.7 }] {
            t.ideal().validate().unwrap();
        }
    }

    #[test]
    fn matching_ratios() {
        let r = |n, l| matching_ratio(&MatchingIndices::new(n, l).unwrap());
        assert_eq!(r(1, 1), 2.0);
        assert_eq!(r(2, 1), 4.0);
        assert!((r(1, 2) - 4.0 / 3.0).abs() < 1e-15);
        assert!(MatchingIndices::new(0, 1).is_err());
        assert!(MatchingIndices::new(1, 0).is_err());
    }

    #[test]
    fn vb_cnot_examples() {
        let p = params();
        let idx = MatchingIndices::new(1, 1).unwrap();
        let expected = 8.0 * p.coupling * p.eps_b / (3f64.sqrt() * p.delta_b);
        assert!((vb_cnot(&p, &idx).unwrap() - expected).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for n in 1..40 {
            let v = vb_cnot(&p, &MatchingIndices::new(n, 2).unwrap()).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(vb_cnot(&p, &MatchingIndices::new(100_000, 1).unwrap()).unwrap() < 1e-5);
        assert!(vb_cnot(&SystemParams { delta_b: 0.0, ..p }, &idx).is_err());
    }

    #[test]
    fn synchronised_frequencies_match_driven_formulas() {
        let p = params();
        for n in 1..=6 {
            for l in 1..=6 {
                let idx = MatchingIndices::new(n, l).unwrap();
                let v_b = vb_cnot(&p, &idx).unwrap();
                let d = Drive::new(0.0, v_b, 0.0);
                let (wr, wnr) = cnot_frequencies(&p, &idx).unwrap();
                let wr_direct = rabi_frequency(&p, &d).unwrap();
                let wnr_direct = non_rabi_frequency(&p, &d).unwrap();
                assert!((wr - wr_direct).abs() < 1e-12 * wr);
                assert!((wnr - wnr_direct).abs() < 1e-12 * wnr);
                assert!((wnr / wr - matching_ratio(&idx)).abs() < 1e-12);
            }
        }
        let (wr, wnr) =
            cnot_frequencies(&SystemParams { coupling: 0.0, ..p }, &MatchingIndices::new(1, 1).unwrap()).unwrap();
        assert_eq!((wr, wnr), (0.0, 0.0));
    }

    #[test]
    fn operation_time_grid() {
        let w = 0.37;
        assert!((operation_times(w, 1, 1).unwrap()[0] - PI / w).abs() < 1e-14);
        assert!((operation_times(w, 2, 1).unwrap()[0] - 3.0 * PI / w).abs() < 1e-14);
        let ts = operation_times(w, 1, 4).unwrap();
        for pair in ts.windows(2) {
            assert!((pair[1] - pair[0] - TAU / w).abs() < 1e-12);
        }
        assert!(operation_times(0.0, 1, 1).is_err());
        assert!(operation_times(-1.0, 1, 1).is_err());
    }

    #[test]
    fn suppression_values() {
        let s = |n, l| cu_suppression(&MatchingIndices::new(n, l).unwrap());
        assert_eq!(s(1, 1), 0.25);
        assert_eq!(s(5, 1), 0.01);
        for l in 1..=6 {
            for n in 1..=10 {
                assert!(s(n + 1, l) < s(n, l));
            }
        }
    }

    #[test]
    fn rwa_table_examples() {
        let p = params();
        let idx = MatchingIndices::new(1, 1).unwrap();
        let v_b = vb_cnot(&p, &idx).unwrap();
        let (plus, minus) = resonant_frequencies(&p).unwrap();
        let d = Drive::new(0.0, v_b, plus);
        let t0 = probability_table_rwa(&p, &d, 0.0).unwrap();
        assert_eq!(t0.entries, ProbabilityTable::identity(0.0).entries);

        let t_op = half_period(rabi_frequency(&p, &d).unwrap());
        let table = probability_table_rwa(&p, &d, t_op).unwrap();
        assert!(table.max_abs_diff(&GateTarget::CnotPlus.ideal()) < 1e-10);
        table.validate().unwrap();
        assert_eq!(table.leakage(), 0.0);

        let dm = Drive { omega: minus, ..d };
        let table = probability_table_rwa(&p, &dm, t_op).unwrap();
        assert!(table.get(0, 1).abs() < 1e-10);
        assert!((table.get(2, 3) - 1.0).abs() < 1e-10);
        assert!((fidelity(&table, &GateTarget::CnotMinus).fidelity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cu_tables() {
        let p = params();
        let idx = MatchingIndices::new(5, 1).unwrap();
        let v_b = vb_cnot(&p, &idx).unwrap();
        let (plus, _) = resonant_frequencies(&p).unwrap();
        let d = Drive::new(0.0, v_b, plus);
        let cu0 = cu_truth_table(&p, &d, ResonanceBranch::Plus, 0.0).unwrap();
        assert_eq!(cu0.table.entries, ProbabilityTable::identity(0.0).entries);
        assert!(cu0.warning.is_none());
        assert!((cu0.suppression - 0.01).abs() < 1e-12);

        let t = half_period(rabi_frequency(&p, &d).unwrap());
        let plus_table = cu_truth_table(&p, &d, ResonanceBranch::Plus, t).unwrap().table;
        assert!(plus_table.max_abs_diff(&GateTarget::CnotPlus.ideal()) < 1e-12);
        let minus_table = cu_truth_table(&p, &d, ResonanceBranch::Minus, t).unwrap().table;
        assert!(minus_table.max_abs_diff(&GateTarget::CnotMinus.ideal()) < 1e-12);

        let loud = Drive::new(0.0, vb_cnot(&p, &MatchingIndices::new(1, 1).unwrap()).unwrap(), plus);
        assert!(cu_truth_table(&p, &loud, ResonanceBranch::Plus, t).unwrap().warning.is_some());
    }
}
