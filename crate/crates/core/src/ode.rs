// SPDX-License-Identifier: Apache-2.0

//! Adaptive Runge–Kutta–Fehlberg 7(8) integration of `dy/dt = f(t, y)` for
//! small complex state vectors.
//!
//! The eighth-order solution is propagated and the embedded seventh-order
//! pair supplies the error estimate. For linear skew-Hermitian generators an
//! even propagation order keeps the leading truncation term off the
//! dissipative axis, so norm drift stays well below the local tolerance.
//!
//! Steps are clipped so that every requested output time is hit exactly;
//! there is no dense-output interpolation.

use nalgebra::SVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CVec<const N: usize> = SVector<C64, N>;

const STAGES: usize = 13;

const C: [f64; STAGES] =
    [0.0, 2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 0.5, 5.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0, 1.0];

// row i holds a_{i,0..i}
const A: [&[f64]; STAGES] = [
    &[],
    &[2.0 / 27.0],
    &[1.0 / 36.0, 1.0 / 12.0],
    &[1.0 / 24.0, 0.0, 1.0 / 8.0],
    &[5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0],
    &[1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0],
    &[-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0],
    &[31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0],
    &[2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0],
    &[-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0, -19.0 / 60.0, 17.0 / 6.0, -1.0 / 12.0],
    &[
        2383.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -301.0 / 82.0,
        2133.0 / 4100.0,
        45.0 / 82.0,
        45.0 / 164.0,
        18.0 / 41.0,
    ],
    &[3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0, 3.0 / 41.0, 6.0 / 41.0, 0.0],
    &[
        -1777.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -289.0 / 82.0,
        2193.0 / 4100.0,
        51.0 / 82.0,
        33.0 / 164.0,
        12.0 / 41.0,
        0.0,
        1.0,
    ],
];

// eighth-order weights
const B: [f64; STAGES] = [
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    34.0 / 105.0,
    9.0 / 35.0,
    9.0 / 35.0,
    9.0 / 280.0,
    9.0 / 280.0,
    0.0,
    41.0 / 840.0,
    41.0 / 840.0,
];

// eighth minus seventh order: (41/840)(k₁₂ + k₁₃ − k₁ − k₁₁)
const ERR_WEIGHT: f64 = 41.0 / 840.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Integrates from `(t0, y0)` through the ascending `outputs` and returns the
/// state at each output time.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: CVec<N>,
    outputs: &[f64],
    ctl: &StepControl,
) -> Result<(Vec<CVec<N>>, Stats)>
where
    F: Fn(f64, &CVec<N>) -> CVec<N>,
{
    let mut stats = Stats::default();
    let mut states = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut y = y0;
    let mut k0 = f(t, &y);
    stats.evaluations += 1;
    let mut h = initial_step(&y, &k0, ctl);

    for &target in outputs {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            let mut k = [k0; STAGES];
            k[0] = k0;
            for i in 1..STAGES {
                let mut incr = CVec::<N>::zeros();
                for (j, &a) in A[i].iter().enumerate() {
                    if a != 0.0 {
                        incr += k[j].scale(a);
                    }
                }
                k[i] = f(t + C[i] * step, &(y + incr.scale(step)));
            }
            stats.evaluations += STAGES - 1;
            let mut incr = CVec::<N>::zeros();
            for (ki, &b) in k.iter().zip(&B) {
                if b != 0.0 {
                    incr += ki.scale(b);
                }
            }
            let y_new = y + incr.scale(step);
            let err = (k[11] + k[12] - k[0] - k[10]).scale(ERR_WEIGHT * step);
            let err_norm = error_norm(&err, &y, &y_new, ctl);

            if err_norm <= 1.0 {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                y = y_new;
                k0 = f(t, &y);
                stats.evaluations += 1;
            } else {
                stats.rejected += 1;
            }

            let factor = if err_norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err_norm.powf(-1.0 / 8.0)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            // a clipped final step says nothing about the natural step size
            if !(last && err_norm <= 1.0) {
                h = (step * factor).min(ctl.max_step);
            }
            let floor = 1e-14 * t.abs().max(1.0);
            if h < floor || stats.accepted + stats.rejected > ctl.max_steps {
                return Err(Error::StepSizeCollapse { time: t, step: h, error_norm: err_norm });
            }
        }
        states.push(y);
    }
    Ok((states, stats))
}

fn error_norm<const N: usize>(err: &CVec<N>, y: &CVec<N>, y_new: &CVec<N>, ctl: &StepControl) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let scale = ctl.atol + ctl.rtol * y[i].norm().max(y_new[i].norm());
        acc += (err[i].norm() / scale).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Conservative first step from the scale of `y` and `y'`.
fn initial_step<const N: usize>(y: &CVec<N>, dy: &CVec<N>, ctl: &StepControl) -> f64 {
    let y_norm = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let dy_norm = dy.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let guess =
        if dy_norm > 0.0 { 0.01 * (y_norm.max(ctl.atol) / dy_norm) * ctl.rtol.powf(1.0 / 8.0) } else { ctl.max_step };
    guess.min(ctl.max_step).max(1e-12)
}
