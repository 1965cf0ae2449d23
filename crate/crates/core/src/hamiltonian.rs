// SPDX-License-Identifier: Apache-2.0

//! Pauli algebra, the coupled two-qubit Hamiltonian and its conditional
//! blocks, and exact propagators for time-independent Hermitian generators.
//!
//! Basis ordering is fixed to `{|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩}` with qubit A as the
//! left tensor factor, and `σ^z|↑⟩ = +|↑⟩`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::{ControlState, Drive, SystemParams};

pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;

/// Relative Hermiticity tolerance (scaled by the largest entry).
pub const HERMITIAN_TOL: f64 = 1e-14;
/// Absolute unitarity tolerance for `‖U†U − I‖_max`.
pub const UNITARY_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    Id,
    X,
    Y,
    Z,
}

pub fn pauli(which: Pauli) -> CMat2 {
    match which {
        Pauli::Id => CMat2::new(ONE, ZERO, ZERO, ONE),
        Pauli::X => CMat2::new(ZERO, ONE, ONE, ZERO),
        Pauli::Y => CMat2::new(ZERO, -I, I, ZERO),
        Pauli::Z => CMat2::new(ONE, ZERO, ZERO, -ONE),
    }
}

/// `a ⊗ b`, with `a` acting on the left (control) factor.
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    CMat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

fn real2(m: &CMat2, s: f64) -> CMat2 {
    m.map(|z| z * s)
}

/// Single-qubit `½[(ε + V)σ^z − Δσ^x]`.
fn single_qubit(eps: f64, delta: f64, field: f64) -> CMat2 {
    real2(&pauli(Pauli::Z), 0.5 * (eps + field)) - real2(&pauli(Pauli::X), 0.5 * delta)
}

/// `H(t) = H_A ⊗ σ⁰ + σ⁰ ⊗ H_B + J σ^z ⊗ σ^z` with `V_i(t) = V_i cos ωt`.
pub fn full_hamiltonian(p: &SystemParams, d: &Drive, t: f64) -> CMat4 {
    let id = pauli(Pauli::Id);
    let z = pauli(Pauli::Z);
    let ha = single_qubit(p.eps_a, p.delta_a, d.field_a(t));
    let hb = single_qubit(p.eps_b, p.delta_b, d.field_b(t));
    kron(&ha, &id) + kron(&id, &hb) + kron(&z, &z).map(|e| e * p.coupling)
}

/// Qubit-B Hamiltonian conditioned on the control state `s`, valid when Δ_A
/// is negligible: `½[(ε_B + 2sJ + V_B(t))σ^z + s(ε_A + V_A(t))σ⁰ − Δ_B σ^x]`.
///
/// Δ_A is ignored here; whether it is small enough is the caller's call.
pub fn conditional_hamiltonian(p: &SystemParams, d: &Drive, s: ControlState, t: f64) -> CMat2 {
    let sign = s.sign();
    real2(&pauli(Pauli::Z), 0.5 * (p.eps_b + 2.0 * sign * p.coupling + d.field_b(t)))
        + real2(&pauli(Pauli::Id), 0.5 * sign * (p.eps_a + d.field_a(t)))
        - real2(&pauli(Pauli::X), 0.5 * p.delta_b)
}

/// Dense square complex matrices the kernel knows how to exponentiate.
pub trait Operator: Sized + Clone {
    /// `max |H − H†|` over entries.
    fn hermitian_deviation(&self) -> f64;
    fn max_abs(&self) -> f64;
    /// Real eigenvalues (ascending) and unitary eigenvector matrix of a
    /// Hermitian operator. The input is symmetrised first.
    fn eigh(&self) -> (Vec<f64>, Self);
    fn unitary_deviation(&self) -> f64;
    fn identity() -> Self;

    /// `exp(−iHt)` via Hermitian eigendecomposition.
    fn propagator(&self, t: f64) -> Result<Self>;
}

macro_rules! impl_operator {
    ($ty:ty, $n:expr) => {
        impl Operator for $ty {
            fn hermitian_deviation(&self) -> f64 {
                (self - self.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
            }

            fn max_abs(&self) -> f64 {
                self.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }

            fn eigh(&self) -> (Vec<f64>, Self) {
                let sym = (self + self.adjoint()).map(|z| z * 0.5);
                let eig = SymmetricEigen::new(sym);
                let mut order: Vec<usize> = (0..$n).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
                let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
                let vectors = <$ty>::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
                (values, vectors)
            }

            fn unitary_deviation(&self) -> f64 {
                (self.adjoint() * self - <$ty>::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
            }

            fn identity() -> Self {
                <$ty>::identity()
            }

            fn propagator(&self, t: f64) -> Result<Self> {
                let deviation = self.hermitian_deviation();
                let allowed = HERMITIAN_TOL * self.max_abs();
                if deviation > allowed {
                    return Err(Error::NotHermitian { deviation, allowed });
                }
                if t == 0.0 {
                    return Ok(<$ty>::identity());
                }
                let (values, vectors) = self.eigh();
                let phases = <$ty>::from_fn(|r, c| if r == c { C64::from_polar(1.0, -values[r] * t) } else { ZERO });
                Ok(&vectors * phases * vectors.adjoint())
            }
        }
    };
}

impl_operator!(CMat2, 2);
impl_operator!(CMat4, 4);

/// Upper-left (`Up`) or lower-right (`Down`) 2×2 block of a two-qubit operator.
pub fn block(h: &CMat4, s: ControlState) -> CMat2 {
    let o = s.block_offset();
    CMat2::from_fn(|r, c| h[(o + r, o + c)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn max_diff<M: Operator>(a: &M, b: &M) -> f64
    where
        for<'a> &'a M: std::ops::Sub<&'a M, Output = M>,
    {
        (a - b).max_abs()
    }

    #[test]
    fn pauli_matrices() {
        assert_eq!(pauli(Pauli::Z), CMat2::new(c(1.0), c(0.0), c(0.0), c(-1.0)));
        assert_eq!(pauli(Pauli::X), CMat2::new(c(0.0), c(1.0), c(1.0), c(0.0)));
        assert_eq!(pauli(Pauli::Id), CMat2::identity());
        // σ^x σ^y = iσ^z
        assert_eq!(pauli(Pauli::X) * pauli(Pauli::Y), pauli(Pauli::Z).map(|z| z * I));
    }

    #[test]
    fn kron_examples() {
        let id = pauli(Pauli::Id);
        let z = pauli(Pauli::Z);
        let x = pauli(Pauli::X);
        assert_eq!(kron(&id, &id), CMat4::identity());
        assert_eq!(kron(&z, &z), CMat4::from_diagonal(&nalgebra::Vector4::new(c(1.0), c(-1.0), c(-1.0), c(1.0))));
        let zx = kron(&z, &x);
        assert_eq!(block(&zx, ControlState::Up), x);
        assert_eq!(block(&zx, ControlState::Down), -x);
        assert_eq!(zx[(0, 2)], ZERO);
        // agrees with nalgebra's own Kronecker product
        assert_eq!(zx, z.kronecker(&x));
    }

    #[test]
    fn full_hamiltonian_example() {
        let p = SystemParams::new(2.0, 0.0, 1.0, 0.5, 0.5);
        let h = full_hamiltonian(&p, &Drive::ZERO, 0.0);
        let up = CMat2::new(c(2.0), c(-0.25), c(-0.25), c(0.0));
        let down = CMat2::new(c(-1.0), c(-0.25), c(-0.25), c(-1.0));
        assert!(max_diff(&block(&h, ControlState::Up), &up) < 1e-15);
        assert!(max_diff(&block(&h, ControlState::Down), &down) < 1e-15);
        for r in 0..2 {
            for col in 2..4 {
                assert_eq!(h[(r, col)], ZERO);
                assert_eq!(h[(col, r)], ZERO);
            }
        }
    }

    #[test]
    fn delta_a_couples_blocks() {
        let p = SystemParams::new(2.0, 0.3, 1.0, 0.5, 0.5);
        let h = full_hamiltonian(&p, &Drive::ZERO, 0.0);
        assert!((h[(0, 2)] - c(-0.15)).norm() < 1e-15);
        assert!((h[(1, 3)] - c(-0.15)).norm() < 1e-15);
    }

    #[test]
    fn conditional_examples() {
        let p = SystemParams::new(2.0, 0.0, 1.0, 0.5, 0.5);
        let up = conditional_hamiltonian(&p, &Drive::ZERO, ControlState::Up, 0.0);
        let down = conditional_hamiltonian(&p, &Drive::ZERO, ControlState::Down, 0.0);
        assert!(max_diff(&up, &CMat2::new(c(2.0), c(-0.25), c(-0.25), c(0.0))) < 1e-15);
        assert!(max_diff(&down, &CMat2::new(c(-1.0), c(-0.25), c(-0.25), c(-1.0))) < 1e-15);

        let free = SystemParams::new(2.0, 0.0, 1.0, 0.5, 0.0);
        let up = conditional_hamiltonian(&free, &Drive::ZERO, ControlState::Up, 0.0);
        let down = conditional_hamiltonian(&free, &Drive::ZERO, ControlState::Down, 0.0);
        let id = pauli(Pauli::Id);
        assert!(max_diff(&(up - down), &id.map(|z| z * 2.0)) < 1e-15);
    }

    #[test]
    fn propagator_spin_flip() {
        let h = pauli(Pauli::X).map(|z| z * 0.5);
        let u = h.propagator(std::f64::consts::PI).unwrap();
        let expected = pauli(Pauli::X).map(|z| z * -I);
        assert!(max_diff(&u, &expected) < 1e-14);
        assert_eq!(h.propagator(0.0).unwrap(), CMat2::identity());
    }

    #[test]
    fn propagator_rejects_non_hermitian() {
        let m = CMat2::new(c(1.0), c(1.0), c(0.0), c(1.0));
        assert!(matches!(m.propagator(1.0), Err(Error::NotHermitian { .. })));
    }
}
