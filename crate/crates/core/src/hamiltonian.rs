//! Interaction-picture Hamiltonian and its exact short-time propagator.

use nalgebra::{Matrix3, Vector3};

use crate::pulse::{ChiralitySignMap, PulseSchedule, SignedSchedule, Transition};
use crate::C64;

/// Resonant interaction Hamiltonian `Σ_{i<j} Ω_ij |j⟩⟨i| + h.c.`; Hermitian
/// with zero diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMatrix(Matrix3<C64>);

impl HamiltonianMatrix {
    pub fn zero() -> Self {
        HamiltonianMatrix(Matrix3::zeros())
    }

    /// Entry `(j, i)` holds the signed `Ω_ij(t)`; `(i, j)` its conjugate.
    pub fn at(schedule: &SignedSchedule, t: f64) -> Self {
        let mut h = Matrix3::zeros();
        for transition in Transition::ALL {
            if schedule.envelope(transition).is_none() {
                continue;
            }
            let (i, j) = transition.levels();
            let omega = schedule.rabi_at(transition, t);
            h[(j, i)] = omega;
            h[(i, j)] = omega.conj();
        }
        HamiltonianMatrix(h)
    }

    /// Builds from a raw matrix, Hermitizing it from the lower triangle.
    pub fn from_lower(m: &Matrix3<C64>) -> Self {
        let mut h = Matrix3::zeros();
        for j in 0..3 {
            for i in 0..j {
                h[(j, i)] = m[(j, i)];
                h[(i, j)] = m[(j, i)].conj();
            }
            h[(j, j)] = C64::new(m[(j, j)].re, 0.0);
        }
        HamiltonianMatrix(h)
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.0
    }

    pub fn apply(&self, v: &Vector3<C64>) -> Vector3<C64> {
        self.0 * v
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

pub fn assemble_hamiltonian(schedule: &PulseSchedule, signs: &ChiralitySignMap, t: f64) -> HamiltonianMatrix {
    HamiltonianMatrix::at(&schedule.apply_sign_map(signs), t)
}

/// `exp(−i·H·dt)` through the spectral decomposition `H = V·diag(λ)·V†`.
pub fn step_unitary(h: &HamiltonianMatrix, dt: f64) -> Matrix3<C64> {
    if h.is_zero() {
        return Matrix3::identity();
    }
    let eig = h.0.symmetric_eigen();
    let v = eig.eigenvectors;
    let phases = Matrix3::from_diagonal(&eig.eigenvalues.map(|lambda| C64::from_polar(1.0, -lambda * dt)));
    v * phases * v.adjoint()
}
