use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Tolerance on |ψ|² − 1 for a freshly constructed state.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    Left,
    Right,
}

impl Chirality {
    pub fn mirror(self) -> Self {
        match self {
            Chirality::Left => Chirality::Right,
            Chirality::Right => Chirality::Left,
        }
    }
}

/// Normalized amplitude vector `c₁|1⟩ + c₂|2⟩ + c₃|3⟩` of one molecule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumState(Vector3<C64>);

impl QuantumState {
    pub fn new(c1: C64, c2: C64, c3: C64) -> Result<Self> {
        Self::from_vector(Vector3::new(c1, c2, c3))
    }

    pub fn from_vector(v: Vector3<C64>) -> Result<Self> {
        let norm_sq = v.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(QuantumState(v))
    }

    /// Scales `v` to unit norm. Fails on the zero vector.
    pub fn normalized(v: Vector3<C64>) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sq: norm * norm });
        }
        Ok(QuantumState(v.unscale(norm)))
    }

    /// Wraps a propagated vector; callers track the norm themselves.
    pub(crate) fn from_vector_unchecked(v: Vector3<C64>) -> Self {
        QuantumState(v)
    }

    /// Basis state `|k⟩`, `k ∈ {1, 2, 3}`.
    pub fn basis(k: usize) -> Self {
        assert!((1..=3).contains(&k), "basis index {k} out of range 1..=3");
        let mut v = Vector3::zeros();
        v[k - 1] = C64::new(1.0, 0.0);
        QuantumState(v)
    }

    pub fn ground() -> Self {
        Self::basis(1)
    }

    pub fn amplitudes(&self) -> &Vector3<C64> {
        &self.0
    }

    pub fn amplitude(&self, k: usize) -> C64 {
        self.0[k - 1]
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[0].norm_sqr(), self.0[1].norm_sqr(), self.0[2].norm_sqr()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> C64 {
        self.0.dotc(&other.0)
    }

    /// `|⟨self|other⟩|`, equal to 1 when the states agree up to a global phase.
    pub fn fidelity_amplitude(&self, other: &QuantumState) -> f64 {
        self.inner(other).norm()
    }
}

/// Bare level energies and drive frequencies. Only the resonant case is
/// propagated; [`LevelSystem::require_resonant`] enforces that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSystem {
    /// `(E₁, E₂, E₃)`.
    pub energies: [f64; 3],
    /// `(ω₂₁, ω₃₁, ω₃₂)`.
    pub drive_frequencies: [f64; 3],
}

impl LevelSystem {
    pub fn resonant(energies: [f64; 3]) -> Self {
        let [e1, e2, e3] = energies;
        LevelSystem { energies, drive_frequencies: [e2 - e1, e3 - e1, e3 - e2] }
    }

    /// `(Δ₁, Δ₂, Δ₃) = (E₃−E₁−ω₃₁, E₂−E₁−ω₂₁, E₃−E₂−ω₃₂)`.
    pub fn detunings(&self) -> [f64; 3] {
        let [e1, e2, e3] = self.energies;
        let [w21, w31, w32] = self.drive_frequencies;
        [e3 - e1 - w31, e2 - e1 - w21, e3 - e2 - w32]
    }

    pub fn require_resonant(&self) -> Result<()> {
        let detunings = self.detunings();
        if detunings.iter().any(|d| *d != 0.0) {
            return Err(Error::OffResonance { detunings });
        }
        Ok(())
    }
}
