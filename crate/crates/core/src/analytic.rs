//! Closed-form evolutions of the two-step protocol and the second-order
//! population formulas for imperfect pulses.
//!
//! Conventions follow the canonical design: `Ω₁₃ = iΩ₀`, `Ω₂₃ = Ω₀` for the
//! left enantiomer, with `Ω₁₃` sign-flipped for the right one. The left
//! enantiomer is trapped, the right one is pumped.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::{effective_rabi, PulseSchedule, Transition};
use crate::state::{Chirality, QuantumState};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Deviations from the ideal protocol: step-1 area error `Δ`, step-2
/// effective area error `Δ′`, and the relative phase error `δφ` of `Ω₁₃`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImperfectionParams {
    pub delta: f64,
    pub delta_prime: f64,
    pub delta_phi: f64,
}

impl ImperfectionParams {
    /// Largest magnitude at which the second-order formulas are trusted.
    pub const PERTURBATIVE_LIMIT: f64 = 0.2;

    pub fn new(delta: f64, delta_prime: f64, delta_phi: f64) -> Self {
        ImperfectionParams { delta, delta_prime, delta_phi }
    }

    /// `max(|Δ|, |Δ′|, |δφ|)`.
    pub fn magnitude(&self) -> f64 {
        self.delta.abs().max(self.delta_prime.abs()).max(self.delta_phi.abs())
    }

    pub fn within_perturbative_range(&self) -> bool {
        self.magnitude() <= Self::PERTURBATIVE_LIMIT
    }

    /// Reads the errors off a two-step schedule: `Δ = A₁₂ − π/4`,
    /// `Δ′ = √2·A₁₃ − π/2`, `δφ = φ₁₃ − φ₂₃ − π/2`.
    pub fn from_schedule(schedule: &PulseSchedule) -> Result<Self> {
        let p12 = schedule.require(Transition::T12)?;
        let p13 = schedule.require(Transition::T13)?;
        let p23 = schedule.require(Transition::T23)?;
        let eff = effective_rabi(schedule)?;
        Ok(ImperfectionParams {
            delta: p12.area() - FRAC_PI_4,
            delta_prime: eff.area() - FRAC_PI_2,
            delta_phi: p13.phase - p23.phase - FRAC_PI_2,
        })
    }
}

/// Final populations `[p₁, p₂, p₃]` of each enantiomer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalPopulations {
    pub left: [f64; 3],
    pub right: [f64; 3],
}

impl FinalPopulations {
    pub fn get(&self, chirality: Chirality) -> [f64; 3] {
        match chirality {
            Chirality::Left => self.left,
            Chirality::Right => self.right,
        }
    }

    /// `[p₁ᴸ, p₂ᴸ, p₃ᴸ, p₁ᴿ, p₂ᴿ, p₃ᴿ]`.
    pub fn flat(&self) -> [f64; 6] {
        let [a, b, c] = self.left;
        let [d, e, f] = self.right;
        [a, b, c, d, e, f]
    }

    pub fn swapped(&self) -> Self {
        FinalPopulations { left: self.right, right: self.left }
    }

    pub fn max_abs_diff(&self, other: &FinalPopulations) -> f64 {
        self.flat().iter().zip(other.flat()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `±1` for the left/right enantiomer.
fn handed(chirality: Chirality) -> f64 {
    match chirality {
        Chirality::Left => 1.0,
        Chirality::Right => -1.0,
    }
}

/// `cos θ |1⟩ − i sin θ |2⟩` after a 1↔2 pulse of area `θ`.
pub fn step1_closed_form(area: f64) -> QuantumState {
    QuantumState::from_vector_unchecked(Vector3::new(C64::new(area.cos(), 0.0), C64::new(0.0, -area.sin()), ZERO))
}

/// `(|1⟩ − i|2⟩)/√2`.
pub fn prepared_state() -> QuantumState {
    step1_closed_form(FRAC_PI_4)
}

/// `|Φ⟩_L = (−i|1⟩ + |2⟩)/√2`, `|Φ⟩_R = (i|1⟩ + |2⟩)/√2`.
pub fn bright_state(chirality: Chirality) -> QuantumState {
    imperfect_bright_state(0.0, chirality)
}

/// Pumped enantiomer after an effective rotation of area `θ′`:
/// `−i cos θ′ |Φ⟩_R − sin θ′ |3⟩`.
pub fn step2_closed_form_pumped(area_prime: f64) -> QuantumState {
    let phi = bright_state(Chirality::Right);
    let v = phi.amplitudes() * C64::new(0.0, -area_prime.cos()) + Vector3::new(ZERO, ZERO, C64::new(-area_prime.sin(), 0.0));
    QuantumState::from_vector_unchecked(v)
}

/// Zero-eigenvalue state `(Ω₂₃|1⟩ − Ω₁₃|2⟩)/√(|Ω₁₃|²+|Ω₂₃|²)` of the
/// step-2 Hamiltonian with couplings `Ω₁₃`, `Ω₂₃` (signs already applied).
pub fn dark_state(omega13: C64, omega23: C64) -> Result<QuantumState> {
    let norm = (omega13.norm_sqr() + omega23.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    Ok(QuantumState::from_vector_unchecked(Vector3::new(omega23 / norm, -omega13 / norm, ZERO)))
}

/// State after an imperfect π/2 pulse with area error `Δ`:
/// `cos Δ (|1⟩ − i|2⟩)/√2 − sin Δ (|1⟩ + i|2⟩)/√2`. The same for both
/// enantiomers since the 1↔2 coupling carries no sign flip.
pub fn imperfect_step1_state(delta: f64, _chirality: Chirality) -> QuantumState {
    let (s, c) = delta.sin_cos();
    QuantumState::from_vector_unchecked(Vector3::new(
        C64::new((c - s) * FRAC_1_SQRT_2, 0.0),
        C64::new(0.0, -(c + s) * FRAC_1_SQRT_2),
        ZERO,
    ))
}

/// `|Φ′⟩ = (∓i e^{−iδφ}|1⟩ + |2⟩)/√2`, upper sign left.
pub fn imperfect_bright_state(delta_phi: f64, chirality: Chirality) -> QuantumState {
    let s = handed(chirality);
    let a1 = -I * s * C64::from_polar(FRAC_1_SQRT_2, -delta_phi);
    QuantumState::from_vector_unchecked(Vector3::new(a1, C64::new(FRAC_1_SQRT_2, 0.0), ZERO))
}

/// `|φ′⟩ = (|1⟩ ∓ i e^{iδφ}|2⟩)/√2`, orthogonal to `|Φ′⟩`.
pub fn imperfect_orthogonal_state(delta_phi: f64, chirality: Chirality) -> QuantumState {
    let s = handed(chirality);
    let a2 = -I * s * C64::from_polar(FRAC_1_SQRT_2, delta_phi);
    QuantumState::from_vector_unchecked(Vector3::new(C64::new(FRAC_1_SQRT_2, 0.0), a2, ZERO))
}

/// Split of the imperfect step-1 state into the component that couples to
/// `|3⟩` (`A|Φ′⟩`) and the decoupled one (`B|φ′⟩`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightDarkDecomposition {
    pub bright: QuantumState,
    pub orthogonal: QuantumState,
    pub coeff_bright: C64,
    pub coeff_orthogonal: C64,
    pub chirality: Chirality,
}

impl BrightDarkDecomposition {
    pub fn recombine(&self) -> Vector3<C64> {
        self.bright.amplitudes() * self.coeff_bright + self.orthogonal.amplitudes() * self.coeff_orthogonal
    }
}

/// `A = ½ i [±cos Δ (e^{iδφ} ∓ 1) ∓ sin Δ (e^{iδφ} ± 1)]`,
/// `B = ½ [cos Δ (1 ± e^{−iδφ}) − sin Δ (1 ∓ e^{−iδφ})]`, upper sign left.
pub fn coefficients_ab(delta: f64, delta_phi: f64, chirality: Chirality) -> BrightDarkDecomposition {
    let s = handed(chirality);
    let (sin_d, cos_d) = delta.sin_cos();
    let e = C64::from_polar(1.0, delta_phi);
    let e_conj = e.conj();
    let a = I * 0.5 * (s * cos_d * (e - s) - s * sin_d * (e + s));
    let b = 0.5 * (cos_d * (ONE + s * e_conj) - sin_d * (ONE - s * e_conj));
    BrightDarkDecomposition {
        bright: imperfect_bright_state(delta_phi, chirality),
        orthogonal: imperfect_orthogonal_state(delta_phi, chirality),
        coeff_bright: a,
        coeff_orthogonal: b,
        chirality,
    }
}

/// `−A sin Δ′ |Φ′⟩ − iA cos Δ′ |3⟩ + B |φ′⟩`: the state after the imperfect
/// step-2 rotation of area `π/2 + Δ′`.
pub fn imperfect_final_state(params: &ImperfectionParams, chirality: Chirality) -> QuantumState {
    let d = coefficients_ab(params.delta, params.delta_phi, chirality);
    let (sin_p, cos_p) = params.delta_prime.sin_cos();
    let a = d.coeff_bright;
    let mut v = d.bright.amplitudes() * (-a * sin_p) + d.orthogonal.amplitudes() * d.coeff_orthogonal;
    v[2] += -I * a * cos_p;
    QuantumState::from_vector_unchecked(v)
}

/// Final populations of both enantiomers from the closed-form final state.
pub fn exact_populations(params: &ImperfectionParams) -> FinalPopulations {
    FinalPopulations {
        left: imperfect_final_state(params, Chirality::Left).populations(),
        right: imperfect_final_state(params, Chirality::Right).populations(),
    }
}

/// Second-order expansion in `(Δ, Δ′, δφ)`:
///
/// ```text
/// p₁,₂ᴸ ≈ ½[1 − Δ² ± 2ΔΔ′ − δφ²/4]      p₃ᴸ ≈ δφ²/4 + Δ²
/// p₁,₂ᴿ ≈ ½[(Δ′ ± Δ)² + δφ²/4]          p₃ᴿ ≈ 1 − Δ² − Δ′² − δφ²/4
/// ```
pub fn perturbative_populations(params: &ImperfectionParams) -> FinalPopulations {
    let ImperfectionParams { delta: d, delta_prime: dp, delta_phi: phi } = *params;
    let q = 0.25 * phi * phi;
    FinalPopulations {
        left: [0.5 * (1.0 - d * d + 2.0 * d * dp - q), 0.5 * (1.0 - d * d - 2.0 * d * dp - q), q + d * d],
        right: [0.5 * ((dp + d).powi(2) + q), 0.5 * ((dp - d).powi(2) + q), 1.0 - d * d - dp * dp - q],
    }
}

/// Ideal step-2 couplings `(Ω₁₃, Ω₂₃)` for peak `Ω₀` as seen by `chirality`.
pub fn ideal_step2_couplings(omega0: f64, chirality: Chirality) -> (C64, C64) {
    (I * handed(chirality) * omega0, C64::new(omega0, 0.0))
}
