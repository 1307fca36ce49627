//! The two-step protocol: a schedule, a sign convention and initial states
//! for both enantiomers.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::analytic::{FinalPopulations, ImperfectionParams};
use crate::error::{Error, Result};
use crate::propagate::{propagate, Evolution, PopulationTrace, PropagationConfig};
use crate::pulse::{effective_rabi, ChiralitySignMap, PulseEnvelope, PulseSchedule, Transition};
use crate::state::{Chirality, QuantumState};

/// Which enantiomer the step-2 fields trap in the dark state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// Fields as written (`Ω₁₃ = iΩ₀`); the left enantiomer is trapped.
    LeftDark,
    /// `Ω₁₃` negated for both enantiomers (`Ω₁₃ = −iΩ₀`); the right one is trapped.
    RightDark,
    /// Explicit per-enantiomer sign maps applied to the fields as written.
    Custom { left: ChiralitySignMap, right: ChiralitySignMap },
}

impl SignConvention {
    /// Sign maps `(left, right)` applied to the schedule as written.
    pub fn sign_maps(&self) -> (ChiralitySignMap, ChiralitySignMap) {
        match self {
            SignConvention::LeftDark => (ChiralitySignMap::LEFT, ChiralitySignMap::RIGHT),
            SignConvention::RightDark => {
                let flip13 = ChiralitySignMap::RIGHT;
                (ChiralitySignMap::LEFT.compose(&flip13), ChiralitySignMap::RIGHT.compose(&flip13))
            }
            SignConvention::Custom { left, right } => (*left, *right),
        }
    }

    /// The trapped enantiomer, if the convention is one of the two designs.
    pub fn dark(&self) -> Option<Chirality> {
        match self {
            SignConvention::LeftDark => Some(Chirality::Left),
            SignConvention::RightDark => Some(Chirality::Right),
            SignConvention::Custom { .. } => None,
        }
    }
}

/// Gaussian two-step schedule: a 1↔2 pulse of peak `√π/4` at `t = 3`,
/// then 1↔3 and 2↔3 pulses of peak `√(π/2)/2` at `t = 9`, the 1↔3 one
/// carrying phase `phase13`. With unit widths and `phase13 = π/2` the
/// areas are exactly π/4 and (effective) π/2.
pub fn gaussian_two_step(step1_width: f64, step2_width: f64, phase13: f64) -> Result<PulseSchedule> {
    let omega12 = PI.sqrt() / 4.0;
    let omega0 = 0.5 * FRAC_PI_2.sqrt();
    PulseSchedule::new(vec![
        PulseEnvelope::gaussian(Transition::T12, omega12, 3.0, step1_width, 0.0)?,
        PulseEnvelope::gaussian(Transition::T13, omega0, 9.0, step2_width, phase13)?,
        PulseEnvelope::gaussian(Transition::T23, omega0, 9.0, step2_width, 0.0)?,
    ])
}

pub fn ideal_schedule() -> PulseSchedule {
    gaussian_two_step(1.0, 1.0, FRAC_PI_2).expect("constant schedule is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub schedule: PulseSchedule,
    pub propagation: PropagationConfig,
    pub convention: SignConvention,
    pub initial_left: QuantumState,
    pub initial_right: QuantumState,
}

impl Protocol {
    /// Both enantiomers start in `|1⟩`.
    pub fn new(schedule: PulseSchedule, propagation: PropagationConfig, convention: SignConvention) -> Self {
        Protocol {
            schedule,
            propagation,
            convention,
            initial_left: QuantumState::ground(),
            initial_right: QuantumState::ground(),
        }
    }

    /// The ideal Gaussian protocol on `[0, 12]` with `dt = 1e-3`.
    pub fn standard() -> Self {
        Protocol::new(ideal_schedule(), PropagationConfig::standard(), SignConvention::LeftDark)
    }

    pub fn with_schedule(&self, schedule: PulseSchedule) -> Self {
        Protocol { schedule, ..self.clone() }
    }

    pub fn evolve(&self, chirality: Chirality) -> Result<Evolution> {
        let (left, right) = self.convention.sign_maps();
        match chirality {
            Chirality::Left => propagate(&self.initial_left, &self.schedule, &left, &self.propagation),
            Chirality::Right => propagate(&self.initial_right, &self.schedule, &right, &self.propagation),
        }
    }

    pub fn run(&self) -> Result<(Evolution, Evolution)> {
        Ok((self.evolve(Chirality::Left)?, self.evolve(Chirality::Right)?))
    }

    pub fn trace(&self) -> Result<PopulationTrace> {
        let (l, r) = self.run()?;
        Ok(PopulationTrace::combine(&l, &r))
    }

    pub fn final_populations(&self) -> Result<FinalPopulations> {
        let (l, r) = self.run()?;
        Ok(FinalPopulations { left: l.final_populations(), right: r.final_populations() })
    }

    /// The schedule with errors added on top: the 1↔2 area grows by `Δ`,
    /// the effective 1↔3/2↔3 area by `Δ′`, and the 1↔3 phase by `δφ`.
    pub fn perturbed_schedule(&self, params: &ImperfectionParams) -> Result<PulseSchedule> {
        let p12 = self.schedule.require(Transition::T12)?;
        let step2_area = (effective_rabi(&self.schedule)?.area() + params.delta_prime) / SQRT_2;
        let area12 = p12.area() + params.delta;
        self.schedule
            .map_pulse(Transition::T12, |p| p.with_area(area12))?
            .map_pulse(Transition::T13, |p| {
                let p = p.with_area(step2_area);
                PulseEnvelope { phase: p.phase + params.delta_phi, ..p }
            })?
            .map_pulse(Transition::T23, |p| p.with_area(step2_area))
    }

    /// Orients closed-form populations (computed for a trapped left
    /// enantiomer) to this protocol's convention.
    pub fn orient(&self, canonical: FinalPopulations) -> Result<FinalPopulations> {
        match self.convention.dark() {
            Some(Chirality::Left) => Ok(canonical),
            Some(Chirality::Right) => Ok(canonical.swapped()),
            None => Err(Error::config("sign_convention", "closed-form engines need left-dark or right-dark")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_dark_maps() {
        let (l, r) = SignConvention::RightDark.sign_maps();
        assert_eq!(l, ChiralitySignMap::RIGHT);
        assert_eq!(r, ChiralitySignMap::LEFT);
    }

    #[test]
    fn perturbed_schedule_areas() {
        let proto = Protocol::standard();
        let params = ImperfectionParams::new(0.05, -0.1, 0.2);
        let s = proto.perturbed_schedule(&params).unwrap();
        let got = ImperfectionParams::from_schedule(&s).unwrap();
        assert!((got.delta - 0.05).abs() < 1e-14);
        assert!((got.delta_prime + 0.1).abs() < 1e-14);
        assert!((got.delta_phi - 0.2).abs() < 1e-14);

        let zero = proto.perturbed_schedule(&ImperfectionParams::default()).unwrap();
        for (a, b) in zero.pulses().iter().zip(proto.schedule.pulses()) {
            assert!((a.amplitude - b.amplitude).abs() < 1e-15);
            assert_eq!(a.phase, b.phase);
        }
    }

    #[test]
    fn closed_form_needs_named_convention() {
        let proto = Protocol {
            convention: SignConvention::Custom { left: ChiralitySignMap::LEFT, right: ChiralitySignMap::LEFT },
            ..Protocol::standard()
        };
        let p = FinalPopulations { left: [1.0, 0.0, 0.0], right: [0.0, 0.0, 1.0] };
        assert!(proto.orient(p).is_err());
    }
}
