//! Pulse envelopes, schedules and the enantiomer sign map.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// A driven transition `i ↔ j` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Transition {
    T12,
    T13,
    T23,
}

impl Transition {
    pub const ALL: [Transition; 3] = [Transition::T12, Transition::T13, Transition::T23];

    /// Zero-based `(lower, upper)` level indices.
    pub fn levels(self) -> (usize, usize) {
        match self {
            Transition::T12 => (0, 1),
            Transition::T13 => (0, 2),
            Transition::T23 => (1, 2),
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// `exp(−(t−center)²/width²)`.
    Gaussian,
    /// 1 on `[center − width, center + width)`, 0 elsewhere.
    Rectangular,
}

/// Complex Rabi frequency `amplitude · shape(t) · e^{i·phase}` on one transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseEnvelope {
    pub transition: Transition,
    pub shape: Shape,
    /// Peak magnitude in 1/τ.
    pub amplitude: f64,
    pub center: f64,
    /// Gaussian 1/e half-width, or half-duration of a rectangle.
    pub width: f64,
    /// Constant carrier phase in radians.
    pub phase: f64,
}

impl PulseEnvelope {
    pub fn new(
        transition: Transition,
        shape: Shape,
        amplitude: f64,
        center: f64,
        width: f64,
        phase: f64,
    ) -> Result<Self> {
        let p = PulseEnvelope { transition, shape, amplitude, center, width, phase };
        p.validate()?;
        Ok(p)
    }

    pub fn gaussian(transition: Transition, amplitude: f64, center: f64, width: f64, phase: f64) -> Result<Self> {
        Self::new(transition, Shape::Gaussian, amplitude, center, width, phase)
    }

    pub fn rectangular(transition: Transition, amplitude: f64, center: f64, width: f64, phase: f64) -> Result<Self> {
        Self::new(transition, Shape::Rectangular, amplitude, center, width, phase)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |message: &str| Err(Error::InvalidPulse { transition: self.transition, message: message.into() });
        if !(self.amplitude.is_finite() && self.center.is_finite() && self.width.is_finite() && self.phase.is_finite()) {
            return fail("parameters must be finite");
        }
        if self.width <= 0.0 {
            return fail("width must be positive");
        }
        if self.amplitude < 0.0 {
            return fail("amplitude must be non-negative");
        }
        Ok(())
    }

    /// Real envelope `shape(t)` in `[0, 1]`.
    pub fn shape_at(&self, t: f64) -> f64 {
        let x = t - self.center;
        match self.shape {
            Shape::Gaussian => (-(x * x) / (self.width * self.width)).exp(),
            Shape::Rectangular => {
                if x >= -self.width && x < self.width {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn magnitude_at(&self, t: f64) -> f64 {
        self.amplitude * self.shape_at(t)
    }

    pub fn rabi_at(&self, t: f64) -> C64 {
        C64::from_polar(self.magnitude_at(t), self.phase)
    }

    /// `∫|Ω(t)| dt` over the full support.
    pub fn area(&self) -> f64 {
        match self.shape {
            Shape::Gaussian => self.amplitude * self.width * PI.sqrt(),
            Shape::Rectangular => self.amplitude * 2.0 * self.width,
        }
    }

    /// Copy with the amplitude chosen so that [`area`](Self::area) equals `area`.
    pub fn with_area(&self, area: f64) -> Self {
        let unit = PulseEnvelope { amplitude: 1.0, ..*self };
        PulseEnvelope { amplitude: area / unit.area(), ..*self }
    }

    fn same_envelope(&self, other: &PulseEnvelope) -> bool {
        self.shape == other.shape && self.center == other.center && self.width == other.width
    }
}

pub fn rabi_at(p: &PulseEnvelope, t: f64) -> C64 {
    p.rabi_at(t)
}

pub fn pulse_area(p: &PulseEnvelope) -> f64 {
    p.area()
}

/// At most one envelope per transition.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PulseEnvelope>", into = "Vec<PulseEnvelope>")]
pub struct PulseSchedule {
    pulses: Vec<PulseEnvelope>,
}

impl PulseSchedule {
    pub fn new(pulses: Vec<PulseEnvelope>) -> Result<Self> {
        let mut seen = [false; 3];
        for p in &pulses {
            p.validate()?;
            let slot = p.transition.slot();
            if seen[slot] {
                return Err(Error::DuplicateTransition(p.transition));
            }
            seen[slot] = true;
        }
        Ok(PulseSchedule { pulses })
    }

    pub fn empty() -> Self {
        PulseSchedule::default()
    }

    pub fn pulses(&self) -> &[PulseEnvelope] {
        &self.pulses
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn get(&self, transition: Transition) -> Option<&PulseEnvelope> {
        self.pulses.iter().find(|p| p.transition == transition)
    }

    pub fn require(&self, transition: Transition) -> Result<&PulseEnvelope> {
        self.get(transition).ok_or(Error::MissingTransition(transition))
    }

    /// Applies `f` to the envelope on `transition`, if present.
    pub fn map_pulse(&self, transition: Transition, f: impl FnOnce(PulseEnvelope) -> PulseEnvelope) -> Result<Self> {
        let mut pulses = self.pulses.clone();
        if let Some(p) = pulses.iter_mut().find(|p| p.transition == transition) {
            *p = f(*p);
        }
        PulseSchedule::new(pulses)
    }

    pub fn rabi_at(&self, transition: Transition, t: f64) -> C64 {
        self.get(transition).map_or(C64::new(0.0, 0.0), |p| p.rabi_at(t))
    }

    /// The couplings seen by an enantiomer with sign map `signs`.
    pub fn apply_sign_map(&self, signs: &ChiralitySignMap) -> SignedSchedule {
        let mut slots = [None; 3];
        for p in &self.pulses {
            slots[p.transition.slot()] = Some((*p, signs.sign(p.transition)));
        }
        SignedSchedule { slots }
    }
}

impl TryFrom<Vec<PulseEnvelope>> for PulseSchedule {
    type Error = Error;

    fn try_from(pulses: Vec<PulseEnvelope>) -> Result<Self> {
        PulseSchedule::new(pulses)
    }
}

impl From<PulseSchedule> for Vec<PulseEnvelope> {
    fn from(s: PulseSchedule) -> Self {
        s.pulses
    }
}

/// Per-transition sign factors `(s₁₂, s₁₃, s₂₃)` with `Ω^X_ij = s_ij · Ω_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i8; 3]", into = "[i8; 3]")]
pub struct ChiralitySignMap([i8; 3]);

impl ChiralitySignMap {
    pub const LEFT: ChiralitySignMap = ChiralitySignMap([1, 1, 1]);
    pub const RIGHT: ChiralitySignMap = ChiralitySignMap([1, -1, 1]);

    pub fn new(s12: i8, s13: i8, s23: i8) -> Result<Self> {
        let signs = [s12, s13, s23];
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidSign(signs));
        }
        Ok(ChiralitySignMap(signs))
    }

    pub fn sign(&self, transition: Transition) -> i8 {
        self.0[transition.slot()]
    }

    pub fn signs(&self) -> [i8; 3] {
        self.0
    }

    /// Elementwise product: applying `self` then `other`.
    pub fn compose(&self, other: &ChiralitySignMap) -> ChiralitySignMap {
        ChiralitySignMap([self.0[0] * other.0[0], self.0[1] * other.0[1], self.0[2] * other.0[2]])
    }
}

impl TryFrom<[i8; 3]> for ChiralitySignMap {
    type Error = Error;

    fn try_from(s: [i8; 3]) -> Result<Self> {
        ChiralitySignMap::new(s[0], s[1], s[2])
    }
}

impl From<ChiralitySignMap> for [i8; 3] {
    fn from(m: ChiralitySignMap) -> Self {
        m.0
    }
}

/// Envelopes paired with an exact ±1 factor. Sign flips multiply the
/// factor, so applying a map twice restores the original couplings bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedSchedule {
    slots: [Option<(PulseEnvelope, i8)>; 3],
}

impl SignedSchedule {
    pub fn apply_sign_map(&self, signs: &ChiralitySignMap) -> SignedSchedule {
        let mut slots = self.slots;
        for (slot, t) in slots.iter_mut().zip(Transition::ALL) {
            if let Some((_, s)) = slot {
                *s *= signs.sign(t);
            }
        }
        SignedSchedule { slots }
    }

    pub fn envelope(&self, transition: Transition) -> Option<(&PulseEnvelope, i8)> {
        self.slots[transition.slot()].as_ref().map(|(p, s)| (p, *s))
    }

    pub fn rabi_at(&self, transition: Transition, t: f64) -> C64 {
        match &self.slots[transition.slot()] {
            Some((p, s)) => {
                let v = p.rabi_at(t);
                if *s < 0 {
                    -v
                } else {
                    v
                }
            }
            None => C64::new(0.0, 0.0),
        }
    }
}

/// `Ω′(t) = √2·Ω₀(t)`, the coupling between the bright superposition of the
/// lower levels and `|3⟩` when `|Ω₁₃| = |Ω₂₃| = Ω₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRabi {
    envelope: PulseEnvelope,
}

impl EffectiveRabi {
    pub fn at(&self, t: f64) -> f64 {
        self.envelope.magnitude_at(t)
    }

    pub fn peak(&self) -> f64 {
        self.envelope.amplitude
    }

    pub fn area(&self) -> f64 {
        self.envelope.area()
    }
}

/// Fails unless the 1-3 and 2-3 pulses have the same shape, timing and
/// magnitude (relative mismatch ≤ 1e-12).
pub fn effective_rabi(schedule: &PulseSchedule) -> Result<EffectiveRabi> {
    let p13 = schedule.require(Transition::T13)?;
    let p23 = schedule.require(Transition::T23)?;
    if !p13.same_envelope(p23) {
        return Err(Error::CptConditionViolated(format!(
            "shape/center/width {:?}/{}/{} vs {:?}/{}/{}",
            p13.shape, p13.center, p13.width, p23.shape, p23.center, p23.width
        )));
    }
    let scale = p13.amplitude.max(p23.amplitude);
    if scale > 0.0 && (p13.amplitude - p23.amplitude).abs() > 1e-12 * scale {
        return Err(Error::CptConditionViolated(format!(
            "amplitudes {} vs {}",
            p13.amplitude, p23.amplitude
        )));
    }
    Ok(EffectiveRabi {
        envelope: PulseEnvelope { transition: Transition::T13, amplitude: SQRT_2 * p13.amplitude, phase: 0.0, ..*p13 },
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use proptest::prelude::*;

    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn step2_pair(width: f64) -> PulseSchedule {
        let a0 = 0.5 * FRAC_PI_2.sqrt();
        PulseSchedule::new(vec![
            PulseEnvelope::gaussian(Transition::T13, a0, 9.0, width, FRAC_PI_2).unwrap(),
            PulseEnvelope::gaussian(Transition::T23, a0, 9.0, width, 0.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn gaussian_peak_and_tail() {
        let a = 0.7;
        let p = PulseEnvelope::gaussian(Transition::T12, a, 3.0, 1.3, 0.4).unwrap();
        let peak = p.rabi_at(3.0);
        assert!(close(peak.re, a * 0.4f64.cos(), 1e-15) && close(peak.im, a * 0.4f64.sin(), 1e-15));
        for t in [3.0 - 3.0 * 1.3, 3.0 + 3.0 * 1.3] {
            assert!(close(p.rabi_at(t).norm(), a * (-9.0f64).exp(), 1e-15));
        }
    }

    #[test]
    fn step2_pulse_value_at_center() {
        let s = step2_pair(1.0);
        let v = s.rabi_at(Transition::T13, 9.0);
        let expected = 0.5 * (PI / 2.0).sqrt();
        assert!(close(v.re, 0.0, 1e-16));
        assert!(close(v.im, expected, 1e-15));
    }

    #[test]
    fn rectangle_is_half_open() {
        let p = PulseEnvelope::rectangular(Transition::T12, 2.0, 1.0, 0.5, 0.0).unwrap();
        assert_eq!(p.shape_at(0.5), 1.0);
        assert_eq!(p.shape_at(1.5), 0.0);
        assert_eq!(p.shape_at(0.4999), 0.0);
        assert_eq!(p.area(), 2.0);
    }

    #[test]
    fn areas() {
        let quarter = PulseEnvelope::gaussian(Transition::T12, PI.sqrt() / 4.0, 3.0, 1.0, 0.0).unwrap();
        assert!(close(quarter.area(), PI / 4.0, 1e-15));
        let half = PulseEnvelope::gaussian(Transition::T13, PI.sqrt() / 2.0, 9.0, 1.0, 0.0).unwrap();
        assert!(close(half.area(), FRAC_PI_2, 1e-15));
        let zero = PulseEnvelope::gaussian(Transition::T13, 0.0, 9.0, 1.0, 0.0).unwrap();
        assert_eq!(zero.area(), 0.0);
        let p = quarter.with_area(1.234);
        assert!(close(p.area(), 1.234, 1e-15));
    }

    #[test]
    fn gaussian_area_matches_quadrature() {
        for &(a, w) in &[(0.3, 0.5), (1.0, 1.0), (0.62, 1.1), (2.5, 3.7)] {
            let p = PulseEnvelope::gaussian(Transition::T12, a, 4.0, w, 1.0).unwrap();
            // Composite Simpson on [c − 8w, c + 8w].
            let n = 20_000;
            let (lo, hi) = (p.center - 8.0 * w, p.center + 8.0 * w);
            let h = (hi - lo) / n as f64;
            let mut sum = p.rabi_at(lo).norm() + p.rabi_at(hi).norm();
            for k in 1..n {
                let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
                sum += weight * p.rabi_at(lo + k as f64 * h).norm();
            }
            let quad = sum * h / 3.0;
            assert!(((quad - p.area()) / p.area()).abs() < 1e-10, "{quad} vs {}", p.area());
        }
    }

    #[test]
    fn invalid_pulses_rejected() {
        assert!(PulseEnvelope::gaussian(Transition::T12, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(PulseEnvelope::gaussian(Transition::T12, -1.0, 0.0, 1.0, 0.0).is_err());
        let p = PulseEnvelope::gaussian(Transition::T12, 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(PulseSchedule::new(vec![p, p]), Err(Error::DuplicateTransition(Transition::T12))));
        assert!(ChiralitySignMap::new(1, 0, 1).is_err());
    }

    #[test]
    fn sign_maps() {
        let s = step2_pair(1.0);
        let left = s.apply_sign_map(&ChiralitySignMap::LEFT);
        let right = s.apply_sign_map(&ChiralitySignMap::RIGHT);
        for t in [7.0, 9.0, 10.3] {
            assert_eq!(left.rabi_at(Transition::T13, t), s.rabi_at(Transition::T13, t));
            assert_eq!(right.rabi_at(Transition::T13, t), -s.rabi_at(Transition::T13, t));
            assert_eq!(right.rabi_at(Transition::T23, t), s.rabi_at(Transition::T23, t));
            assert_eq!(right.rabi_at(Transition::T12, t), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn cpt_phase_condition() {
        let s = step2_pair(1.0);
        for t in [6.0, 8.5, 9.0, 11.9] {
            let ratio = s.rabi_at(Transition::T13, t) / s.rabi_at(Transition::T23, t);
            assert!(close(ratio.re, 0.0, 1e-15) && close(ratio.im, 1.0, 1e-15));
        }
    }

    #[test]
    fn effective_rabi_of_step2_pair() {
        let eff = effective_rabi(&step2_pair(1.0)).unwrap();
        assert!(close(eff.peak(), PI.sqrt() / 2.0, 1e-15));
        assert!(close(eff.at(9.0), PI.sqrt() / 2.0, 1e-15));
        assert!(close(eff.area(), FRAC_PI_2, 1e-15));
        let p13 = step2_pair(1.0).get(Transition::T13).unwrap().area();
        assert!(close(eff.area(), SQRT_2 * p13, 1e-15));

        let zero = PulseSchedule::new(vec![
            PulseEnvelope::gaussian(Transition::T13, 0.0, 9.0, 1.0, FRAC_PI_2).unwrap(),
            PulseEnvelope::gaussian(Transition::T23, 0.0, 9.0, 1.0, 0.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(effective_rabi(&zero).unwrap().at(9.0), 0.0);
    }

    #[test]
    fn effective_rabi_rejects_mismatch() {
        let s = step2_pair(1.0).map_pulse(Transition::T23, |p| PulseEnvelope { amplitude: p.amplitude * 1.01, ..p }).unwrap();
        assert!(matches!(effective_rabi(&s), Err(Error::CptConditionViolated(_))));
        let s = step2_pair(1.0).map_pulse(Transition::T23, |p| PulseEnvelope { width: 1.1, ..p }).unwrap();
        assert!(matches!(effective_rabi(&s), Err(Error::CptConditionViolated(_))));
        let only = PulseSchedule::new(vec![*step2_pair(1.0).get(Transition::T13).unwrap()]).unwrap();
        assert!(matches!(effective_rabi(&only), Err(Error::MissingTransition(Transition::T23))));
    }

    fn sign() -> impl Strategy<Value = i8> {
        prop_oneof![Just(1i8), Just(-1i8)]
    }

    proptest! {
        #[test]
        fn sign_map_is_an_involution(s12 in sign(), s13 in sign(), s23 in sign(), t in 0.0f64..12.0, phase in -PI..PI) {
            let signs = ChiralitySignMap::new(s12, s13, s23).unwrap();
            let sched = PulseSchedule::new(vec![
                PulseEnvelope::gaussian(Transition::T12, 0.4, 3.0, 1.0, phase).unwrap(),
                PulseEnvelope::gaussian(Transition::T13, 0.6, 9.0, 1.0, phase + 1.0).unwrap(),
                PulseEnvelope::rectangular(Transition::T23, 0.6, 9.0, 1.0, 0.0).unwrap(),
            ]).unwrap();
            let once = sched.apply_sign_map(&signs);
            let twice = once.apply_sign_map(&signs);
            prop_assert_eq!(twice, sched.apply_sign_map(&ChiralitySignMap::LEFT));
            for tr in Transition::ALL {
                prop_assert_eq!(twice.rabi_at(tr, t), sched.rabi_at(tr, t));
                prop_assert_eq!(once.rabi_at(tr, t).norm(), sched.rabi_at(tr, t).norm());
            }
        }
    }
}
