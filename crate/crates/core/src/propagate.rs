//! Fixed-step integration of `i dψ/dt = H(t) ψ`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{step_unitary, HamiltonianMatrix};
use crate::pulse::{ChiralitySignMap, PulseSchedule, SignedSchedule};
use crate::state::QuantumState;
use crate::C64;

/// Drift of |ψ|² beyond which a run is aborted.
pub const NORM_ABORT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical Runge–Kutta 4.
    FourthOrderFixedStep,
    /// `exp(−i·H(t_mid)·dt)` per step; unitary to rounding.
    PiecewiseConstantExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
    /// Record every `record_stride`-th step (the end point is always recorded).
    pub record_stride: usize,
}

impl PropagationConfig {
    /// `[0, 12]` at `dt = 1e-3`, exponential stepping, every step recorded.
    pub fn standard() -> Self {
        PropagationConfig {
            t_start: 0.0,
            t_end: 12.0,
            dt: 1e-3,
            method: Method::PiecewiseConstantExponential,
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.dt.is_finite()) {
            return Err(Error::InvalidWindow("times must be finite".into()));
        }
        if self.t_end <= self.t_start {
            return Err(Error::InvalidWindow(format!("t_end {} must exceed t_start {}", self.t_end, self.t_start)));
        }
        if self.dt <= 0.0 {
            return Err(Error::InvalidWindow(format!("dt {} must be positive", self.dt)));
        }
        if (self.t_end - self.t_start) / self.dt < 1.0 {
            return Err(Error::InvalidWindow("window shorter than one step".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidWindow("record_stride must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps; `dt` is shrunk slightly if it does not divide the window.
    pub fn steps(&self) -> usize {
        let ratio = (self.t_end - self.t_start) / self.dt;
        // Tolerate rounding in ratios like 12 / 1e-3.
        (ratio - 1e-9 * ratio.max(1.0)).ceil().max(1.0) as usize
    }

    pub fn step_size(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub populations: [f64; 3],
}

/// One molecule's recorded populations and final amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub samples: Vec<Sample>,
    pub final_state: QuantumState,
}

impl Evolution {
    pub fn final_populations(&self) -> [f64; 3] {
        self.final_state.populations()
    }
}

pub fn propagate(
    initial: &QuantumState,
    schedule: &PulseSchedule,
    signs: &ChiralitySignMap,
    cfg: &PropagationConfig,
) -> Result<Evolution> {
    propagate_signed(initial, &schedule.apply_sign_map(signs), cfg)
}

pub fn propagate_signed(initial: &QuantumState, schedule: &SignedSchedule, cfg: &PropagationConfig) -> Result<Evolution> {
    cfg.validate()?;
    let n = cfg.steps();
    let h = cfg.step_size();
    let time = |k: usize| cfg.t_start + k as f64 * h;

    let mut psi = *initial.amplitudes();
    let mut samples = Vec::with_capacity(n / cfg.record_stride + 2);
    samples.push(Sample { t: cfg.t_start, populations: initial.populations() });

    for k in 0..n {
        let t = time(k);
        psi = match cfg.method {
            Method::PiecewiseConstantExponential => {
                let hm = HamiltonianMatrix::at(schedule, t + 0.5 * h);
                step_unitary(&hm, h) * psi
            }
            Method::FourthOrderFixedStep => rk4_step(schedule, t, h, &psi),
        };
        let t_next = time(k + 1);
        let drift = (psi.norm_squared() - 1.0).abs();
        if !(drift <= NORM_ABORT) {
            return Err(Error::NormDrift { t: t_next, drift });
        }
        if (k + 1) % cfg.record_stride == 0 || k + 1 == n {
            let state = QuantumState::from_vector_unchecked(psi);
            samples.push(Sample { t: t_next, populations: state.populations() });
        }
    }

    Ok(Evolution { samples, final_state: QuantumState::from_vector_unchecked(psi) })
}

fn rk4_step(schedule: &SignedSchedule, t: f64, h: f64, psi: &Vector3<C64>) -> Vector3<C64> {
    let minus_i = C64::new(0.0, -1.0);
    let f = |t: f64, v: &Vector3<C64>| HamiltonianMatrix::at(schedule, t).apply(v) * minus_i;
    let k1 = f(t, psi);
    let k2 = f(t + 0.5 * h, &(psi + k1 * C64::from(0.5 * h)));
    let k3 = f(t + 0.5 * h, &(psi + k2 * C64::from(0.5 * h)));
    let k4 = f(t + h, &(psi + k3 * C64::from(h)));
    psi + (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(h / 6.0)
}

/// Populations of both enantiomers on a shared time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTrace {
    /// `(t, [p₁ᴸ, p₂ᴸ, p₃ᴸ, p₁ᴿ, p₂ᴿ, p₃ᴿ])`.
    pub rows: Vec<(f64, [f64; 6])>,
}

impl PopulationTrace {
    pub fn combine(left: &Evolution, right: &Evolution) -> Self {
        assert_eq!(left.samples.len(), right.samples.len(), "traces recorded on different grids");
        let rows = left
            .samples
            .iter()
            .zip(&right.samples)
            .map(|(l, r)| {
                debug_assert_eq!(l.t, r.t);
                let [a, b, c] = l.populations;
                let [d, e, f] = r.populations;
                (l.t, [a, b, c, d, e, f])
            })
            .collect();
        PopulationTrace { rows }
    }

    /// A single row, for engines that only produce end-point populations.
    pub fn final_only(t: f64, left: [f64; 3], right: [f64; 3]) -> Self {
        let [a, b, c] = left;
        let [d, e, f] = right;
        PopulationTrace { rows: vec![(t, [a, b, c, d, e, f])] }
    }
}
