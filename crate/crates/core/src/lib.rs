//! Simulation and analysis of two-step coherent pulse enantioseparation.
//!
//! A chiral molecule is modelled as a resonant three-level system with
//! cyclic (Δ-type) couplings. The two enantiomers see the same fields except
//! for a sign flip on one transition. A π/2 pulse on 1↔2 prepares both
//! enantiomers in `(|1⟩ − i|2⟩)/√2`; two simultaneous pulses on 1↔3 and 2↔3
//! then leave one enantiomer trapped in that dark state while rotating the
//! other into `|3⟩`, where it can be ionized.
//!
//! Units: ħ = 1, times in τ (the Gaussian pulse width), Rabi frequencies in
//! 1/τ. Couplings enter the Hamiltonian as `Ω_ij |j⟩⟨i| + h.c.` without a
//! factor ½, so a π/2 pulse has area π/4.
//!
//! Layout:
//! - [`state`], [`hamiltonian`], [`propagate`]: state vectors, Hamiltonian
//!   assembly and unitary time stepping.
//! - [`pulse`]: envelopes, schedules and the enantiomer sign map.
//! - [`analytic`]: closed-form evolutions and second-order population
//!   formulas used as oracles.
//! - [`protocol`], [`separation`], [`sweep`]: the two-step protocol,
//!   ionization metrics and imperfection sweeps.
//! - [`scenario`], [`presets`]: JSON scenario files and CSV/JSON emission.

pub mod analytic;
pub mod error;
pub mod hamiltonian;
pub mod presets;
pub mod propagate;
pub mod protocol;
pub mod pulse;
pub mod scenario;
pub mod separation;
pub mod state;
pub mod sweep;

pub use num_complex::Complex64 as C64;

pub use analytic::{BrightDarkDecomposition, FinalPopulations, ImperfectionParams};
pub use error::{Error, Result};
pub use hamiltonian::{assemble_hamiltonian, step_unitary, HamiltonianMatrix};
pub use propagate::{propagate, Evolution, Method, PopulationTrace, PropagationConfig};
pub use protocol::{Protocol, SignConvention};
pub use pulse::{ChiralitySignMap, PulseEnvelope, PulseSchedule, Shape, SignedSchedule, Transition};
pub use separation::{separate, SeparationModel, SeparationReport};
pub use state::{Chirality, LevelSystem, QuantumState};
pub use sweep::{sweep, Engine, SweepAxes, SweepResult};
