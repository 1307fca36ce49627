//! Grid sweeps over `(Δ, Δ′, δφ)`.
//!
//! Points are independent. With the `parallel` feature they are evaluated on
//! a rayon pool (size overridable through `CHIRALSEP_WORKERS`); results are
//! always returned in lexicographic grid order.

use serde::{Deserialize, Serialize};

use crate::analytic::{exact_populations, perturbative_populations, FinalPopulations, ImperfectionParams};
use crate::error::{Error, Result};
use crate::protocol::Protocol;
use crate::separation::{SeparationModel, SeparationReport};

/// Environment variable overriding the sweep worker count.
pub const WORKERS_ENV: &str = "CHIRALSEP_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Second-order population formulas.
    Perturbative,
    /// Closed-form final state of the imperfect protocol.
    ExactAlgebraic,
    /// Numerical propagation of the perturbed schedule.
    FullIntegration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    pub delta: Vec<f64>,
    pub delta_prime: Vec<f64>,
    pub delta_phi: Vec<f64>,
}

impl SweepAxes {
    pub fn single(params: ImperfectionParams) -> Self {
        SweepAxes { delta: vec![params.delta], delta_prime: vec![params.delta_prime], delta_phi: vec![params.delta_phi] }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("delta", &self.delta), ("delta_prime", &self.delta_prime), ("delta_phi", &self.delta_phi)] {
            if axis.is_empty() {
                return Err(Error::InvalidGrid(format!("axis `{name}` is empty")));
            }
            if axis.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidGrid(format!("axis `{name}` has a non-finite value")));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGrid(format!("axis `{name}` is not strictly increasing")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.delta.len() * self.delta_prime.len() * self.delta_phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points with `delta` varying slowest and `delta_phi` fastest.
    pub fn points(&self) -> Vec<ImperfectionParams> {
        let mut out = Vec::with_capacity(self.len());
        for &d in &self.delta {
            for &dp in &self.delta_prime {
                for &phi in &self.delta_phi {
                    out.push(ImperfectionParams::new(d, dp, phi));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub params: ImperfectionParams,
    pub populations: FinalPopulations,
    pub report: SeparationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: SweepAxes,
    pub engine: Engine,
    pub points: Vec<SweepPoint>,
}

/// Final populations at one grid point.
pub fn evaluate(engine: Engine, protocol: &Protocol, params: &ImperfectionParams) -> Result<FinalPopulations> {
    match engine {
        Engine::Perturbative => protocol.orient(perturbative_populations(params)),
        Engine::ExactAlgebraic => protocol.orient(exact_populations(params)),
        Engine::FullIntegration => protocol.with_schedule(protocol.perturbed_schedule(params)?).final_populations(),
    }
}

fn evaluate_point(
    engine: Engine,
    protocol: &Protocol,
    model: &SeparationModel,
    params: ImperfectionParams,
) -> Result<SweepPoint> {
    let at = |source: Error| Error::SweepPoint {
        delta: params.delta,
        delta_prime: params.delta_prime,
        delta_phi: params.delta_phi,
        source: Box::new(source),
    };
    let populations = evaluate(engine, protocol, &params).map_err(at)?;
    let report = model.separate(populations.left, populations.right).map_err(at)?;
    Ok(SweepPoint { params, populations, report })
}

fn check(axes: &SweepAxes, engine: Engine, protocol: &Protocol, model: &SeparationModel) -> Result<()> {
    axes.validate()?;
    model.validate()?;
    if engine != Engine::FullIntegration {
        // Surface a convention error once rather than per point.
        protocol.orient(FinalPopulations { left: [1.0, 0.0, 0.0], right: [1.0, 0.0, 0.0] })?;
    }
    Ok(())
}

/// Evaluates every point on the calling thread.
pub fn sweep_sequential(
    axes: &SweepAxes,
    engine: Engine,
    protocol: &Protocol,
    model: &SeparationModel,
) -> Result<SweepResult> {
    check(axes, engine, protocol, model)?;
    let points = axes
        .points()
        .into_iter()
        .map(|p| evaluate_point(engine, protocol, model, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { axes: axes.clone(), engine, points })
}

/// Evaluates points on a rayon pool.
#[cfg(feature = "parallel")]
pub fn sweep_parallel(
    axes: &SweepAxes,
    engine: Engine,
    protocol: &Protocol,
    model: &SeparationModel,
) -> Result<SweepResult> {
    use rayon::prelude::*;

    check(axes, engine, protocol, model)?;
    let grid = axes.points();
    let run = || {
        grid.par_iter()
            .map(|p| evaluate_point(engine, protocol, model, *p))
            .collect::<Result<Vec<_>>>()
    };
    let points = match worker_override() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(WORKERS_ENV, e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    Ok(SweepResult { axes: axes.clone(), engine, points })
}

#[cfg(feature = "parallel")]
fn worker_override() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Parallel when the `parallel` feature is enabled, sequential otherwise.
pub fn sweep(axes: &SweepAxes, engine: Engine, protocol: &Protocol, model: &SeparationModel) -> Result<SweepResult> {
    #[cfg(feature = "parallel")]
    {
        sweep_parallel(axes, engine, protocol, model)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_sequential(axes, engine, protocol, model)
    }
}
