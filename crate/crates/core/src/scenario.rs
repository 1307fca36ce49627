//! JSON scenario files and the CSV/JSON outputs of a run or sweep.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::analytic::{exact_populations, perturbative_populations, FinalPopulations, ImperfectionParams};
use crate::error::{Error, Result};
use crate::propagate::{Method, PopulationTrace, PropagationConfig};
use crate::protocol::{Protocol, SignConvention};
use crate::pulse::{effective_rabi, PulseEnvelope, PulseSchedule, Transition};
use crate::separation::{SeparationModel, SeparationReport};
use crate::state::{LevelSystem, QuantumState};
use crate::sweep::{sweep, Engine, SweepAxes, SweepResult};
use crate::C64;

pub const TRACE_HEADER: &str = "t,p1_L,p2_L,p3_L,p1_R,p2_R,p3_R";
pub const SWEEP_HEADER: &str = "delta,delta_prime,delta_phi,p1_L,p2_L,p3_L,p1_R,p2_R,p3_R,ee_retained,ee_ionized";

pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_SUMMARY_FILE: &str = "sweep_summary.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Tau,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub record_stride: usize,
}

/// Complex amplitudes as `[re, im]` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStates {
    pub left: [[f64; 2]; 3],
    pub right: [[f64; 2]; 3],
}

impl InitialStates {
    pub fn ground() -> Self {
        let g = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]];
        InitialStates { left: g, right: g }
    }
}

fn default_efficiency() -> f64 {
    1.0
}

/// On-disk scenario description. Every pulse parameter is explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub time_unit: TimeUnit,
    pub window: Window,
    pub method: Method,
    pub pulses: Vec<PulseEnvelope>,
    pub sign_convention: SignConvention,
    pub initial_state: InitialStates,
    pub engine: Engine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imperfections: Option<ImperfectionParams>,
    pub mixture_ratio: f64,
    #[serde(default = "default_efficiency")]
    pub ionization_efficiency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<LevelSystem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxes>,
}

/// A validated scenario ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub protocol: Protocol,
    pub engine: Engine,
    pub imperfections: Option<ImperfectionParams>,
    pub model: SeparationModel,
    pub sweep: Option<SweepAxes>,
}

fn parse_state(field: &str, amps: &[[f64; 2]; 3]) -> Result<QuantumState> {
    let v = Vector3::new(
        C64::new(amps[0][0], amps[0][1]),
        C64::new(amps[1][0], amps[1][1]),
        C64::new(amps[2][0], amps[2][1]),
    );
    QuantumState::from_vector(v).map_err(|e| Error::config(field, e.to_string()))
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field and builds the runnable scenario.
    pub fn validate(&self) -> Result<Scenario> {
        let w = &self.window;
        let propagation = PropagationConfig {
            t_start: w.t_start,
            t_end: w.t_end,
            dt: w.dt,
            method: self.method,
            record_stride: w.record_stride,
        };
        propagation.validate().map_err(|e| Error::config("window", e.to_string()))?;

        for (k, p) in self.pulses.iter().enumerate() {
            if let Err(e) = p.validate() {
                let field = if p.width <= 0.0 {
                    "width"
                } else if p.amplitude < 0.0 {
                    "amplitude"
                } else {
                    "parameters"
                };
                return Err(Error::config(format!("pulses[{k}].{field}"), e.to_string()));
            }
        }
        let schedule = PulseSchedule::new(self.pulses.clone()).map_err(|e| Error::config("pulses", e.to_string()))?;

        if let Some(levels) = &self.levels {
            levels.require_resonant().map_err(|e| Error::config("levels", e.to_string()))?;
        }

        let model = SeparationModel { mixture_ratio: self.mixture_ratio, ionization_efficiency: self.ionization_efficiency };
        model.validate()?;

        if let Some(axes) = &self.sweep {
            axes.validate().map_err(|e| Error::config("sweep", e.to_string()))?;
        }

        let protocol = Protocol {
            schedule,
            propagation,
            convention: self.sign_convention,
            initial_left: parse_state("initial_state.left", &self.initial_state.left)?,
            initial_right: parse_state("initial_state.right", &self.initial_state.right)?,
        };

        if self.engine != Engine::FullIntegration {
            protocol.orient(FinalPopulations { left: [1.0, 0.0, 0.0], right: [1.0, 0.0, 0.0] })?;
            let ground = QuantumState::ground();
            if protocol.initial_left != ground || protocol.initial_right != ground {
                return Err(Error::config("initial_state", "closed-form engines assume both enantiomers start in |1⟩"));
            }
            if self.imperfections.is_none() {
                ImperfectionParams::from_schedule(&protocol.schedule).map_err(|e| Error::config("pulses", e.to_string()))?;
            }
        }

        Ok(Scenario {
            name: self.name.clone(),
            protocol,
            engine: self.engine,
            imperfections: self.imperfections,
            model,
            sweep: self.sweep.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseAreaEntry {
    pub transition: Transition,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub engine: Engine,
    pub final_populations: FinalPopulations,
    pub pulse_areas: Vec<PulseAreaEntry>,
    /// `√2·A₁₃` when the 1-3/2-3 pair forms a bright/dark system.
    pub effective_area: Option<f64>,
    /// Errors relative to the ideal protocol, when the schedule has the two-step form.
    pub imperfections: Option<ImperfectionParams>,
    pub separation: SeparationReport,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub trace: PopulationTrace,
}

impl Scenario {
    /// Schedule actually driven: the configured pulses plus any configured
    /// imperfections layered on top.
    pub fn effective_schedule(&self) -> Result<PulseSchedule> {
        match (&self.imperfections, self.engine) {
            (Some(params), Engine::FullIntegration) => self.protocol.perturbed_schedule(params),
            _ => Ok(self.protocol.schedule.clone()),
        }
    }

    pub fn run(&self) -> Result<RunOutput> {
        let schedule = self.effective_schedule()?;
        let derived = ImperfectionParams::from_schedule(&schedule).ok();
        let params = self.imperfections.or(derived);

        let (populations, trace) = match self.engine {
            Engine::FullIntegration => {
                let (l, r) = self.protocol.with_schedule(schedule.clone()).run()?;
                let pops = FinalPopulations { left: l.final_populations(), right: r.final_populations() };
                (pops, PopulationTrace::combine(&l, &r))
            }
            Engine::ExactAlgebraic | Engine::Perturbative => {
                let params = params.expect("validated: closed-form engines have parameters");
                let canonical = match self.engine {
                    Engine::ExactAlgebraic => exact_populations(&params),
                    _ => perturbative_populations(&params),
                };
                let pops = self.protocol.orient(canonical)?;
                (pops, PopulationTrace::final_only(self.protocol.propagation.t_end, pops.left, pops.right))
            }
        };

        let mut warnings = Vec::new();
        if let Some(p) = params {
            if !p.within_perturbative_range() {
                warnings.push(format!(
                    "imperfections reach {:.3} rad, beyond the {} rad range of the second-order formulas",
                    p.magnitude(),
                    ImperfectionParams::PERTURBATIVE_LIMIT
                ));
            }
        }

        let separation = self.model.separate(populations.left, populations.right)?;
        let summary = RunSummary {
            scenario: self.name.clone(),
            engine: self.engine,
            final_populations: populations,
            pulse_areas: schedule
                .pulses()
                .iter()
                .map(|p| PulseAreaEntry { transition: p.transition, area: p.area() })
                .collect(),
            effective_area: effective_rabi(&schedule).ok().map(|e| e.area()),
            imperfections: params,
            separation,
            warnings,
        };
        Ok(RunOutput { summary, trace })
    }

    pub fn run_sweep(&self) -> Result<SweepResult> {
        let axes = self.sweep.as_ref().ok_or_else(|| Error::config("sweep", "no sweep axes in config"))?;
        sweep(axes, self.engine, &self.protocol, &self.model)
    }
}

fn num(out: &mut String, x: f64) {
    write!(out, "{x:.15e}").unwrap();
}

pub fn trace_csv(trace: &PopulationTrace) -> String {
    let mut out = String::with_capacity(128 * (trace.rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (t, p) in &trace.rows {
        num(&mut out, *t);
        for x in p {
            out.push(',');
            num(&mut out, *x);
        }
        out.push('\n');
    }
    out
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::with_capacity(256 * (result.points.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for pt in &result.points {
        let p = &pt.params;
        for (k, x) in [p.delta, p.delta_prime, p.delta_phi].into_iter().chain(pt.populations.flat()).enumerate() {
            if k > 0 {
                out.push(',');
            }
            num(&mut out, x);
        }
        for ee in [pt.report.enantiomeric_excess_retained, pt.report.enantiomeric_excess_ionized] {
            out.push(',');
            if let Some(x) = ee {
                num(&mut out, x);
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub engine: Engine,
    pub axes: SweepAxes,
    pub points: usize,
    pub min_p3_pumped: f64,
    pub max_p3_trapped: f64,
    pub min_ee_retained: Option<f64>,
}

impl SweepSummary {
    pub fn of(result: &SweepResult, protocol: &Protocol) -> Self {
        let (trapped, pumped) = match protocol.convention.dark() {
            Some(crate::state::Chirality::Right) => (1, 0),
            _ => (0, 1),
        };
        let p3 = |pt: &crate::sweep::SweepPoint, side: usize| pt.populations.flat()[3 * side + 2];
        SweepSummary {
            engine: result.engine,
            axes: result.axes.clone(),
            points: result.points.len(),
            min_p3_pumped: result.points.iter().map(|p| p3(p, pumped)).fold(f64::INFINITY, f64::min),
            max_p3_trapped: result.points.iter().map(|p| p3(p, trapped)).fold(f64::NEG_INFINITY, f64::max),
            min_ee_retained: result
                .points
                .iter()
                .filter_map(|p| p.report.enantiomeric_excess_retained)
                .reduce(f64::min),
        }
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Runs a scenario and writes `trace.csv` and `summary.json` into `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<(RunOutput, Vec<PathBuf>)> {
    let scenario = config.validate()?;
    let output = scenario.run()?;
    std::fs::create_dir_all(out_dir)?;
    let trace_path = out_dir.join(TRACE_FILE);
    let summary_path = out_dir.join(SUMMARY_FILE);
    write_atomic(&trace_path, trace_csv(&output.trace).as_bytes())?;
    let mut json = serde_json::to_string_pretty(&output.summary)?;
    json.push('\n');
    write_atomic(&summary_path, json.as_bytes())?;
    Ok((output, vec![trace_path, summary_path]))
}

/// Runs the sweep described by `config.sweep` and writes `sweep.csv` and
/// `sweep_summary.json` into `out_dir`.
pub fn run_sweep(config: &ScenarioConfig, out_dir: &Path) -> Result<(SweepResult, Vec<PathBuf>)> {
    let scenario = config.validate()?;
    let result = scenario.run_sweep()?;
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(SWEEP_FILE);
    let summary_path = out_dir.join(SWEEP_SUMMARY_FILE);
    write_atomic(&csv_path, sweep_csv(&result).as_bytes())?;
    let mut json = serde_json::to_string_pretty(&SweepSummary::of(&result, &scenario.protocol))?;
    json.push('\n');
    write_atomic(&summary_path, json.as_bytes())?;
    Ok((result, vec![csv_path, summary_path]))
}
