//! `chiralsep`: run scenarios and robustness sweeps from JSON configs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chiral_pulse::presets;
use chiral_pulse::scenario::{run_scenario, run_sweep, ScenarioConfig};
use chiral_pulse::{Engine, Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chiralsep", version, about = "Two-step coherent-pulse enantioseparation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate both enantiomers and write trace.csv and summary.json.
    Run(RunArgs),
    /// Evaluate the imperfection grid and write sweep.csv and sweep_summary.json.
    Sweep(RunArgs),
    /// Inspect built-in scenarios.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names.
    List,
    /// Print a preset's JSON.
    Show { name: String },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Use a built-in scenario instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Override the config's engine.
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Print the fully resolved config as JSON and exit without running.
    #[arg(long)]
    dump_effective_config: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Perturbative,
    ExactAlgebraic,
    FullIntegration,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Perturbative => Engine::Perturbative,
            EngineArg::ExactAlgebraic => Engine::ExactAlgebraic,
            EngineArg::FullIntegration => Engine::FullIntegration,
        }
    }
}

impl RunArgs {
    fn effective_config(&self) -> Result<ScenarioConfig> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => ScenarioConfig::from_path(path)?,
            (None, Some(name)) => presets::load(name)?,
            (None, None) => unreachable!("clap requires one of config/--preset"),
        };
        if let Some(engine) = self.engine {
            config.engine = engine.into();
        }
        Ok(config)
    }
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(args: &RunArgs, sweep: bool) -> Result<()> {
    let config = args.effective_config()?;
    if args.dump_effective_config {
        // Validate first so a dumped config is always runnable.
        config.validate()?;
        println!("{}", config.to_json());
        return Ok(());
    }
    let out_dir: &Path = &args.out_dir;
    if sweep {
        let (result, files) = run_sweep(&config, out_dir)?;
        eprintln!("{} grid points ({:?})", result.points.len(), result.engine);
        print_files(&files);
    } else {
        let (output, files) = run_scenario(&config, out_dir)?;
        for w in &output.summary.warnings {
            eprintln!("warning: {w}");
        }
        print_files(&files);
    }
    Ok(())
}

fn presets_cmd(action: &PresetAction) -> Result<()> {
    match action {
        PresetAction::List => {
            for name in presets::names() {
                let description = presets::load(name)?.description.unwrap_or_default();
                println!("{name}\t{description}");
            }
        }
        PresetAction::Show { name } => {
            let text = presets::source(name)
                .ok_or_else(|| Error::Config { field: "preset".into(), message: format!("unknown preset `{name}`") })?;
            print!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors exit 1 like any other bad input; 2 is reserved for
    // numerical failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => run(args, false),
        Command::Sweep(args) => run(args, true),
        Command::Presets { action } => presets_cmd(action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
