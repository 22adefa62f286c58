use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cimsr_cli::{load_config, run_experiment, CliError, ExperimentKind, ExperimentSpec, Mode};

#[derive(Parser, Debug)]
#[command(name = "cimsr", version, about = "Cooperative chaos-link experiments: simulation and theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment (Monte-Carlo and theory).
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Theory only; skips every simulation.
    Theory {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Parse and check a configuration, then print it with defaults applied.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// RNG seed (overrides sim.seed)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Monte-Carlo worker threads (overrides sim.workers)
    #[arg(long)]
    workers: Option<usize>,
    /// Frame cap per point (overrides sim.max_frames)
    #[arg(long)]
    max_frames: Option<u64>,
    /// Error target per point (overrides sim.min_errors)
    #[arg(long)]
    min_errors: Option<u64>,
}

impl Overrides {
    fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(d) = &self.out_dir {
            spec.out_dir = d.clone();
        }
        if let Some(w) = self.workers {
            spec.workers = Some(w);
        }
        if let Some(m) = self.max_frames {
            spec.stop.max_frames = m;
        }
        if let Some(m) = self.min_errors {
            spec.stop.min_errors = m;
        }
    }
}

fn load(config: &Path, overrides: &Overrides) -> Result<ExperimentSpec, CliError> {
    let mut spec = load_config(config)?;
    overrides.apply(&mut spec);
    spec.validate()?;
    Ok(spec)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (config, overrides, mode) = match &cli.command {
        Command::Validate { config, overrides } => {
            let spec = load(config, overrides)?;
            print!("{}", spec.render());
            return Ok(());
        }
        Command::Run { config, overrides } => (config, overrides, Mode::Full),
        Command::Theory { config, overrides } => (config, overrides, Mode::TheoryOnly),
    };
    let spec = load(config, overrides)?;
    let out = run_experiment(&spec, mode)?;
    if spec.kind == ExperimentKind::SimTheoryCompare {
        for row in &out.rows {
            if let Some(z) = row.z_score() {
                println!("{} m_c={} x={} z={z:.2}", row.system, row.m_c, row.x);
            }
        }
    }
    println!("wrote {} rows to {}", out.rows.len(), out.csv.display());
    println!("wrote {}", out.svg.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
