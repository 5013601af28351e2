use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lbb_lab::fem::ElementPair;
use lbb_lab::mesh::Pattern;
use lbb_lab::study::{
    cmd_constants, cmd_eps_sweep, cmd_fortin_study, StudyConfig, TestField, DEFAULT_EPS, DEFAULT_SEED,
};

/// Discrete inf-sup studies on the unit square, written as CSV.
#[derive(Parser)]
#[command(name = "lbb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// LBB, GLBB, inverse-inequality and fitted constants per level.
    Constants(Common),
    /// Weighted inf-sup constant over an eps grid.
    EpsSweep {
        #[command(flatten)]
        common: Common,
        /// Also evaluate at eps = 1e-6 and 1e3 with the limiting constants.
        #[arg(long)]
        limits: bool,
    },
    /// L2 and H1 Fortin projections of the selected test fields.
    Fortin(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_delimiter = ',', default_value = "taylor_hood,mini,p1p1")]
    elements: Vec<ElementPair>,
    #[arg(long, default_value = "diagonal")]
    pattern: Pattern,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
    levels: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// v_star, w_star, interpolant
    #[arg(long, value_delimiter = ',', default_value = "v_star")]
    fields: Vec<TestField>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl Common {
    fn config(&self, limit_probes: bool) -> StudyConfig {
        StudyConfig {
            elements: self.elements.clone(),
            pattern: self.pattern,
            levels: self.levels.clone(),
            eps_grid: self.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec()),
            limit_probes,
            fields: self.fields.clone(),
            seed: self.seed,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, config) = match &cli.command {
        Command::Constants(c) | Command::Fortin(c) => (c, c.config(false)),
        Command::EpsSweep { common, limits } => (common, common.config(*limits)),
    };
    if let Err(msg) = config.validate() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let table = match cli.command {
        Command::Constants(_) => cmd_constants(&config),
        Command::EpsSweep { .. } => cmd_eps_sweep(&config),
        Command::Fortin(_) => cmd_fortin_study(&config),
    };
    let csv = table.to_csv();
    let written = match &common.out {
        Some(path) => fs::write(path, csv),
        None => io::stdout().lock().write_all(csv.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    if table.failed {
        eprintln!("error: at least one computation failed; see the status column");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
