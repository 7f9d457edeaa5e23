//! `magspec` command-line front end.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{Command, Grid, RunConfig};
use magspec::fem::BoundaryCondition;
use output::{Artifacts, Failure};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "magspec", version, about = "Magnetic Laplacian eigenvalues, torsion and shape inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Omit the timestamp line from artifacts.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lowest eigenvalues at one field or along a grid.
    Solve(Common),
    /// Torsion function and rigidity.
    Torsion(Common),
    /// Registered inequality checks.
    Bounds(Common),
    /// Reverse Faber–Krahn evidence scan against the disc of equal area.
    Scan(Common),
    /// Disc eigenvalues from the radial fiber solver.
    Disc(Common),
    /// de Gennes constants.
    Degennes(Common),
    /// Mesh statistics and geometry summary.
    MeshReport(Common),
    /// Runs a TOML run configuration.
    Run {
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Domain file (TOML or JSON).
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Inline preset, e.g. `ellipse:a=2`.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long = "B", alias = "b")]
    b: Option<f64>,
    /// start:stop:count[:linear|log]
    #[arg(long = "B-grid", alias = "b-grid", value_parser = Grid::parse)]
    b_grid: Option<Grid>,
    #[arg(long)]
    mesh_h: Option<f64>,
    /// Number of eigenvalues.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    bc: Option<BoundaryCondition>,
    /// Disc radius for `disc`.
    #[arg(long)]
    radius: Option<f64>,
    /// Comma-separated check names for `bounds`.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; stdout only when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Common {
    fn into_config(self, command: Command) -> RunConfig {
        RunConfig {
            command,
            domain: self.domain,
            preset: self.preset,
            b: self.b,
            b_grid: self.b_grid,
            mesh_h: self.mesh_h.unwrap_or(0.05),
            n: self.n.unwrap_or(1),
            bc: self.bc,
            radius: self.radius,
            checks: self.checks,
            seed: self.seed.unwrap_or(0x5eed),
            output: self.output,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.command {
        Cmd::Solve(c) => Ok(c.into_config(Command::Solve)),
        Cmd::Torsion(c) => Ok(c.into_config(Command::Torsion)),
        Cmd::Bounds(c) => Ok(c.into_config(Command::Bounds)),
        Cmd::Scan(c) => Ok(c.into_config(Command::Scan)),
        Cmd::Disc(c) => Ok(c.into_config(Command::Disc)),
        Cmd::Degennes(c) => Ok(c.into_config(Command::Degennes)),
        Cmd::MeshReport(c) => Ok(c.into_config(Command::MeshReport)),
        Cmd::Run { config, output } => std::fs::read_to_string(&config)
            .map_err(|e| format!("cannot read {}: {e}", config.display()))
            .and_then(|t| RunConfig::from_toml(&t))
            .map(|mut c| {
                if output.is_some() {
                    c.output = output;
                }
                c
            }),
    };
    let cfg = match cfg.and_then(|c| c.validate().map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("config error: key 'threads': must be at least 1");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let art = Artifacts::new(&cfg, !cli.no_timestamp);
    match output::run(&cfg, &art) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver error: {e}");
            ExitCode::from(1)
        }
    }
}
