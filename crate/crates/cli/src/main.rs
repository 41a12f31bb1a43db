use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fractalis_cli::config::Mode;
use fractalis_cli::{run, Overrides};

/// Fractal interpolation curves and surfaces, and their box-counting dimension.
#[derive(Parser)]
#[command(name = "fractalis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refine the attractor and write curve.csv and curve_report.json.
    Curve(RunArgs),
    /// Evaluate a composed surface and write surface.pgm, surface.obj and surface_report.json.
    Surface(RunArgs),
    /// Predict and measure the curve's dimension; writes dimension_report.json and box_counts.csv.
    Analyze(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the config.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Refinement depth, overriding the config.
    #[arg(long)]
    depth: Option<u32>,
    /// Surface grid resolution, overriding the config.
    #[arg(long)]
    resolution: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Curve(a) => (Mode::Curve, a),
        Command::Surface(a) => (Mode::Surface, a),
        Command::Analyze(a) => (Mode::Analyze, a),
    };
    let overrides = Overrides {
        out_dir: args.out_dir,
        depth: args.depth,
        resolution: args.resolution,
    };
    match run(mode, &args.config, &overrides) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fractalis: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
