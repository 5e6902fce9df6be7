use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gcem::io::{benchmark_config, parse_config_with, run_config, GeneratorSpec, RunConfig, RunOptions, BENCHMARKS};
use gcem::mesh::write_mesh;

#[derive(Parser)]
#[command(name = "gcem", version, about = "Quasi-brittle fracture with global cracking elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for result files (overrides output.directory).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Write a VTK snapshot every N steps; 0 disables snapshots.
    #[arg(long, global = true, value_name = "N")]
    vtk_every: Option<usize>,
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Displacement magnification of the VTK geometry.
    #[arg(long, global = true, value_name = "FACTOR")]
    deform_scale: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML config document.
    Run {
        config: PathBuf,
        /// Override a config key, e.g. `--set load.steps=20`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run a built-in benchmark.
    Bench {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(BENCHMARKS))]
        name: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Generate a mesh, e.g. `l-panel:h=20` or `disk:layout=double,alpha=30,h=4`.
    Mesh {
        spec: GeneratorSpec,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_target(false)
        .init();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> gcem::Result<bool> {
    let options = RunOptions {
        output_dir: cli.output_dir,
        vtk_every: cli.vtk_every,
        deform_scale: cli.deform_scale,
    };
    match cli.command {
        Command::Run { config, set } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| gcem::Error::Config(format!("cannot read {}: {e}", config.display())))?;
            let cfg = parse_config_with(&text, &set)?;
            let base = config.parent().unwrap_or(Path::new("."));
            simulate(cfg, base, &options)
        }
        Command::Bench { name, set } => simulate(benchmark_config(&name, &set)?, Path::new("."), &options),
        Command::Mesh { spec, output } => {
            let (mesh, bc) = spec.mesh.build(spec.seed, Path::new("."))?;
            std::fs::write(&output, write_mesh(&mesh, &bc))?;
            log::info!(
                "wrote {} ({} elements, {} nodes)",
                output.display(),
                mesh.element_count(),
                mesh.node_count()
            );
            Ok(true)
        }
    }
}

fn simulate(mut cfg: RunConfig, base: &Path, options: &RunOptions) -> gcem::Result<bool> {
    options.apply(&mut cfg);
    let outcome = run_config(&cfg, base, |solver, rec| {
        log::info!(
            "step {:>4}  d = {:.4e} mm  F = {:.4e} kN/mm  iterations {:>4}  new cracks {}  cracked {}",
            rec.step,
            rec.d,
            rec.reaction / 1000.0,
            rec.iterations,
            rec.new_cracks.len(),
            solver.cracked().iter().filter(|c| **c).count()
        );
    })?;
    let s = &outcome.summary;
    if let Some(p) = &s.peak {
        log::info!("peak {:.4e} kN/mm at d = {:.4e} mm (step {})", p.force_kn_per_mm, p.d_mm, p.step);
    }
    if let Some(r) = s.normalized_peak {
        log::info!("peak over the intact splitting load: {r:.4}");
    }
    log::info!("results in {}", outcome.output_dir.display());
    if let Some(f) = &s.failure {
        log::error!("run stopped after {} steps: {f}", s.steps_completed);
    }
    Ok(outcome.succeeded())
}
