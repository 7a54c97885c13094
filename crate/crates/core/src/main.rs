use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cqdsim::harness::io::{render_adiabaticity_profile, render_analytic_curve};
use cqdsim::harness::{
    emit_results, load_reference, load_results, parse_currents, r_squared, run_sweep, SweepConfig,
};
use cqdsim::{Error, PhysicalConstants};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Monte Carlo and closed-form spin-flip fractions for the three-stage
/// Stern–Gerlach experiment under co-quantum dynamics.
#[derive(Parser)]
#[command(name = "cqdsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo sweep and write a results file.
    Simulate(SimulateArgs),
    /// Write the closed-form flip probability over a current grid.
    Analytic(CurveArgs),
    /// Write adiabaticity profiles k(t) along the beam path.
    Adiabaticity(AdiabaticityArgs),
    /// Score a results file against reference data.
    Compare(CompareArgs),
}

#[derive(Args)]
struct Common {
    /// TOML file mirroring the sweep configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated currents in A, or start:stop:points for a log grid.
    #[arg(long)]
    currents: Option<String>,
    /// Output file; defaults to the configured path (simulate) or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    atoms: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Reference data; without --currents the sweep runs at its currents.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct AdiabaticityArgs {
    #[command(flatten)]
    common: Common,
    /// Samples per current across the chamber.
    #[arg(long, default_value_t = 2001)]
    points: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// Results file written by `simulate`.
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Integration { .. } | Error::Singularity { .. } => EXIT_NUMERICAL,
                _ => EXIT_INPUT,
            })
        }
    }
}

fn base_config(common: &Common) -> cqdsim::Result<SweepConfig> {
    let mut config = match &common.config {
        Some(path) => SweepConfig::from_file(path)?,
        None => SweepConfig::default(),
    };
    if let Some(spec) = &common.currents {
        config.currents = parse_currents(spec)?;
    }
    Ok(config)
}

fn write_or_print(out: Option<&Path>, text: &str) -> cqdsim::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> cqdsim::Result<ExitCode> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Analytic(args) => {
            let config = base_config(&args.common)?;
            config.validate()?;
            let text = render_analytic_curve(&config.currents, &config.geometry)?;
            write_or_print(args.common.out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Adiabaticity(args) => {
            let config = base_config(&args.common)?;
            config.validate()?;
            let text = render_adiabaticity_profile(
                &config.currents,
                &config.geometry,
                &PhysicalConstants::potassium39(),
                args.points,
            )?;
            write_or_print(args.common.out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(args) => {
            let results = load_results(&args.results)?;
            let data = load_reference(&args.reference)?;
            let num: Vec<(f64, f64)> = results.rows.iter().map(|r| (r.current, r.w_num)).collect();
            let ana: Vec<(f64, f64)> = results.rows.iter().map(|r| (r.current, r.w_ana)).collect();
            let report = format!(
                "points = {}\nr_squared_num = {:.6}\nr_squared_ana = {:.6}\n",
                data.rows.len(),
                r_squared(&num, &data)?,
                r_squared(&ana, &data)?
            );
            write_or_print(args.out.as_deref(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn simulate(args: SimulateArgs) -> cqdsim::Result<ExitCode> {
    let mut config = base_config(&args.common)?;
    let reference = args.reference.as_deref().map(load_reference).transpose()?;
    if let (Some(data), None) = (&reference, &args.common.currents) {
        let mut currents = data.currents();
        currents.sort_by(f64::total_cmp);
        config.currents = currents;
    }
    if let Some(n) = args.atoms {
        config.atoms_per_current = n;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(tol) = args.rel_tol {
        config.ode.rel_tol = tol;
    }
    if let Some(tol) = args.abs_tol {
        config.ode.abs_tol = tol;
    }
    if let Some(out) = args.common.out {
        config.output_path = out;
    }
    config.validate()?;

    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut result = run_sweep(&config, workers)?;
    if let Some(data) = &reference {
        if !result.any_failed() {
            let r2 = result.attach_reference(data)?;
            eprintln!(
                "r_squared_num = {:.6}, r_squared_ana = {:.6}",
                r2.numerical, r2.analytic
            );
        }
    }
    emit_results(&result, &config.output_path)?;
    log::info!(
        "wrote {} in {:.1} s",
        config.output_path.display(),
        result.wall_time.as_secs_f64()
    );
    if result.any_failed() {
        for row in result.rows.iter().filter(|r| r.failed()) {
            eprintln!(
                "error: {} A: {} of {} atoms failed",
                row.current, row.failures, row.requested
            );
        }
        return Ok(ExitCode::from(EXIT_NUMERICAL));
    }
    Ok(ExitCode::SUCCESS)
}
