use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use duplexnet::config::{Engine, ExperimentSpec, JobKind};
use duplexnet::csvio::{write_rows, write_rows_to_path};
use duplexnet::presets::{preset, NAMES};
use duplexnet::{run, Pool, RunError};

/// Outage and throughput of full-duplex cellular networks with sectorized
/// antennas. Every flag can also be set through a `DUPLEXNET_*` variable.
#[derive(Debug, Parser)]
#[command(name = "duplexnet", version, about)]
struct Cli {
    /// TOML experiment file (see configs/schema.toml).
    #[arg(long, env = "DUPLEXNET_CONFIG", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named figure preset, or `validate` for the acceptance suite.
    #[arg(long, env = "DUPLEXNET_PRESET")]
    preset: Option<String>,
    #[arg(long, value_enum, env = "DUPLEXNET_ENGINE")]
    engine: Option<Engine>,
    #[arg(long, env = "DUPLEXNET_SEED")]
    seed: Option<u64>,
    /// Monte Carlo realizations per grid point.
    #[arg(long, env = "DUPLEXNET_REALIZATIONS")]
    realizations: Option<u64>,
    /// CSV destination; standard output when absent.
    #[arg(long, env = "DUPLEXNET_OUT")]
    out: Option<PathBuf>,
    /// Worker threads; one per core when absent.
    #[arg(long, env = "DUPLEXNET_WORKERS")]
    workers: Option<usize>,
    /// Print the preset names and exit.
    #[arg(long)]
    list_presets: bool,
}

fn load(cli: &Cli) -> Result<ExperimentSpec, RunError> {
    let mut spec = match (&cli.config, &cli.preset) {
        (Some(path), _) => ExperimentSpec::load(path)?,
        (None, Some(name)) => {
            let mut s = preset(name)?;
            s.job.preset = Some(name.clone());
            s
        }
        (None, None) => return Err(RunError::config("pass --config PATH or --preset NAME")),
    };
    if let Some(e) = cli.engine {
        spec.job.engine = e;
    }
    if let Some(s) = cli.seed {
        spec.job.seed = s;
    }
    if let Some(n) = cli.realizations {
        spec.job.realizations = n;
    }
    if let Some(o) = &cli.out {
        spec.job.output = Some(o.clone());
    }
    if let Some(w) = cli.workers {
        spec.job.workers = Some(w);
    }
    Ok(spec)
}

fn execute(cli: &Cli) -> Result<(), RunError> {
    let spec = load(cli)?;
    let pool = Pool::new(spec.job.workers)?;
    let out = run(&spec, &pool)?;
    match &spec.job.output {
        Some(path) => write_rows_to_path(path, &out.rows)
            .map_err(|e| RunError::config(format!("cannot write {}: {e}", path.display())))?,
        None if spec.job.kind != JobKind::Validate => {
            write_rows(std::io::stdout().lock(), &out.rows).map_err(|e| RunError::config(e.to_string()))?
        }
        None => {}
    }
    if let Some(report) = &out.report {
        print!("{}", report.table());
        let _ = std::io::stdout().flush();
        if !report.passed() {
            let failed: Vec<String> = report
                .outcomes
                .iter()
                .filter(|o| !o.passed)
                .map(|o| o.id.to_string())
                .collect();
            return Err(RunError::Validation(format!("criteria {}", failed.join(", "))));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_presets {
        for name in NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("duplexnet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
