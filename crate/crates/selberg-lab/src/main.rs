use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use selberg_lab::config::{self, ExperimentConfig};
use selberg_lab::experiments::run_experiment;
use selberg_lab::Error;

/// Numerical workbench for central limit theorems of the Riemann zeta
/// function on the critical line.
#[derive(Parser)]
#[command(name = "selberg-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prime-sum asymptotics (Mertens, Chebyshev, power sums).
    Primes(RunArgs),
    /// Closed-form identity suite vs quadrature and series oracles.
    Oracles(RunArgs),
    /// One-dimensional central limit experiment for log|zeta|.
    Onedim(RunArgs),
    /// Joint sampling at big shifts (independent Gaussian limit).
    MultidimBig(RunArgs),
    /// Joint sampling at small shifts (correlated Gaussian limit).
    MultidimSmall(RunArgs),
    /// Zero counting and zero-count fluctuation statistics.
    Zeros(RunArgs),
    /// Mesoscopic limit-covariance kernel values.
    Mesoscopic(RunArgs),
}

impl Command {
    fn experiment(&self) -> &'static str {
        match self {
            Command::Primes(_) => "primes",
            Command::Oracles(_) => "oracles",
            Command::Onedim(_) => "onedim",
            Command::MultidimBig(_) => "multidim-big",
            Command::MultidimSmall(_) => "multidim-small",
            Command::Zeros(_) => "zeros",
            Command::Mesoscopic(_) => "mesoscopic",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Primes(a)
            | Command::Oracles(a)
            | Command::Onedim(a)
            | Command::MultidimBig(a)
            | Command::MultidimSmall(a)
            | Command::Zeros(a)
            | Command::Mesoscopic(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Flat key-value config file ("key = value" lines); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated list of T values, ascending, each in [16, prime_limit].
    #[arg(long, value_name = "T1,T2,...")]
    t_grid: Option<String>,
    /// Monte Carlo sample count M (≥ 100).
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed; required (no wall-clock default).
    #[arg(long)]
    seed: Option<u64>,
    /// Shift schedule: big:d, small:e1,e2,..., or explicit:f1,f2,...
    #[arg(long)]
    schedule: Option<String>,
    /// Sieve limit for the prime table (default 10^6, max 10^8).
    #[arg(long)]
    prime_limit: Option<u64>,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

fn build_config(experiment: &str, args: &RunArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    // Per-experiment defaults where the generic ones do not fit.
    match experiment {
        "multidim-big" => cfg.schedule = "big:2".to_string(),
        "multidim-small" => cfg.schedule = "small:inf,0.5".to_string(),
        "zeros" => cfg.t_grid = vec![1e3, 1e4],
        _ => {}
    }
    let mut seed_given = false;
    if let Some(path) = &args.config {
        for (key, value) in config::read_config_file(path)? {
            if key == "experiment" && value != experiment {
                return Err(Error::Config {
                    field: "experiment".into(),
                    message: format!(
                        "config file names experiment '{value}' but subcommand is '{experiment}'"
                    ),
                });
            }
            seed_given |= key == "seed";
            config::apply_key(&mut cfg, &key, &value)?;
        }
    }
    if let Some(v) = &args.t_grid {
        config::apply_key(&mut cfg, "t_grid", v)?;
    }
    if let Some(v) = args.samples {
        config::apply_key(&mut cfg, "samples", &v.to_string())?;
    }
    if let Some(v) = args.seed {
        config::apply_key(&mut cfg, "seed", &v.to_string())?;
        seed_given = true;
    }
    if let Some(v) = &args.schedule {
        config::apply_key(&mut cfg, "schedule", v)?;
    }
    if let Some(v) = args.prime_limit {
        config::apply_key(&mut cfg, "prime_limit", &v.to_string())?;
    }
    if let Some(v) = &args.out {
        cfg.output_path = Some(v.display().to_string());
    }
    if let Some(v) = &args.format {
        config::apply_key(&mut cfg, "format", v)?;
    }
    if !seed_given {
        return Err(Error::Config {
            field: "seed".into(),
            message: "seed is required (set --seed or a 'seed' config entry)".into(),
        });
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let args = cli.command.args();
    let cfg = build_config(cli.command.experiment(), args)?;
    let start = Instant::now();
    let report = run_experiment(&cfg)?;
    // Runtime goes to stderr only: reports must be byte-identical across runs.
    eprintln!(
        "{}: {} rows in {:.2}s",
        cfg.experiment,
        report.rows.len(),
        start.elapsed().as_secs_f64()
    );
    match &cfg.output_path {
        Some(path) => report.write(std::path::Path::new(path), cfg.format)?,
        None => print!("{}", report.render(cfg.format)),
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
