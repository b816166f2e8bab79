//! Command-line front end. The `ails` binary is a thin wrapper around
//! [`main_with_args`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::adaptive::{AcceptanceParams, Criterion, DegreeParams, Mechanism};
use crate::bench::{
    performance_profile, profile_csv, read_gap_matrix, run_experiment, summarize, summary_csv, write_rows, ExperimentSpec,
    Format, InstanceSource,
};
use crate::engine::{Clock, RunConfig};
use crate::error::{ConfigError, Error};
use crate::instance::{load_bks, read_instance, BksRegistry};
use crate::solution::{parse_solution, validate_file};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_SOLUTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ails", version, about = "Adaptive iterated local search for the CVRP")]
pub struct Args {
    /// Instance file in CVRPLIB format (repeatable).
    #[arg(long = "instance", value_name = "FILE")]
    pub instances: Vec<PathBuf>,
    /// Run every `*.vrp` file in a directory.
    #[arg(long, value_name = "DIR")]
    pub instance_dir: Option<PathBuf>,
    /// Best known values, `name,value` per line (default: built-in table).
    #[arg(long, value_name = "FILE")]
    pub bks: Option<PathBuf>,

    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Seconds per run (default: 10 per customer).
    #[arg(long, value_name = "SECONDS")]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<u64>,
    /// Measure time in iterations, each worth this many seconds.
    #[arg(long, value_name = "SECONDS")]
    pub virtual_clock: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value = "c4", value_parser = clap::value_parser!(Criterion))]
    pub acceptance: Criterion,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 0.4)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.005)]
    pub theta: f64,
    #[arg(long = "k-best", default_value_t = 6)]
    pub k_best: usize,
    /// Period of the alpha update of c4, in iterations.
    #[arg(long, default_value_t = 30)]
    pub lambda: usize,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,

    #[arg(long, default_value = "d4", value_parser = clap::value_parser!(Mechanism))]
    pub degree: Mechanism,
    #[arg(long, default_value_t = 15)]
    pub omega: usize,
    #[arg(long, default_value_t = 0.03)]
    pub nu: f64,
    #[arg(long, default_value_t = 1)]
    pub omega_min: usize,
    #[arg(long, default_value_t = 30)]
    pub omega_max: usize,

    #[arg(long, default_value_t = 25)]
    pub dbeta: usize,
    #[arg(long, default_value_t = 60)]
    pub sigma: usize,
    #[arg(long, default_value_t = 30)]
    pub gamma: usize,
    #[arg(long, default_value_t = 40)]
    pub phi: usize,
    #[arg(long, default_value_t = 2000)]
    pub stall_threshold: u64,

    /// Results file (default: standard output).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Write one iteration trace CSV per run into this directory.
    #[arg(long, value_name = "DIR")]
    pub trace: Option<PathBuf>,
    /// Worker threads (0: all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Check a solution file against the (single) instance and exit.
    #[arg(long, value_name = "FILE")]
    pub validate_solution: Option<PathBuf>,
    /// Compute a performance profile from a gap matrix CSV and exit.
    #[arg(long, value_name = "FILE")]
    pub profile: Option<PathBuf>,
}

impl Args {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            acceptance: AcceptanceParams {
                criterion: self.acceptance,
                eta: self.eta,
                kappa: self.kappa,
                mu: self.mu,
                theta: self.theta,
                k: self.k_best,
                lambda: self.lambda,
                epsilon: self.epsilon,
                ..AcceptanceParams::default()
            },
            degree: DegreeParams {
                mechanism: self.degree,
                omega: self.omega,
                nu: self.nu,
                omega_low: self.omega_min,
                omega_high: self.omega_max,
                ..DegreeParams::default()
            },
            gamma: self.gamma,
            d_beta: self.dbeta,
            sigma: self.sigma,
            phi: self.phi,
            time_limit: self.time_limit,
            max_iterations: self.max_iterations,
            stall_threshold: self.stall_threshold,
            seed: self.seed,
            clock: match self.virtual_clock {
                Some(s) => Clock::Virtual { seconds_per_iteration: s },
                None => Clock::Wall,
            },
            trace: self.trace.is_some(),
            ..RunConfig::default()
        }
    }

    fn instance_paths(&self) -> Result<Vec<PathBuf>, Error> {
        let mut paths = self.instances.clone();
        if let Some(dir) = &self.instance_dir {
            let entries = fs::read_dir(dir).map_err(|source| io_error(dir, source))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("vrp")))
                .collect();
            found.sort();
            paths.extend(found);
        }
        Ok(paths)
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::NonPositiveBks(_) | Error::EmptySample => EXIT_CONFIG,
        _ => EXIT_PARSE,
    }
}

/// Parses `argv` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(args: &Args) -> Result<i32, Error> {
    if let Some(path) = &args.profile {
        return profile(args, path);
    }
    let paths = args.instance_paths()?;
    if let Some(sol) = &args.validate_solution {
        return validate(&paths, sol);
    }
    experiment(args, paths)
}

fn emit(args: &Args, text: &str) -> Result<(), Error> {
    match &args.out {
        Some(p) => fs::write(p, text).map_err(|source| io_error(p, source)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn profile(args: &Args, path: &Path) -> Result<i32, Error> {
    let text = fs::read_to_string(path).map_err(|source| io_error(path, source))?;
    let (algorithms, gaps) = read_gap_matrix(&text)?;
    let curves = performance_profile(&algorithms, &gaps)?;
    match args.format {
        OutputFormat::Csv => emit(args, &profile_csv(&curves))?,
        OutputFormat::Json => {
            let lines: Vec<String> = curves.iter().map(serde_json::to_string).collect::<Result<_, _>>()?;
            emit(args, &(lines.join("\n") + "\n"))?
        }
    }
    Ok(EXIT_OK)
}

fn validate(paths: &[PathBuf], sol: &Path) -> Result<i32, Error> {
    let [path] = paths else {
        return Err(ConfigError::Invalid("--validate-solution needs exactly one instance".into()).into());
    };
    let inst = read_instance(path)?;
    let text = fs::read_to_string(sol).map_err(|source| io_error(sol, source))?;
    let file = parse_solution(&inst, &text)?;
    match validate_file(&inst, &file) {
        Ok(cost) => {
            println!("valid, cost {cost}");
            Ok(EXIT_OK)
        }
        Err(violations) => {
            println!("invalid");
            for v in violations {
                println!("  {v}");
            }
            Ok(EXIT_INVALID_SOLUTION)
        }
    }
}

fn experiment(args: &Args, paths: Vec<PathBuf>) -> Result<i32, Error> {
    if paths.is_empty() {
        return Err(ConfigError::Invalid("no instance given (use --instance or --instance-dir)".into()).into());
    }
    let bks = match &args.bks {
        Some(p) => load_bks(&fs::read_to_string(p).map_err(|source| io_error(p, source))?)?,
        None => BksRegistry::builtin(),
    };
    let spec = ExperimentSpec {
        instances: paths.into_iter().map(InstanceSource::Path).collect(),
        runs: args.runs,
        config: args.run_config(),
        seed_base: args.seed,
        bks,
        threads: args.threads,
    };
    let results = run_experiment(&spec)?;

    let mut rows = Vec::new();
    let mut invalid = false;
    for result in &results {
        for k in result.invalid_runs() {
            eprintln!("{}: run {k} produced an invalid solution", result.instance.name());
            invalid = true;
        }
        if let Some(dir) = &args.trace {
            fs::create_dir_all(dir).map_err(|source| io_error(dir, source))?;
            for r in &result.reports {
                let p = dir.join(format!("{}-seed{}.csv", result.instance.name(), r.seed));
                fs::write(&p, r.trace_csv()).map_err(|source| io_error(&p, source))?;
            }
        }
        rows.push(result.gap_row(&spec.bks)?);
    }
    let format = match args.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::JsonLines,
    };
    emit(args, &write_rows(&rows, format)?)?;

    let gaps: Vec<f64> = rows.iter().filter_map(|r| r.gap).collect();
    if !gaps.is_empty() {
        eprint!("{}", summary_csv(&[("gap".to_string(), summarize(&gaps)?)]));
    }
    Ok(if invalid { EXIT_INVALID_SOLUTION } else { EXIT_OK })
}
