//! Command-line driver for the stable-solutions laboratory.

pub mod commands;
pub mod config;
pub mod output;
pub mod spec;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use commands::Command;
use config::{RunConfig, Tolerances};
use spec::{DomainArg, NonlinearityArg};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CERTIFICATE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{origin}:{line}:{column}: {message}")]
    Config { origin: String, line: usize, column: usize, message: String },
    #[error(transparent)]
    Solver(#[from] stablelab::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "stablelab", version, about = "Stable solutions of -Δu = f(u): solvers, spectra, certificates")]
pub struct Cli {
    /// JSON config; flags override its settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (else STABLELAB_OUT, else the config, else ./stablelab-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report file stem (defaults to the command name).
    #[arg(long, global = true)]
    pub name: Option<String>,
    /// Also write fields as CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Solve -Δu = f(u) by monotone iteration, Newton or fixed point.
    Solve(RunArgs),
    /// Principal eigenvalue of -Δ - V under refinement.
    Stability(RunArgs),
    /// Truncation or contraction approximating sequence.
    Approximate(RunArgs),
    /// Search for stable solutions and classify them.
    Classify(RunArgs),
    /// Look for nonnegative solutions when f(t) > λ₁t.
    Nonexist(RunArgs),
    /// Invariance of the solved field under the domain's isometries.
    Symmetry(RunArgs),
    /// Layer growth on stretched dumbbells.
    Dumbbell(RunArgs),
    /// First Dirichlet eigenpair.
    Eig(RunArgs),
    /// Run several config files, each naming its command.
    Sweep(SweepArgs),
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// interval[:a=..,b=..], ball:N=..,R=.., annulus:N=..,a=..,b=.., box[:lx=..,ly=..], disk[:R=..], dumbbell:N=..,n=..,rho=..
    #[arg(long)]
    pub domain: Option<String>,
    /// exp:c=..,a=.., const:q, affine:m=..,q=.., poly:c0,c1,.., power:c=..,p=..,b=.., shifted-exp:c=..,a=..,b=..;
    /// numbers may be written as multiples of lambda1, and `x*lambda1` alone means the linear map.
    #[arg(long)]
    pub f: Option<String>,
    /// hardy:c=.., const:c, zero
    #[arg(long)]
    pub potential: Option<String>,
    /// singular-log or torsion
    #[arg(long)]
    pub target: Option<String>,
    /// truncation or contraction
    #[arg(long)]
    pub mode: Option<String>,
    /// monotone, newton or picard
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub resolutions: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    /// Dimension.
    #[arg(long = "N")]
    pub dim: Option<u32>,
    /// Constant Dirichlet value.
    #[arg(long, allow_hyphen_values = true)]
    pub boundary: Option<f64>,
    /// Range over which the nonexistence precondition is sampled.
    #[arg(long)]
    pub cap: Option<f64>,
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol_stab: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub configs: Vec<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

impl RunArgs {
    fn into_config(self) -> RunConfig {
        let tol = Tolerances { solver_tol: self.solver_tol, max_iter: self.max_iter, tol_stab: self.tol_stab };
        RunConfig {
            domain: self.domain.map(DomainArg::Compact),
            f: self.f.map(NonlinearityArg::Compact),
            potential: self.potential,
            target: self.target,
            mode: self.mode,
            method: self.method,
            resolution: self.resolution,
            resolutions: self.resolutions,
            k: self.k,
            eps: self.eps,
            n: self.n,
            dim: self.dim,
            boundary: self.boundary,
            cap: self.cap,
            tolerances: (tol != Tolerances::default()).then_some(tol),
            ..Default::default()
        }
    }
}

fn command_of(sub: &Sub) -> Option<Command> {
    Some(match sub {
        Sub::Solve(_) => Command::Solve,
        Sub::Stability(_) => Command::Stability,
        Sub::Approximate(_) => Command::Approximate,
        Sub::Classify(_) => Command::Classify,
        Sub::Nonexist(_) => Command::Nonexist,
        Sub::Symmetry(_) => Command::Symmetry,
        Sub::Dumbbell(_) => Command::Dumbbell,
        Sub::Eig(_) => Command::Eig,
        Sub::Sweep(_) => return None,
    })
}

/// Runs one configured command and writes its report; returns the exit code.
pub fn run_one(command: Command, cfg: RunConfig, out_flag: Option<&Path>, csv_flag: bool) -> Result<i32, CliError> {
    let dir = config::output_dir(out_flag, cfg.out.as_deref());
    let name = cfg.name.clone().unwrap_or_else(|| command.name().to_string());
    let csv = csv_flag || cfg.csv.unwrap_or(false);
    let started = Instant::now();
    let outcome = commands::execute(command, &cfg)?;
    let written = output::write_run(&dir, &name, command, &cfg, &outcome, started.elapsed(), csv)?;
    for c in outcome.certificates.iter().filter(|c| !c.pass) {
        println!("FAIL {} (witness {:.3e}, tolerance {:.3e})", c.name, c.witness, c.tolerance);
    }
    let passed = outcome.certificates.iter().filter(|c| c.pass).count();
    println!(
        "{name}: {} ({passed}/{} certificates) -> {}",
        if outcome.pass() { "PASS" } else { "FAIL" },
        outcome.certificates.len(),
        written.report.display()
    );
    for f in &written.fields {
        println!("field: {}", f.display());
    }
    Ok(if outcome.pass() { EXIT_PASS } else { EXIT_CERTIFICATE })
}

fn sweep(args: SweepArgs, out_flag: Option<&Path>, csv: bool) -> Result<i32, CliError> {
    if args.configs.is_empty() {
        return Err(CliError::Usage("sweep needs at least one config file".into()));
    }
    let mut runs = Vec::with_capacity(args.configs.len());
    for path in &args.configs {
        let mut cfg = RunConfig::load(path)?;
        let command = Command::from_name(
            cfg.command.as_deref().ok_or_else(|| CliError::Usage(format!("{}: missing `command`", path.display())))?,
        )?;
        if cfg.name.is_none() {
            cfg.name = path.file_stem().and_then(|s| s.to_str()).map(str::to_string);
        }
        runs.push((command, cfg));
    }
    let next = AtomicUsize::new(0);
    let codes = Mutex::new(vec![EXIT_PASS; runs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.clamp(1, runs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some((command, cfg)) = runs.get(i) else { break };
                let code = run_one(*command, cfg.clone(), out_flag, csv).unwrap_or_else(|e| {
                    eprintln!("error: {}: {e}", args.configs[i].display());
                    EXIT_USAGE
                });
                codes.lock().expect("no poisoned runs")[i] = code;
            });
        }
    });
    let codes = codes.into_inner().expect("no poisoned runs");
    Ok(codes.into_iter().max().unwrap_or(EXIT_PASS))
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let command = command_of(&cli.command);
    match cli.command {
        Sub::Sweep(args) => sweep(args, cli.out.as_deref(), cli.csv),
        Sub::Solve(a) | Sub::Stability(a) | Sub::Approximate(a) | Sub::Classify(a) | Sub::Nonexist(a)
        | Sub::Symmetry(a) | Sub::Dumbbell(a) | Sub::Eig(a) => {
            let command = command.expect("not a sweep");
            if let Some(named) = file.command.as_deref() {
                if Command::from_name(named)? != command {
                    return Err(CliError::Usage(format!(
                        "config is for `{named}` but `{}` was requested",
                        command.name()
                    )));
                }
            }
            let mut flags = a.into_config();
            flags.name = cli.name;
            let cfg = file.overlay(flags);
            run_one(command, cfg, cli.out.as_deref(), cli.csv)
        }
    }
}

/// Parses `argv` and runs it; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
