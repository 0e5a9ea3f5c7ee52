//! The `bdie` command-line driver.
//!
//! Exit codes: 0 success, 1 an identity failed its threshold, 2 configuration
//! error, 3 assembly error, 4 solver failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::linalg::LinalgError;
use crate::system::{assemble_auto, solve, DirichletProblem, SystemError};
use crate::verification::{compare_parametrices, identity_suite, run_levels, StudyConfig, VerificationError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ASSEMBLY: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

const AFTER_HELP: &str = "\
Configuration (JSON, unknown keys rejected):
  geometry    {kind: ball|cube, size: radius or half-width (1.0), refinement}
  case        C1..C4, a builtin manufactured solution (replaces the next three keys)
  coefficient {family: constant|quadratic|exponential, params, a_min?, a_max?}
  rhs         {kind: density, function} | {kind: point_sources, sources: [{location, strength}]}
              (default: density 0)
  dirichlet   a number or a named function (default 0)
  quadrature  {near_threshold: 2.0, depth: 4, self_term: analytic_ball|duffy}
  solver      {method: direct_lu|iterative, tol: 1e-10}
  output      output directory (bdie-output)
Named functions: zero, one, x1, x2, x3, x1_squared, two_x1, exp_x1_2_plus_2x1.
Refinement is the icosphere level for the ball and divisions per edge for the cube.
BDIE_THREADS caps the worker threads (0 = all cores).
Exit codes: 0 ok, 1 identity failure, 2 config error, 3 assembly error, 4 solver failure.";

#[derive(Debug, Parser)]
#[command(name = "bdie", version, about = "Boundary-domain integral equation solver for variable-coefficient diffusion")]
#[command(after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one Dirichlet problem and write solution.csv and diagnostics.csv.
    Solve { config: PathBuf },
    /// Run a manufactured case over several levels and write convergence.csv.
    Convergence {
        config: PathBuf,
        /// Comma-separated refinement levels.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
    },
    /// Run the jump, defect, path and oracle identities; write identities.csv.
    Identities { config: PathBuf },
    /// Compare the two parametrices; write compare.csv.
    Compare { config: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("assembly failed: {0}")]
    Assembly(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} identities failed")]
    IdentitiesFailed(usize),
    #[error("{0} levels could not be solved")]
    LevelsFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Assembly(_) | CliError::Output { .. } => EXIT_ASSEMBLY,
            CliError::Solver(_) | CliError::LevelsFailed(_) => EXIT_SOLVER,
            CliError::IdentitiesFailed(_) => EXIT_IDENTITY_FAILED,
        }
    }
}

impl From<SystemError> for CliError {
    fn from(e: SystemError) -> Self {
        match e {
            SystemError::Coefficient(c) => CliError::Config(c.into()),
            SystemError::SourceNearBoundary { .. } | SystemError::DimensionMismatch { .. } => {
                CliError::Config(ConfigError::Invalid(e.to_string()))
            }
            SystemError::Linalg(_) | SystemError::ResidualTooLarge { .. } => CliError::Solver(e.to_string()),
            _ => CliError::Assembly(e.to_string()),
        }
    }
}

impl From<VerificationError> for CliError {
    fn from(e: VerificationError) -> Self {
        match e {
            VerificationError::System(s) => s.into(),
            VerificationError::Mesh(m) => CliError::Config(m.into()),
            VerificationError::GuardFailed { .. } | VerificationError::TooFewLevels(_) | VerificationError::Invalid(_) => {
                CliError::Config(ConfigError::Invalid(e.to_string()))
            }
            other => CliError::Assembly(other.to_string()),
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::Solver(e.to_string())
    }
}

/// Caps the global rayon pool from `BDIE_THREADS` (0 or unset means automatic).
pub fn configure_threads() -> Result<(), ConfigError> {
    let Ok(value) = std::env::var("BDIE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| ConfigError::Invalid(format!("BDIE_THREADS must be a non-negative integer, got {value:?}")))?;
    if n > 0 {
        // a pool that is already built (for example by an earlier call) is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let out = |source| CliError::Output {
        path: path.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(out)?;
    let mut w = BufWriter::new(File::create(&path).map_err(out)?);
    body(&mut w).and_then(|_| w.flush()).map_err(out)?;
    Ok(path)
}

fn build_problem(config: &RunConfig) -> Result<DirichletProblem, CliError> {
    let (s, v) = config.meshes(config.geometry.refinement)?;
    let rhs = config.rhs_on(&v)?;
    let phi = config.dirichlet_on(&s)?;
    Ok(DirichletProblem::new(config.domain(), s, v, config.field()?, rhs, phi, config.quadrature)?)
}

fn study_config(config: &RunConfig) -> StudyConfig {
    StudyConfig {
        policy: config.quadrature,
        method: config.solver.method,
        tol: config.solver.tol,
    }
}

pub fn cmd_solve(config: &RunConfig) -> Result<PathBuf, CliError> {
    let problem = build_problem(config)?;
    let system = assemble_auto(&problem)?;
    let solution = solve(&system, config.solver.method, config.solver.tol)?;
    let sources = config.point_sources();
    let path = write_file(&config.output, "solution.csv", |w| {
        writeln!(w, "{},solution", crate::verification::REPORT_HEADER)?;
        if !sources.is_empty() {
            writeln!(w, "source_id,x,y,z,strength")?;
            for (i, s) in sources.iter().enumerate() {
                let p = s.location;
                writeln!(w, "{i},{:.12e},{:.12e},{:.12e},{:.12e}", p[0], p[1], p[2], s.strength)?;
            }
            writeln!(w)?;
        }
        solution.write_csv(&problem, w)
    })?;
    let d = &solution.diagnostics;
    write_file(&config.output, "diagnostics.csv", |w| {
        writeln!(w, "{},diagnostics", crate::verification::REPORT_HEADER)?;
        writeln!(w, "key,value")?;
        writeln!(w, "method,{}", d.method)?;
        writeln!(w, "unknowns,{}", system.dim())?;
        writeln!(w, "h,{:.6e}", problem.h())?;
        writeln!(w, "residual_norm,{:.6e}", d.residual_norm)?;
        let cond = d.condition_estimate.map(|c| format!("{c:.6e}")).unwrap_or_default();
        writeln!(w, "condition_estimate,{cond}")?;
        writeln!(w, "iterations,{}", d.iterations)?;
        writeln!(w, "near_field_warnings,{}", d.warnings.len())
    })?;
    Ok(path)
}

pub fn cmd_convergence(config: &RunConfig, levels: &[usize]) -> Result<PathBuf, CliError> {
    let case = config
        .manufactured_case()?
        .ok_or_else(|| ConfigError::Invalid("convergence needs a manufactured case (\"case\": \"C1\"..\"C4\")".into()))?;
    if levels.is_empty() {
        return Err(ConfigError::Invalid("no levels given".into()).into());
    }
    for &level in levels {
        config.check_level(level)?;
    }
    let report = run_levels(&case, levels, &study_config(config))?;
    let path = write_file(&config.output, "convergence.csv", |w| report.write_csv(w))?;
    let failed = report.rows.iter().filter(|r| !r.solved()).count();
    if failed > 0 {
        return Err(CliError::LevelsFailed(failed));
    }
    Ok(path)
}

pub fn cmd_identities(config: &RunConfig) -> Result<PathBuf, CliError> {
    let field = config.field()?;
    let report = identity_suite(config.domain(), &field, config.geometry.refinement, config.quadrature)?;
    let path = write_file(&config.output, "identities.csv", |w| report.write_csv(w))?;
    let failed = report.entries.iter().filter(|e| !e.passed()).count();
    if failed > 0 {
        return Err(CliError::IdentitiesFailed(failed));
    }
    Ok(path)
}

pub fn cmd_compare(config: &RunConfig) -> Result<PathBuf, CliError> {
    let field = config.field()?;
    let report = compare_parametrices(&field, config.domain(), config.geometry.refinement, config.quadrature)?;
    write_file(&config.output, "compare.csv", |w| report.write_csv(w))
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(path) => {
            println!("wrote {}", path.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("bdie: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command) -> Result<PathBuf, CliError> {
    configure_threads()?;
    let path = match command {
        Command::Solve { config }
        | Command::Convergence { config, .. }
        | Command::Identities { config }
        | Command::Compare { config } => config,
    };
    let config = RunConfig::load(path)?;
    match command {
        Command::Solve { .. } => cmd_solve(&config),
        Command::Convergence { levels, .. } => cmd_convergence(&config, levels),
        Command::Identities { .. } => cmd_identities(&config),
        Command::Compare { .. } => cmd_compare(&config),
    }
}
