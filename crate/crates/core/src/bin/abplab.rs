use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use abplab::bounds::BoundReport;
use abplab::eigensolve::{Bc, Operator, SolverOptions};
use abplab::emit::{self, Format};
use abplab::geometry::{DomainKind, DomainSpec};
use abplab::operators::Ellipticity;
use abplab::scenario::{eigen_bounds, solve_eigen, ConfigFile, EigenRequest, RunOptions, RunSummary, SolverKind};
use abplab::Result;

#[derive(Parser)]
#[command(name = "abplab", version, about = "Checks ABP-type estimates and eigenvalue lower bounds on grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario or suite, or every scenario of a config file.
    Run {
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated resolutions overriding each scenario's own.
        #[arg(long, value_delimiter = ',')]
        resolution: Option<Vec<usize>>,
        /// Output directory, or `-` for standard output.
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the scenario registry.
    List {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve one eigenproblem and evaluate its lower bound.
    Eigen {
        #[arg(long, value_enum)]
        operator: OperatorArg,
        /// `disk[:R]`, `rect[:W[xH]]` or `ball:N[:R]`.
        #[arg(long, default_value = "disk")]
        domain: String,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        #[arg(long)]
        radial_resolution: Option<usize>,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        /// Robin parameter; Dirichlet when absent.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long = "Theta", default_value_t = 1.0)]
        big_theta: f64,
        /// Right-hand side exponent for Pucci.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    Laplace,
    Ma,
    Pucci,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Fd,
    Shooting,
    Lions,
}

fn emit(summaries: &[RunSummary], out: Option<&str>, format: Format) -> Result<()> {
    match out {
        Some("-") => emit::write_stdout(summaries, format),
        Some(dir) => {
            let path = emit::write_dir(summaries, format, dir.as_ref())?;
            eprintln!("wrote {}", path.display());
            print_table(summaries);
            Ok(())
        }
        None => {
            print_table(summaries);
            Ok(())
        }
    }
}

// Output goes through `writeln!` with errors ignored so a closed pipe ends quietly.
fn print_table(summaries: &[RunSummary]) {
    let mut o = std::io::stdout().lock();
    for s in summaries {
        let scoped = s.reports.iter().filter(|r| r.is_scoped()).count();
        let failed: Vec<&BoundReport> = s.reports.iter().filter(|r| r.pass() == Some(false)).collect();
        let tag = if failed.is_empty() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            o,
            "{tag} {}@{}  {}/{} scoped reports pass, {} report-only  {:.2}s",
            s.scenario,
            s.resolution,
            scoped - failed.len(),
            scoped,
            s.reports.len() - scoped,
            s.wall_time_s
        );
        for r in failed {
            let _ = writeln!(o, "     {}: lhs {:.6e} rhs {:.6e} ({:?})", r.id, r.lhs, r.rhs, r.orientation);
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { scenario, config, resolution, out, format, seed, threads } => {
            let cfg = match &config {
                Some(path) => ConfigFile::load(path)?,
                None => ConfigFile::builtin(),
            };
            let selection = match (&scenario, &config) {
                (Some(name), _) => Some(cfg.select(name)?),
                (None, Some(_)) => None,
                (None, None) => Some(cfg.select("acceptance")?),
            };
            let opts = RunOptions { resolutions: resolution, seed, threads };
            let summaries = cfg.run(selection.as_deref(), &opts)?;
            emit(&summaries, out.as_deref(), format.into())?;
            Ok(summaries.iter().all(RunSummary::pass))
        }
        Command::List { config } => {
            let cfg = match &config {
                Some(path) => ConfigFile::load(path)?,
                None => ConfigFile::builtin(),
            };
            let mut o = std::io::stdout().lock();
            for (name, desc) in cfg.listing() {
                let _ = writeln!(o, "{name:32} {desc}");
            }
            Ok(true)
        }
        Command::Eigen {
            operator,
            domain,
            resolution,
            radial_resolution,
            solver,
            alpha,
            theta,
            big_theta,
            p,
            out,
            format,
        } => {
            let domain: DomainSpec = domain.parse()?;
            let op = match operator {
                OperatorArg::Laplace => Operator::Laplace,
                OperatorArg::Ma => Operator::MongeAmpere,
                OperatorArg::Pucci => Operator::Pucci(Ellipticity::new(theta, big_theta)?),
            };
            let bc = match alpha {
                Some(a) => Bc::robin(a)?,
                None => Bc::Dirichlet,
            };
            let solver = match solver {
                Some(SolverArg::Fd) => SolverKind::Fd,
                Some(SolverArg::Shooting) => SolverKind::Shooting,
                Some(SolverArg::Lions) => SolverKind::Lions,
                None if matches!(op, Operator::Laplace) && !matches!(domain.kind, DomainKind::RadialBall { .. }) => SolverKind::Fd,
                None => SolverKind::Shooting,
            };
            let req = EigenRequest { op, bc, p, resolution, radial_resolution };
            let start = std::time::Instant::now();
            let pair = solve_eigen(&domain, &req, solver, &SolverOptions::default())?;
            eprintln!(
                "lambda {:.10e}  {op} {bc} on {domain}  solver {:?}  residual {:.3e}  iterations {}",
                pair.lambda, pair.solver, pair.residual, pair.iterations
            );
            let reports = eigen_bounds(&pair)?;
            let summary = RunSummary {
                scenario: "eigen".into(),
                resolution: pair.phi.grid().resolution(),
                reports,
                skipped: Vec::new(),
                wall_time_s: start.elapsed().as_secs_f64(),
                version: env!("CARGO_PKG_VERSION").into(),
                config_hash: String::new(),
            };
            let pass = summary.pass();
            emit(&[summary], out.as_deref(), format.into())?;
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
