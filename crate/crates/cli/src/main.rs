//! `fermigauss` command-line front-end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 parse or usage error, 3 invariant
//! violation, 4 unphysical initial state, 5 oracle deviation above tolerance.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use fermigauss::cp::TOL_CP;
use fermigauss::dynamics::{evolve_master, uniform_grid, Propagation, SteadyState};
use fermigauss::fock::{cross_validate, TOL_CROSS};
use fermigauss::io::{
    fmt_sig, parse_generator, parse_state, round_sig, to_json, trajectory_to_csv, CatalogJson, ClassifyReport,
    StateJson, VerdictJson,
};
use fermigauss::two_mode::{catalog, CatalogParams};
use fermigauss::{CovarianceMatrix, Error, GeneratorPair};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "fermigauss", version, about = "Open fermionic Gaussian dynamics toolkit")]
struct Cli {
    /// Complete-positivity tolerance on the certificate's smallest eigenvalue.
    #[arg(long, global = true, env = "FERMIGAUSS_TOL", value_parser = non_negative)]
    tol: Option<f64>,

    /// Output format; each command accepts a subset.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output here instead of stdout (atomically).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Partition a generator into its nine classes and report complete positivity.
    Classify { generator: PathBuf },
    /// Complete-positivity verdict only.
    CheckCp { generator: PathBuf },
    /// Evolve a state and write the trajectory as CSV.
    Simulate {
        generator: PathBuf,
        state: PathBuf,
        #[arg(long, default_value_t = 10.0, value_parser = positive)]
        t_max: f64,
        #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
    },
    /// Two-mode class table with computed spectra and conserved combinations.
    Catalog {
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        e1: Option<f64>,
        #[arg(long)]
        e2: Option<f64>,
    },
    /// Compare the phase-space evolution with a brute-force Fock-space run.
    Xcheck {
        generator: PathBuf,
        state: PathBuf,
        #[arg(long, default_value_t = 2.0, value_parser = positive)]
        t_max: f64,
        #[arg(long, default_value_t = 21, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
        _ => Err(format!("expected a non-negative number, got {s:?}")),
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
struct DeviationExceeded {
    deviation: f64,
    tolerance: f64,
}

impl std::fmt::Display for DeviationExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "max deviation {:.3e} exceeds {:.1e}", self.deviation, self.tolerance)
    }
}

impl std::error::Error for DeviationExceeded {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<DeviationExceeded>().is_some() {
        return 5;
    }
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Parse(_)) => 2,
        Some(Error::Io(_)) => 1,
        Some(Error::UnphysicalInitialState { .. } | Error::UnphysicalState { .. }) => 4,
        Some(_) => 3,
        None => 1,
    }
}

fn pick_format(requested: Option<Format>, allowed: &[Format]) -> anyhow::Result<Format> {
    match requested {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(UsageError(format!("format {f:?} is not available for this command")).into()),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_generator(path: &Path) -> anyhow::Result<GeneratorPair> {
    parse_generator(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_state(path: &Path) -> anyhow::Result<CovarianceMatrix> {
    parse_state(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// Writes to `out` through a temporary file in the same directory, or to stdout.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file in {}", dir.display()))?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(path)
                .with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct XcheckSample {
    t: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct XcheckReport {
    max_deviation: f64,
    tolerance: f64,
    passed: bool,
    samples: Vec<XcheckSample>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let tol = cli.tol.unwrap_or(TOL_CP);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Classify { generator } => {
            let g = load_generator(&generator)?;
            let report = ClassifyReport::new(&g, tol);
            let text = match pick_format(cli.format, &[Format::Json, Format::Markdown])? {
                Format::Markdown => report.to_markdown(),
                _ => to_json(&report),
            };
            emit(out, &text)
        }
        Command::CheckCp { generator } => {
            pick_format(cli.format, &[Format::Json])?;
            let g = load_generator(&generator)?;
            emit(out, &to_json(&VerdictJson::with_tol(&g, tol)))
        }
        Command::Simulate {
            generator,
            state,
            t_max,
            samples,
        } => {
            pick_format(cli.format, &[Format::Csv])?;
            let g = load_generator(&generator)?;
            let s = load_state(&state)?;
            let grid = uniform_grid(t_max, samples as usize)?;
            let traj = evolve_master(&g, &s, &grid)?;
            emit(out, &trajectory_to_csv(&traj)?)?;
            let method = match traj.propagation {
                Propagation::ClosedForm => "closed form",
                Propagation::Rk4 => "RK4",
            };
            let steady = match fermigauss::dynamics::steady_state(&g) {
                SteadyState::Unique(ss) => {
                    let nus: Vec<String> = ss.nus().iter().map(|&x| fmt_sig(x)).collect();
                    format!(
                        "unique, nu = [{}], gamma = {}",
                        nus.join(", "),
                        serde_json::to_string(&StateJson::from_state(&ss).gamma)?
                    )
                }
                SteadyState::NoUniqueFixedPoint => "no unique fixed point".into(),
            };
            eprintln!(
                "{} samples to t = {t_max} ({method}); max violation {:.1e}; steady state: {steady}",
                traj.times.len(),
                traj.max_violation()
            );
            Ok(())
        }
        Command::Catalog { r, b, c, e1, e2 } => {
            let d = CatalogParams::default();
            let params = CatalogParams {
                r: r.unwrap_or(d.r),
                b: b.unwrap_or(d.b),
                c: c.unwrap_or(d.c),
                e1: e1.unwrap_or(d.e1),
                e2: e2.unwrap_or(d.e2),
            };
            if [params.r, params.b, params.c, params.e1, params.e2].iter().any(|x| !x.is_finite()) {
                bail!(UsageError("catalog parameters must be finite".into()));
            }
            let entries = catalog(&params)?;
            let table = CatalogJson::new(&params, &entries);
            let text = match pick_format(cli.format, &[Format::Markdown, Format::Json])? {
                Format::Json => to_json(&table),
                _ => table.to_markdown(),
            };
            emit(out, &text)
        }
        Command::Xcheck {
            generator,
            state,
            t_max,
            samples,
        } => {
            pick_format(cli.format, &[Format::Json])?;
            let g = load_generator(&generator)?;
            let s = load_state(&state)?;
            let cv = cross_validate(&g, &s, t_max, samples as usize)?;
            let report = XcheckReport {
                max_deviation: round_sig(cv.max_deviation),
                tolerance: TOL_CROSS,
                passed: cv.passed(),
                samples: cv
                    .times
                    .iter()
                    .zip(&cv.deviations)
                    .map(|(&t, &d)| XcheckSample {
                        t: round_sig(t),
                        deviation: round_sig(d),
                    })
                    .collect(),
            };
            emit(out, &to_json(&report))?;
            eprintln!("max deviation {:.3e} (tolerance {:.0e})", cv.max_deviation, TOL_CROSS);
            if cv.passed() {
                Ok(())
            } else {
                Err(DeviationExceeded {
                    deviation: cv.max_deviation,
                    tolerance: TOL_CROSS,
                }
                .into())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
