mod args;
mod format;
mod report;

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use majorate::dist::{parse_dist_text, DistFile, ProbDist};
use majorate::entropy::{renyi, ExtendedAlpha};
use majorate::exponents::exponent_curve;
use majorate::oracle::Oracle;
use majorate::rate::{chain_check, rate_with, ChainStatus, RateOptions};
use thiserror::Error;

use args::{Cli, Command, Common, Format};
use report::{Table, *};

const EXIT_CHAIN_VIOLATION: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_NOT_MAJORIZED: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_DOMAIN: u8 = 5;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] majorate::error::Error),
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        source: majorate::error::Error,
    },
    #[error("writing output: {0}")]
    Write(#[from] std::io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use majorate::error::Error;
        match self {
            CliError::Read { .. } | CliError::Input { .. } => EXIT_PARSE,
            CliError::Write(_) | CliError::Csv(_) => 1,
            CliError::Lib(e) if e.is_parse() || matches!(e, Error::InvalidArgument(_)) => {
                EXIT_PARSE
            }
            CliError::Lib(e) if e.is_budget() => EXIT_BUDGET,
            CliError::Lib(_) => EXIT_DOMAIN,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Input {
    file: DistFile,
    dist: ProbDist,
}

fn load(path: &Path, common: &Common) -> Result<Input> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    let input_err = |source| CliError::Input {
        path: path.to_owned(),
        source,
    };
    let file = parse_dist_text(&text, None).map_err(input_err)?;
    let dist = file.to_prob_dist(common.normalize).map_err(input_err)?;
    Ok(Input { file, dist })
}

fn oracle(common: &Common) -> Oracle {
    match common.budget {
        Some(budget) => Oracle::with_budget(budget),
        None => Oracle::default(),
    }
}

/// A rendered report plus the exit status it implies.
struct Output {
    text: String,
    status: u8,
}

fn render<T: serde::Serialize + Table>(report: &T, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report)?,
    })
}

fn sweep_alphas(points: usize) -> Result<Vec<ExtendedAlpha>> {
    if points < 2 {
        return Err(majorate::error::Error::InvalidArgument(
            "a sweep needs at least 2 points".into(),
        )
        .into());
    }
    let last = (points - 1) as f64;
    let mut alphas: Vec<ExtendedAlpha> = (0..points)
        .map(|k| match k {
            0 => ExtendedAlpha::Finite(0.0),
            k if k == points - 1 => ExtendedAlpha::PlusInfinity,
            k => ExtendedAlpha::Finite((FRAC_PI_2 * k as f64 / last).tan()),
        })
        .collect();
    let one = ExtendedAlpha::Finite(1.0);
    match alphas.iter().position(|a| (a.to_f64() - 1.0).abs() < 1e-12) {
        Some(i) => alphas[i] = one,
        None => {
            let i = alphas
                .iter()
                .position(|a| a.to_f64() > 1.0)
                .unwrap_or(alphas.len());
            alphas.insert(i, one);
        }
    }
    Ok(alphas)
}

fn run(cli: &Cli) -> Result<Output> {
    let common = &cli.common;
    let done = |text: String| Output { text, status: 0 };
    match &cli.command {
        Command::Entropy {
            dist,
            alpha,
            points,
        } => {
            let input = load(dist, common)?;
            let alphas = if alpha.is_empty() {
                sweep_alphas(*points)?
            } else {
                alpha
                    .iter()
                    .map(|a| a.parse())
                    .collect::<std::result::Result<_, _>>()?
            };
            let values = alphas
                .iter()
                .map(|&a| {
                    Ok(EntropyValue {
                        alpha: format::Alpha(a),
                        renyi: format::Real(renyi(&input.dist, a)?),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let report = EntropyReport {
                name: input.file.name,
                support: input.dist.support(),
                values,
            };
            let default = if alpha.is_empty() {
                Format::Csv
            } else {
                Format::Json
            };
            Ok(done(render(&report, common.format.unwrap_or(default))?))
        }
        Command::Rate { p, q, grid } => {
            let p = load(p, common)?.dist;
            let q = load(q, common)?.dist;
            let options = RateOptions {
                grid: *grid,
                ..RateOptions::default()
            };
            let result = rate_with(&p, &q, &options)?;
            Ok(done(render(
                &RateReport::new(&result),
                common.format.unwrap_or(Format::Json),
            )?))
        }
        Command::Exponents { dist, resolution } => {
            let p = load(dist, common)?.dist;
            let points = curve(&p, *resolution)?;
            let report = CurveReport {
                points: points.iter().map(PointRow::from).collect(),
            };
            Ok(done(render(&report, common.format.unwrap_or(Format::Csv))?))
        }
        Command::Majorize {
            p,
            q,
            n,
            m,
            exact,
            tolerance,
        } => {
            if tolerance.is_nan() || *tolerance < 0.0 {
                return Err(majorate::error::Error::InvalidArgument(
                    "tolerance must be nonnegative".into(),
                )
                .into());
            }
            let o = Oracle {
                tolerance: *tolerance,
                ..oracle(common)
            };
            let (pi, qi) = (load(p, common)?, load(q, common)?);
            let verdict = if *exact {
                let rational = |input: &Input, path: &Path| {
                    input
                        .file
                        .to_rational_dist(common.normalize)
                        .map_err(|source| CliError::Input {
                            path: path.to_owned(),
                            source,
                        })
                };
                o.majorizes_adjudicated(&rational(&pi, p)?, *n, &rational(&qi, q)?, *m)?
            } else {
                o.majorizes(&pi.dist, *n, &qi.dist, *m)?
            };
            let text = render(
                &VerdictReport::new(&verdict, *n, *m),
                common.format.unwrap_or(Format::Json),
            )?;
            let status = if verdict.holds { 0 } else { EXIT_NOT_MAJORIZED };
            Ok(Output { text, status })
        }
        Command::Verify {
            dist,
            n,
            resolution,
        } => {
            let p = load(dist, common)?.dist;
            if *n == 0 {
                return Err(
                    majorate::error::Error::InvalidArgument("n must be positive".into()).into(),
                );
            }
            let stairs = oracle(common).staircase(&p, *n)?;
            let rows = curve(&p, *resolution)?
                .iter()
                .map(|pt| verify_row(pt, &stairs.empirical_exponents(pt.value)))
                .collect();
            let report = VerifyReport::new(*n, rows);
            Ok(done(render(
                &report,
                common.format.unwrap_or(Format::Json),
            )?))
        }
        Command::Chain { p, q, n_max } => {
            let p = load(p, common)?.dist;
            let q = load(q, common)?.dist;
            let result = chain_check(&p, &q, *n_max, &oracle(common))?;
            let text = render(
                &ChainJson::from(&result),
                common.format.unwrap_or(Format::Json),
            )?;
            let status = if result.status == ChainStatus::Violation {
                EXIT_CHAIN_VIOLATION
            } else {
                0
            };
            Ok(Output { text, status })
        }
        Command::Staircase { dist, n } => {
            let p = load(dist, common)?.dist;
            let s = oracle(common).staircase(&p, *n)?;
            let report = StaircaseReport::new(*n, p.support(), s.levels());
            Ok(done(render(&report, common.format.unwrap_or(Format::Csv))?))
        }
    }
}

/// The exponent curve, or the single degenerate point of a uniform input.
fn curve(p: &ProbDist, resolution: usize) -> Result<Vec<majorate::exponents::ExponentPoint>> {
    if p.is_uniform() && !p.is_trivial() {
        if resolution == 0 {
            return Err(majorate::error::Error::InvalidArgument(
                "resolution must be positive".into(),
            )
            .into());
        }
        return Ok(vec![uniform_point(p.support())]);
    }
    Ok(exponent_curve(p, resolution)?)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let written = stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush());
            match written {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        emit(&out.text, cli.common.output.as_deref())?;
        Ok(out.status)
    });
    match result {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("majorate: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
