//! Command-line front end. Every command that writes a file prints a
//! one-line summary to standard output.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::acceptance::{run_all, run_one, AcceptanceOptions, CRITERIA};
use crate::decay::{decay_curve, time_grid, DecayOptions};
use crate::error::{Result, WeylError};
use crate::io::{fmt_f64, write_csv, MatrixRecord};
use crate::ncspace::{weyl_element_table, OperatorMatrix};
use crate::quadrature::PolarScheme;
use crate::spectral::{eigencheck, EigenKind, SpectralPoint};
use crate::specfun::EpsParam;
use crate::symbol::Symbol;
use crate::weyl::{weyl_forward, weyl_inverse};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

fn parse_eps(s: &str) -> std::result::Result<EpsParam, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    EpsParam::new(v).map_err(|_| format!("eps must be > 0, got {s}"))
}

fn parse_size(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("not a non-negative integer: {s}"))?;
    if v < 2 {
        return Err(format!("N must be >= 2, got {v}"));
    }
    Ok(v)
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(v >= 0.0) || !v.is_finite() {
        return Err(format!("alpha must be >= 0, got {s}"));
    }
    Ok(v)
}

fn parse_nonneg(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(v >= 0.0) || !v.is_finite() {
        return Err(format!("must be finite and >= 0, got {s}"));
    }
    Ok(v)
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(format!("must be finite and > 0, got {s}"));
    }
    Ok(v)
}

fn parse_criterion(s: &str) -> std::result::Result<u32, String> {
    let v: u32 = s.parse().map_err(|_| format!("not a criterion id: {s}"))?;
    if !CRITERIA.iter().any(|c| c.0 == v) {
        return Err(format!("criterion ids are 1..=10, got {v}"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "weylkit", version, about = "Weyl transform numerics in the Hermite basis")]
pub struct CommandSpec {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectralKind {
    Laplacian,
    Rotation,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Forward transform of a symbol into an operator matrix (JSON).
    Transform {
        /// Inline symbol, e.g. "e:0,0", "2*gauss:1 + omega:2,1".
        #[arg(long, conflicts_with = "symbol_file", required_unless_present = "symbol_file")]
        symbol: Option<String>,
        /// JSON symbol description.
        #[arg(long)]
        symbol_file: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true, default_value = "1", value_parser = parse_eps)]
        eps: EpsParam,
        #[arg(short = 'N', long = "size", default_value = "32", value_parser = parse_size)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the inverse transform of an operator matrix on a square grid (CSV).
    Inverse {
        #[arg(long = "in")]
        input: PathBuf,
        /// Half-width of the grid.
        #[arg(long, default_value = "4", value_parser = parse_positive)]
        extent: f64,
        #[arg(long, default_value = "41", value_parser = parse_size)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weyl-operator matrix elements on a frequency grid (CSV).
    BasisTable {
        #[arg(long, allow_negative_numbers = true, default_value = "1", value_parser = parse_eps)]
        eps: EpsParam,
        #[arg(short = 'N', long = "size", default_value = "32", value_parser = parse_size)]
        size: usize,
        #[arg(long, default_value = "3", value_parser = parse_positive)]
        extent: f64,
        #[arg(long, default_value = "9", value_parser = parse_size)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Eigen-relation residuals of a spectral vector against truncation size (CSV).
    Spectral {
        #[arg(long, value_enum, default_value = "laplacian")]
        kind: SpectralKind,
        #[arg(long, allow_negative_numbers = true, value_parser = parse_nonneg)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true, default_value = "0")]
        j: i64,
        #[arg(long, allow_negative_numbers = true, default_value = "1", value_parser = parse_eps)]
        eps: EpsParam,
        /// Comma-separated truncation sizes.
        #[arg(long, value_delimiter = ',', default_value = "32,64,128,200", value_parser = parse_size)]
        sizes: Vec<usize>,
        /// Residual above this is reported as a numerical failure.
        #[arg(long, default_value = "1e-9", value_parser = parse_positive)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted-norm decay curve of the Jacobi propagator (CSV).
    Decay {
        #[arg(long, allow_negative_numbers = true, value_parser = parse_alpha)]
        alpha: f64,
        #[arg(long, default_value = "5", value_parser = parse_nonneg)]
        tmax: f64,
        #[arg(long, default_value = "21", value_parser = parse_size)]
        steps: usize,
        #[arg(long, default_value = "256", value_parser = parse_size)]
        n_start: usize,
        #[arg(long, default_value = "4096", value_parser = parse_size)]
        n_max: usize,
        #[arg(long, default_value = "32", value_parser = parse_size)]
        window: usize,
        #[arg(long, default_value = "1e-8", value_parser = parse_positive)]
        tol: f64,
        #[arg(long, default_value = "decay.csv")]
        out: PathBuf,
    },
    /// Run the acceptance checks.
    Selftest {
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Inject an error into one check; the run must then fail.
        #[arg(long, value_parser = parse_criterion)]
        perturb: Option<u32>,
        /// Run a single check.
        #[arg(long, value_parser = parse_criterion)]
        only: Option<u32>,
    },
}

/// Usage failure carrying clap's rendered message.
#[derive(Debug)]
pub struct UsageError(pub clap::Error);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0.render())
    }
}

pub fn parse_args<I, S>(argv: I) -> std::result::Result<CommandSpec, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("weylkit")).chain(argv.into_iter().map(Into::into));
    CommandSpec::try_parse_from(args).map_err(UsageError)
}

pub fn exit_code(err: &WeylError) -> i32 {
    match err {
        WeylError::Io { .. } | WeylError::Json { .. } | WeylError::Csv { .. } => EXIT_IO,
        WeylError::InvalidParameter { .. } | WeylError::Symbol(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn grid(extent: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| -extent + 2.0 * extent * k as f64 / (points - 1) as f64)
        .collect()
}

fn transform(symbol: &Symbol, eps: EpsParam, size: usize, out: &Path) -> Result<()> {
    let f = symbol.to_function(eps)?;
    // the analysis integrand decays like e^{-(1/ε + a/2)ρ²}
    let scale = 0.5 * symbol.slowest_decay(eps) + 1.0 / eps.get();
    let angular = (4 * size).max(256);
    let scheme = PolarScheme::new(128, angular, scale)?;
    let a = weyl_forward(&f, size, eps, &scheme)?;
    MatrixRecord::from(&a).write(out)?;
    let peak = a.a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("wrote {size}x{size} matrix to {} (max |entry| {})", out.display(), fmt_f64(peak));
    Ok(())
}

fn inverse(input: &Path, extent: f64, points: usize, out: &Path) -> Result<()> {
    let a = OperatorMatrix::try_from(&MatrixRecord::read(input)?)?;
    let f = weyl_inverse(&a);
    let g = grid(extent, points);
    let rows: Vec<Vec<f64>> = g
        .iter()
        .flat_map(|&x| g.iter().map(move |&y| (x, y)))
        .map(|(x, y)| {
            let v = f.eval(x, y);
            vec![x, y, v.re, v.im]
        })
        .collect();
    write_csv(out, &["x", "y", "re", "im"], &rows)?;
    let peak = rows.iter().map(|r| r[2].hypot(r[3])).fold(0.0, f64::max);
    println!("wrote {} rows to {} (max |f| {})", rows.len(), out.display(), fmt_f64(peak));
    Ok(())
}

fn basis_table(eps: EpsParam, size: usize, extent: f64, points: usize, out: &Path) -> Result<()> {
    let g = grid(extent, points);
    let mut rows = Vec::new();
    for &xx in &g {
        for &xy in &g {
            let t = weyl_element_table(size, xx, xy, eps);
            for (m, row) in t.iter().enumerate() {
                for (n, v) in row.iter().enumerate() {
                    rows.push(vec![m as f64, n as f64, xx, xy, v.re, v.im]);
                }
            }
        }
    }
    write_csv(out, &["m", "n", "xi_x", "xi_y", "re", "im"], &rows)?;
    println!("wrote {} rows to {} (N={size}, eps={})", rows.len(), out.display(), eps.get());
    Ok(())
}

fn spectral(kind: SpectralKind, pt: SpectralPoint, eps: EpsParam, sizes: &[usize], tol: f64, out: &Path) -> Result<bool> {
    let kind = match kind {
        SpectralKind::Laplacian => EigenKind::Laplacian,
        SpectralKind::Rotation => EigenKind::Rotation,
    };
    let reports = sizes
        .iter()
        .map(|&n| eigencheck(kind, pt, n, eps))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| vec![r.size as f64, r.residual, r.fitted.re, r.expected, r.alternative])
        .collect();
    write_csv(out, &["N", "residual", "fitted", "expected", "alternative"], &rows)?;
    let worst = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
    println!("wrote {} rows to {} (max residual {})", rows.len(), out.display(), fmt_f64(worst));
    if let Some(last) = reports.last() {
        println!("{last}");
    }
    Ok(worst <= tol)
}

fn decay(alpha: f64, times: &[f64], opts: DecayOptions, out: &Path) -> Result<()> {
    let c = decay_curve(alpha, times, opts)?;
    write_csv(out, &["t", "measured", "reference", "rel_deviation"], &c.rows())?;
    println!(
        "wrote {} rows to {} (N={}, max rel deviation {})",
        c.times.len(),
        out.display(),
        c.n,
        fmt_f64(c.max_rel_dev)
    );
    Ok(())
}

fn selftest(opts: AcceptanceOptions, only: Option<u32>) -> bool {
    let results = match only {
        Some(id) => vec![run_one(id, opts)],
        None => run_all(opts),
    };
    for r in &results {
        println!("{r}");
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("selftest: {passed}/{} passed", results.len());
    passed == results.len()
}

fn report(err: &WeylError) -> i32 {
    eprintln!("error: {err}");
    exit_code(err)
}

pub fn run(spec: CommandSpec) -> i32 {
    let outcome: Result<bool> = match spec.command {
        Command::Transform {
            symbol,
            symbol_file,
            eps,
            size,
            out,
        } => {
            let sym = match (symbol, symbol_file) {
                (Some(s), _) => Symbol::parse(&s),
                (None, Some(p)) => Symbol::from_json_file(&p),
                (None, None) => Err(WeylError::Symbol("no symbol given".into())),
            };
            sym.and_then(|s| transform(&s, eps, size, &out)).map(|_| true)
        }
        Command::Inverse {
            input,
            extent,
            points,
            out,
        } => inverse(&input, extent, points, &out).map(|_| true),
        Command::BasisTable {
            eps,
            size,
            extent,
            points,
            out,
        } => basis_table(eps, size, extent, points, &out).map(|_| true),
        Command::Spectral {
            kind,
            lambda,
            j,
            eps,
            sizes,
            tol,
            out,
        } => SpectralPoint::new(lambda, j).and_then(|pt| spectral(kind, pt, eps, &sizes, tol, &out)),
        Command::Decay {
            alpha,
            tmax,
            steps,
            n_start,
            n_max,
            window,
            tol,
            out,
        } => {
            let opts = DecayOptions {
                window,
                n_start,
                n_max,
                tol,
            };
            decay(alpha, &time_grid(tmax, steps), opts, &out).map(|_| true)
        }
        Command::Selftest { seed, perturb, only } => Ok(selftest(AcceptanceOptions { seed, perturb }, only)),
    };
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_NUMERICAL,
        Err(e) => report(&e),
    }
}

/// Applies `WEYLKIT_THREADS` (0 or unset = automatic) to the global pool.
pub fn configure_threads() {
    if let Some(n) = std::env::var("WEYLKIT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Full entry point: parse, run, and map to an exit code.
pub fn main_with_args<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    configure_threads();
    match parse_args(argv) {
        Ok(spec) => run(spec),
        Err(UsageError(e)) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        EXIT_OK
                    }
                }
                _ => EXIT_USAGE,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let spec = parse_args(["decay", "--alpha", "0", "--tmax", "5", "--steps", "21", "--out", "d.csv"]).unwrap();
        match spec.command {
            Command::Decay { alpha, tmax, steps, .. } => {
                assert_eq!((alpha, tmax, steps), (0.0, 5.0, 21));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_args(["decay", "--alpha", "-1"]).unwrap_err();
        assert!(err.to_string().contains("--alpha"), "{err}");
        assert!(parse_args(["frobnicate"]).is_err());
        assert!(parse_args(["transform", "--symbol", "e:0,0", "--eps", "0", "--out", "a.json"])
            .unwrap_err()
            .to_string()
            .contains("--eps"));
        assert!(parse_args(["transform", "--symbol", "e:0,0", "-N", "1", "--out", "a.json"]).is_err());
        assert!(parse_args(["selftest", "--perturb", "11"]).is_err());
        let spec = parse_args(["spectral", "--lambda", "2", "--j", "-3", "--sizes", "16,32", "--out", "s.csv"]).unwrap();
        assert!(matches!(spec.command, Command::Spectral { j: -3, ref sizes, .. } if sizes == &vec![16, 32]));
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&WeylError::Symbol("x".into())), EXIT_USAGE);
        assert_eq!(
            exit_code(&WeylError::TruncationNoConvergence {
                n: 1,
                change: 1.0,
                tol: 0.1
            }),
            EXIT_NUMERICAL
        );
    }
}
