//! Command-line front end: `table`, `spectrum` and `verify`.

pub mod output;
pub mod suites;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{energy, potential, validate_params, wavefunction, Branch, Family, PotentialModel};
use crate::numerics::{discretize, eigen_near_shift, lowest_eigenvalues};
use output::{csv_row, manifest_path_for, write_atomic, Check, RunManifest};
use suites::{run_suite, spectrum_interval, Suite, SuiteContext, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "xspectra", version, about = "Rationally extended potentials and their spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the potential and selected states on a uniform grid.
    Table(TableArgs),
    /// Compare closed-form energies with finite-difference eigenvalues.
    Spectrum(SpectrumArgs),
    /// Run a verification suite and write a manifest.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Radial,
    Scarf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Sin,
    Cos,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "radial")]
    pub family: FamilyArg,
    /// Defaults: 2 (radial), 1.75 (scarf).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Scarf only; default 3.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Defaults: 1.75 (radial), 1.25 (scarf).
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "sin")]
    pub branch: BranchArg,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xmax: Option<f64>,
    #[arg(long, default_value_t = 801)]
    pub points: usize,
    /// Levels to tabulate, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub psi: Vec<usize>,
    #[arg(long, default_value = "table.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    /// Interior grid points of the finite-difference operator.
    #[arg(long, default_value_t = 4000)]
    pub grid: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xmax: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub tol_spectrum: f64,
    #[arg(long, default_value = "spectrum.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 6)]
    pub nmax: usize,
    #[arg(long, default_value_t = 4000)]
    pub grid: usize,
    #[arg(long, default_value = "verify.json")]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_orthogonality: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_pct: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_consistency: f64,
    #[arg(long, default_value_t = 1e-11)]
    pub tol_similarity: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol_pt: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub tol_pt_broken: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol_spectrum: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_reality: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_residual: f64,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(Vec<String>),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(_) | Error::Domain(_) | Error::Singularity { .. } | Error::Type(_) => {
                Failure::Usage(vec![e.to_string()])
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("cannot write {}: {e}", path.display()))
}

impl ModelArgs {
    fn build(&self) -> std::result::Result<PotentialModel, Failure> {
        let m = match self.family {
            FamilyArg::Radial => PotentialModel {
                family: Family::RadialExtended,
                a: self.a.unwrap_or(2.0),
                b: 0.0,
                k: self.k.unwrap_or(1.75),
                eps: self.eps,
                branch: Branch::Sin,
            },
            FamilyArg::Scarf => PotentialModel {
                family: Family::ScarfExtended,
                a: self.a.unwrap_or(1.75),
                b: self.b.unwrap_or(3.0),
                k: self.k.unwrap_or(1.25),
                eps: self.eps,
                branch: match self.branch {
                    BranchArg::Sin => Branch::Sin,
                    BranchArg::Cos => Branch::Cos,
                },
            },
        };
        validate_params(&m).map_err(|d| Failure::Usage(d.iter().map(ToString::to_string).collect()))?;
        Ok(m)
    }
}

fn record_model(m: &PotentialModel, manifest: &mut RunManifest) {
    let family = match m.family {
        Family::RadialExtended => "radial",
        Family::ScarfExtended => "scarf",
    };
    manifest.param("family", family);
    manifest.param("a", m.a);
    if m.family == Family::ScarfExtended {
        manifest.param("b", m.b);
        manifest.param("branch", if m.branch == Branch::Cos { "cos" } else { "sin" });
    }
    manifest.param("k", m.k);
    manifest.param("eps", m.eps);
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CHECK_FAILED;
        }
    };
    let outcome = pool.install(|| match &cli.command {
        Command::Table(a) => cmd_table(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Verify(a) => cmd_verify(a),
    });
    match outcome {
        Ok(manifest) => {
            for c in manifest.checks.iter().filter(|c| !c.passed()) {
                eprintln!("error: check {} failed: measured {:e}, tolerance {:e}", c.name, c.measured, c.tolerance);
            }
            if manifest.all_passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(Failure::Usage(lines)) => {
            for l in lines {
                eprintln!("error: {l}");
            }
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CHECK_FAILED
        }
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("XSPECTRA_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => eprintln!("warn: ignoring XSPECTRA_THREADS={raw:?}; expected a positive integer"),
        }
    }
    builder.build().map_err(|e| format!("cannot start worker threads: {e}"))
}

fn default_table_range(m: &PotentialModel) -> (f64, f64) {
    match (m.family, m.eps == 0.0) {
        (Family::RadialExtended, true) => (1e-3, 8.0),
        (Family::RadialExtended, false) => (-6.0, 6.0),
        (Family::ScarfExtended, true) => {
            let (lo, hi) = m.hermitian_domain();
            let pad = 1e-3 * (hi - lo);
            (lo + pad, hi - pad)
        }
        (Family::ScarfExtended, false) => {
            let w = std::f64::consts::PI / m.k.abs();
            (-w, w)
        }
    }
}

fn cmd_table(args: &TableArgs) -> std::result::Result<RunManifest, Failure> {
    let m = args.model.build()?;
    let (dlo, dhi) = default_table_range(&m);
    let (lo, hi) = (args.xmin.unwrap_or(dlo), args.xmax.unwrap_or(dhi));
    if args.points < 2 || !(lo < hi) {
        return Err(Failure::Usage(vec![format!(
            "need --points >= 2 and --xmin < --xmax, got {} points on [{lo}, {hi}]",
            args.points
        )]));
    }
    if let Some(n) = args.psi.iter().find(|n| **n == 0) {
        return Err(Failure::Usage(vec![format!("--psi levels start at 1, got {n}")]));
    }
    let step = (hi - lo) / (args.points - 1) as f64;
    let xs: Vec<f64> = (0..args.points).map(|i| if i + 1 == args.points { hi } else { lo + i as f64 * step }).collect();
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| -> Result<Vec<f64>> {
            let v = potential(&m, x)?;
            let mut row = vec![x, v.re, v.im];
            for &n in &args.psi {
                let psi = wavefunction(&m, n, x)?;
                row.extend([psi.re, psi.im, psi.norm_sqr()]);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut header = String::from("x,re_V,im_V");
    for n in &args.psi {
        header.push_str(&format!(",re_psi_{n},im_psi_{n},abs2_psi_{n}"));
    }
    header.push('\n');
    let mut body = header;
    let mut non_finite = 0usize;
    for row in &rows {
        non_finite += row.iter().filter(|v| !v.is_finite()).count();
        body.push_str(&csv_row(row));
    }

    let mut manifest = RunManifest::new("table");
    record_model(&m, &mut manifest);
    manifest.param("xmin", lo);
    manifest.param("xmax", hi);
    manifest.param("points", args.points);
    manifest.param("psi", args.psi.clone());
    manifest.checks.push(Check::at_most("table.non_finite_values", non_finite as f64, 0.0));
    finish(&args.output, &body, manifest)
}

fn finish(csv: &Path, body: &str, mut manifest: RunManifest) -> std::result::Result<RunManifest, Failure> {
    let json = manifest_path_for(csv);
    manifest.outputs = vec![csv.display().to_string(), json.display().to_string()];
    write_atomic(csv, body).map_err(|e| io_failure(csv, e))?;
    write_atomic(&json, &manifest.to_json()).map_err(|e| io_failure(&json, e))?;
    Ok(manifest)
}

fn cmd_spectrum(args: &SpectrumArgs) -> std::result::Result<RunManifest, Failure> {
    let m = args.model.build()?;
    if args.nmax == 0 {
        return Err(Failure::Usage(vec!["--nmax must be at least 1".into()]));
    }
    if m.eps != 0.0 && m.family == Family::ScarfExtended {
        return Err(Failure::Usage(vec![
            "the shifted Scarf states are not normalizable on the real line, so no spectrum is computed; \
             use `verify --suite residuals` or `--suite hermiticity`"
                .into(),
        ]));
    }
    let (dlo, dhi) = spectrum_interval(&m);
    let (lo, hi) = (args.xmin.unwrap_or(dlo), args.xmax.unwrap_or(dhi));
    let t = discretize(&m, lo, hi, args.grid)?;
    let complex = m.eps != 0.0;

    let mut manifest = RunManifest::new("spectrum");
    record_model(&m, &mut manifest);
    manifest.param("nmax", args.nmax);
    manifest.param("grid", args.grid);
    manifest.param("xmin", lo);
    manifest.param("xmax", hi);
    manifest.param("tol_spectrum", args.tol_spectrum);
    if complex {
        manifest.param("shift_offset", "E_n + 0.3i");
    }

    let mut body = String::from(if complex {
        "n,E_formula,E_numeric,abs_err,rel_err,im_lambda\n"
    } else {
        "n,E_formula,E_numeric,abs_err,rel_err\n"
    });
    let numeric: Vec<Option<Complex64>> = if complex {
        (1..=args.nmax)
            .into_par_iter()
            .map(|n| {
                let e = energy(&m, n).expect("n >= 1");
                match eigen_near_shift(&t, Complex64::new(e, 0.3), 500) {
                    Ok(p) => Some(p.value),
                    Err(err) => {
                        eprintln!("warn: level {n}: {err}");
                        None
                    }
                }
            })
            .collect()
    } else {
        lowest_eigenvalues(&t, args.nmax)?.into_iter().map(|e| Some(Complex64::new(e, 0.0))).collect()
    };
    for (i, lam) in numeric.iter().enumerate() {
        let n = i + 1;
        let exact = energy(&m, n)?;
        let lam = lam.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let abs_err = (lam.re - exact).abs();
        let rel_err = abs_err / exact.abs();
        let mut row = vec![n as f64, exact, lam.re, abs_err, rel_err];
        if complex {
            row.push(lam.im);
        }
        // the level index is written as an integer
        let line = csv_row(&row);
        let (_, rest) = line.split_once(',').expect("row has several fields");
        body.push_str(&format!("{n},{rest}"));
        manifest.checks.push(Check::at_most(format!("spectrum.rel_err_{n}"), rel_err, args.tol_spectrum));
    }
    finish(&args.output, &body, manifest)
}

fn cmd_verify(args: &VerifyArgs) -> std::result::Result<RunManifest, Failure> {
    let m = args.model.build()?;
    if args.nmax == 0 || args.grid < 100 {
        return Err(Failure::Usage(vec!["need --nmax >= 1 and --grid >= 100".into()]));
    }
    let tol = Tolerances {
        orthogonality: args.tol_orthogonality,
        pct: args.tol_pct,
        consistency: args.tol_consistency,
        similarity: args.tol_similarity,
        pt: args.tol_pt,
        pt_broken: args.tol_pt_broken,
        spectrum: args.tol_spectrum,
        reality: args.tol_reality,
        residual: args.tol_residual,
    };
    let mut manifest = RunManifest::new("verify");
    let suite_name = args.suite.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    manifest.param("suite", suite_name);
    record_model(&m, &mut manifest);
    manifest.param("nmax", args.nmax);
    manifest.param("grid", args.grid);
    tol.record(&mut manifest);
    let ctx = SuiteContext { model: m, nmax: args.nmax, grid_points: args.grid, tol };
    run_suite(args.suite, &ctx, &mut manifest)?;

    manifest.outputs = vec![args.output.display().to_string()];
    write_atomic(&args.output, &manifest.to_json()).map_err(|e| io_failure(&args.output, e))?;
    Ok(manifest)
}
