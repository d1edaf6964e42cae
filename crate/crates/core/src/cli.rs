//! Command line front end.
//!
//! Exit codes: 0 on success, 1 when a computation detected a numerical
//! problem (non-finite values, failed verification), 2 for bad input.

use crate::coeffs::{extract_window, ExtractGrid, KernelCoefficients};
use crate::green::SurfaceKernel;
use crate::mls::MatrixLaurentSeries;
use crate::pairing::{
    omega_derham, omega_quadrature, omega_series, reduce_cocycle, BumpProfile, PairingResult,
    QuadratureGrid,
};
use crate::verify::{run_suite, SuiteOptions};
use crate::{Complex64, Error, Result};
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};

const DEFAULTS: &str = "\
Defaults:
  --kernel torus        --tau 0,1 (square torus)
  --radius 0.35         extraction circles (coeffs)
  --radius 1.0          pairing contours (pair --method quadrature)
  --samples 256         extraction samples per circle
  --nodes 512           quadrature nodes per contour (pair)
  --nodes 48            radial nodes, angular = 2x (reduce)
  --nmax 8 --mmax 8     coefficient window half-widths
  --bump 0.12,0.35      annulus cutoff shell
  --grid-n 96           cells per axis (pair --method derham)
  --seed 7 --cases 100  randomized verification suites
  --tol 0 / 1e-6        coeffs zero-threshold / reduce bump agreement
Suite tolerances are pinned in the library and printed by `verify`.";

#[derive(Parser, Debug)]
#[command(
    name = "loopform",
    version,
    about = "Pairings of matrix loop cocycles against surface kernels",
    after_help = DEFAULTS
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// Surface kernel: sphere, torus, flat, or synthetic
    #[arg(long, default_value = "torus")]
    kernel: String,

    /// Torus modulus as "RE,IM", imaginary part positive
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    tau: String,

    /// Coefficient table JSON, required for the synthetic kernel
    #[arg(long)]
    table: Option<PathBuf>,
}

impl KernelArgs {
    fn build(&self) -> Result<SurfaceKernel> {
        match self.kernel.as_str() {
            "sphere" => Ok(SurfaceKernel::sphere()),
            "flat" => Ok(SurfaceKernel::flat()),
            "torus" => {
                let (re, im) = parse_pair(&self.tau, "tau")?;
                SurfaceKernel::torus(Complex64::new(re, im))
            }
            "synthetic" => {
                let path = self.table.as_ref().ok_or(Error::InvalidParameter {
                    name: "table",
                    reason: "the synthetic kernel needs --table <FILE>".into(),
                })?;
                Ok(SurfaceKernel::synthetic(load_json(path)?))
            }
            other => Err(Error::InvalidParameter {
                name: "kernel",
                reason: format!("unknown kernel '{other}'"),
            }),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract kernel coefficients over an index window
    Coeffs {
        #[command(flatten)]
        kernel: KernelArgs,

        /// Window spans z-exponents [-nmax, nmax]
        #[arg(long, default_value_t = 8)]
        nmax: i32,

        /// Window spans conjugate t-exponents [-mmax, mmax]
        #[arg(long, default_value_t = 8)]
        mmax: i32,

        /// Sampling circle radius for both variables
        #[arg(long, default_value_t = 0.35)]
        radius: f64,

        /// Samples per circle
        #[arg(long, default_value_t = 256)]
        samples: usize,

        /// Zero out entries with magnitude at or below this threshold
        #[arg(long, default_value_t = 0.0)]
        tol: f64,

        /// Write JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Pair two cocycles against a kernel
    Pair {
        #[command(flatten)]
        kernel: KernelArgs,

        /// First cocycle, as a JSON Laurent series file
        #[arg(long)]
        f1: PathBuf,

        /// Second cocycle
        #[arg(long)]
        f2: PathBuf,

        /// Route: series, quadrature, derham, or both (series + quadrature
        /// with their relative deviation)
        #[arg(long, default_value = "series")]
        method: String,

        /// Contour radius (quadrature route)
        #[arg(long, default_value_t = 1.0)]
        radius: f64,

        /// Angular nodes per contour (quadrature route)
        #[arg(long, default_value_t = 512)]
        nodes: usize,

        /// Annulus bump "R0,R1" (de Rham route)
        #[arg(long, default_value = "0.12,0.35")]
        bump: String,

        /// Cells per axis (de Rham route)
        #[arg(long, default_value_t = 96)]
        grid_n: usize,

        /// Write JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Smooth a cocycle against the kernel and evaluate the reduced field
    Reduce {
        #[command(flatten)]
        kernel: KernelArgs,

        /// Cocycle to reduce, as a JSON Laurent series file
        #[arg(long)]
        f1: PathBuf,

        /// Annulus bump "R0,R1"
        #[arg(long, default_value = "0.12,0.35")]
        bump: String,

        /// Smoothness order of the bump profile
        #[arg(long, default_value_t = 2)]
        bump_order: usize,

        /// Second bump "R0,R1": rerun and report the difference, which must
        /// stay within --tol
        #[arg(long)]
        bump2: Option<String>,

        /// Largest allowed entrywise difference between the two bump runs
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,

        /// Evaluation point "RE,IM"; repeat for several targets
        #[arg(long = "target", required = true, allow_hyphen_values = true)]
        targets: Vec<String>,

        /// Radial quadrature nodes; angular nodes are twice this
        #[arg(long, default_value_t = 48)]
        nodes: usize,

        /// Write JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run built-in verification suites
    Verify {
        /// Suite name, or "all"
        #[arg(default_value = "all")]
        suite: String,

        /// Torus modulus "RE,IM" for the torus-based suites
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        tau: String,

        /// Case count for the randomized oracle suite
        #[arg(long, default_value_t = 100)]
        cases: usize,

        /// Seed for the randomized suites
        #[arg(long, default_value_t = 7)]
        seed: u64,

        /// Also write the results as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    init_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// `LOOPFORM_THREADS=0` or unset keeps the library's automatic pool size.
fn init_threads() {
    if let Ok(raw) = std::env::var("LOOPFORM_THREADS") {
        match raw.parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            Err(_) => eprintln!("warning: ignoring LOOPFORM_THREADS={raw:?}"),
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Coeffs {
            kernel,
            nmax,
            mmax,
            radius,
            samples,
            tol,
            out,
        } => {
            let kern = kernel.build()?;
            let grid = ExtractGrid {
                radius_z: radius,
                radius_t: radius,
                samples,
            };
            let mut table = extract_window(&kern, -nmax, nmax, -mmax, mmax, &grid)?;
            if tol > 0.0 {
                threshold(&mut table, tol);
            }
            decay_summary(&table);
            emit(&table, out.as_deref())?;
            Ok(0)
        }

        Command::Pair {
            kernel,
            f1,
            f2,
            method,
            radius,
            nodes,
            bump,
            grid_n,
            out,
        } => {
            let kern = kernel.build()?;
            let f1: MatrixLaurentSeries = load_json(&f1)?;
            let f2: MatrixLaurentSeries = load_json(&f2)?;
            match method.as_str() {
                "series" => {
                    let table = series_table(&kern, &f1, &f2)?;
                    emit(&omega_series(&f1, &f2, &table)?, out.as_deref())?;
                }
                "quadrature" => {
                    let grid = QuadratureGrid { nodes, radius };
                    emit(&omega_quadrature(&f1, &f2, &kern, &grid)?, out.as_deref())?;
                }
                "derham" => {
                    let (r0, r1) = parse_pair(&bump, "bump")?;
                    let result = omega_derham(&f1, &f2, &kern, &BumpProfile::new(r0, r1)?, grid_n)?;
                    emit(&result, out.as_deref())?;
                }
                "both" => {
                    let table = series_table(&kern, &f1, &f2)?;
                    let series = omega_series(&f1, &f2, &table)?;
                    let grid = QuadratureGrid { nodes, radius };
                    let quadrature = omega_quadrature(&f1, &f2, &kern, &grid)?;
                    let relative_deviation = (series.complex - quadrature.complex).norm()
                        / series.complex.norm().max(1.0);
                    let both = BothRoutes {
                        series,
                        quadrature,
                        relative_deviation,
                    };
                    emit(&both, out.as_deref())?;
                }
                other => {
                    return Err(Error::InvalidParameter {
                        name: "method",
                        reason: format!("unknown method '{other}'"),
                    })
                }
            }
            Ok(0)
        }

        Command::Reduce {
            kernel,
            f1,
            bump,
            bump_order,
            bump2,
            tol,
            targets,
            nodes,
            out,
        } => {
            let kern = kernel.build()?;
            let f: MatrixLaurentSeries = load_json(&f1)?;
            let (r0, r1) = parse_pair(&bump, "bump")?;
            let profile = BumpProfile::with_order(r0, r1, bump_order)?;
            let points = targets
                .iter()
                .map(|t| parse_pair(t, "target").map(|(re, im)| Complex64::new(re, im)))
                .collect::<Result<Vec<_>>>()?;
            let reduced = reduce_cocycle(&f, &kern, &profile, &points, nodes, 2 * nodes)?;

            let mut code = 0;
            if let Some(second) = bump2 {
                let (s0, s1) = parse_pair(&second, "bump2")?;
                let other = BumpProfile::with_order(s0, s1, bump_order)?;
                let again = reduce_cocycle(&f, &kern, &other, &points, nodes, 2 * nodes)?;
                let mut diff = 0.0f64;
                for (a, b) in reduced.values.iter().zip(again.values.iter()) {
                    for (x, y) in a.entries().iter().zip(b.entries()) {
                        diff = diff.max((x - y).norm());
                    }
                }
                eprintln!(
                    "bump agreement: largest entrywise difference {diff:.3e} (tol {tol:.1e})"
                );
                if diff.is_nan() || diff > tol {
                    code = 1;
                }
            }
            emit(&reduced, out.as_deref())?;
            Ok(code)
        }

        Command::Verify {
            suite,
            tau,
            cases,
            seed,
            out,
        } => {
            let (re, im) = parse_pair(&tau, "tau")?;
            let opts = SuiteOptions {
                seed,
                tau: Complex64::new(re, im),
                cases,
            };
            let results = run_suite(&suite, &opts)?;
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!(
                "{} of {} checks passed",
                results.len() - failed,
                results.len()
            );
            if let Some(path) = out {
                emit(&results, Some(&path))?;
            }
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}

/// Output of `pair --method both`: the two routes side by side.
#[derive(Debug, serde::Serialize)]
struct BothRoutes {
    series: PairingResult,
    quadrature: PairingResult,
    relative_deviation: f64,
}

/// Two or three stderr lines condensing [`KernelCoefficients::decay_report`].
fn decay_summary(table: &KernelCoefficients) {
    let report = table.decay_report();
    let peak = report
        .degrees
        .iter()
        .max_by(|a, b| a.max_abs.total_cmp(&b.max_abs));
    match peak {
        Some(p) if p.max_abs > 0.0 => {
            eprintln!(
                "decay: peak |a| {:.3e} on antidiagonal n+m = {}",
                p.max_abs, p.degree
            );
            match (report.rate, report.tail_bound) {
                (Some(rate), Some(tail)) => {
                    eprintln!("decay: geometric rate {rate:.3e} per degree, tail bound {tail:.3e}")
                }
                (Some(rate), None) => {
                    eprintln!("decay: antidiagonals grow (rate {rate:.3e}), no tail bound")
                }
                _ => eprintln!("decay: too few populated antidiagonals for a rate"),
            }
        }
        _ => eprintln!("decay: all window entries are zero"),
    }
}

/// Table for the series route: handed over verbatim for a synthetic kernel,
/// otherwise extracted over exactly the window the two series can touch.
fn series_table(
    kernel: &SurfaceKernel,
    f1: &MatrixLaurentSeries,
    f2: &MatrixLaurentSeries,
) -> Result<KernelCoefficients> {
    if let SurfaceKernel::Synthetic(table) = kernel {
        return Ok(table.clone());
    }
    extract_window(
        kernel,
        f1.lead() + 1,
        f1.max_exponent() + 1,
        f2.lead() + 1,
        f2.max_exponent() + 1,
        &ExtractGrid::default(),
    )
}

fn threshold(table: &mut KernelCoefficients, tol: f64) {
    for n in table.nmin()..=table.nmax() {
        for m in table.mmin()..=table.mmax() {
            if table.get(n, m).norm() <= tol {
                table.set(n, m, Complex64::new(0.0, 0.0));
            }
        }
    }
}

fn parse_pair(s: &str, name: &'static str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(a), Ok(b)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            return Ok((a, b));
        }
    }
    Err(Error::InvalidParameter {
        name,
        reason: format!("expected 'RE,IM', got '{s}'"),
    })
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })
}

fn emit<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: out
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "<stdout>".into()),
        source: e,
    })?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
