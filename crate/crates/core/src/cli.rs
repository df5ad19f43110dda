//! The `oped` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 numerical precondition
//! violated, 3 verification failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::completion::complete_coefficients;
use crate::io::{
    compute_metrics, metrics_json, parse_sinogram, reference_image, report_csv, reports_json,
    sinogram_bytes, write_atomic, write_image,
};
use crate::phantom::{add_noise, sample_sinogram, AngleSet, EllipsePhantom, SinogramGeometry};
use crate::spectral::{condition_table, TableConvention, SWEEP_GRID};
use crate::transform::{oped_evaluate, sine_coefficients, FilterSpec};
use crate::verify::{run_suite, Suite};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "oped",
    version,
    about = "OPED reconstruction with limited-angle completion"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a phantom's Radon transform and write a sinogram file
    Sinogram(SinogramArgs),
    /// Reconstruct an image from a sinogram file
    Reconstruct(ReconstructArgs),
    /// Condition numbers of the completion matrices
    CondReport(CondReportArgs),
    /// Run a built-in verification suite
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SinogramArgs {
    /// `shepp-logan`, `disk`, or a file of ellipses (`cx cy a b tilt density` per line)
    #[arg(long, default_value = "shepp-logan")]
    phantom: String,
    /// Number of views; even N spans a half circle, odd N the full circle
    #[arg(long = "N", default_value_t = 502)]
    n: usize,
    /// Rays per view [default: N/2]
    #[arg(long = "Nd")]
    n_d: Option<usize>,
    /// Number of leading views to drop
    #[arg(long, default_value_t = 0)]
    r: usize,
    /// Standard deviation of additive Gaussian noise
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FilterMode {
    Plateau,
    Bump,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Filter value at the highest frequency (plateau mode)
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = FilterMode::Plateau)]
    filter: FilterMode,
    /// Smoothness order of the bump filter
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// Output image is grid x grid pixels
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// 16-bit PGM output
    #[arg(long)]
    out: PathBuf,
    /// Error metrics against `--phantom`, as JSON
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Reference phantom for the metrics
    #[arg(long, default_value = "shepp-logan")]
    phantom: String,
    /// Density mapped to black [default: image minimum]
    #[arg(long)]
    window_lo: Option<f64>,
    /// Density mapped to white [default: image maximum]
    #[arg(long)]
    window_hi: Option<f64>,
}

#[derive(Args, Debug)]
struct CondReportArgs {
    #[arg(long = "N", default_value_t = 502)]
    n: usize,
    #[arg(long, default_value_t = 21)]
    r: usize,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    /// Use the built-in (tau, beta) grid instead of --tau/--beta
    #[arg(long)]
    sweep: bool,
    /// Per-frequency CSV; a JSON summary is written next to it
    #[arg(long)]
    out: Option<PathBuf>,
    /// System size N/2 (`half`) or N (`full`)
    #[arg(long, default_value = "half")]
    table_convention: String,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long = "N")]
    n: Option<usize>,
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Sinogram(a) => cmd_sinogram(&a).map(|()| EXIT_OK),
        Command::Reconstruct(a) => cmd_reconstruct(&a).map(|()| EXIT_OK),
        Command::CondReport(a) => cmd_cond_report(&a).map(|()| EXIT_OK),
        Command::Verify(a) => cmd_verify(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn load_phantom(spec: &str) -> Result<EllipsePhantom> {
    match spec {
        "shepp-logan" => Ok(EllipsePhantom::shepp_logan()),
        "disk" => Ok(EllipsePhantom::unit_disk()),
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::InvalidArgument(format!("unknown phantom `{path}`: {e}")))?;
            text.parse()
        }
    }
}

fn cmd_sinogram(a: &SinogramArgs) -> Result<()> {
    let phantom = load_phantom(&a.phantom)?;
    let angles = if a.n.is_multiple_of(2) {
        AngleSet::EvenHalfCircle
    } else {
        AngleSet::OddFullCircle
    };
    let n_d = a.n_d.unwrap_or((a.n / 2).max(1));
    let geometry = SinogramGeometry::new(a.n, n_d, a.r, angles)?;
    if !(a.sigma >= 0.0 && a.sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be a finite non-negative number, got {}",
            a.sigma
        )));
    }
    let mut sinogram = sample_sinogram(&phantom, &geometry);
    if a.sigma > 0.0 {
        sinogram = add_noise(&sinogram, a.sigma, a.seed)?;
    }
    write_atomic(&a.out, &sinogram_bytes(&sinogram))?;
    println!(
        "wrote {}: N={} Nd={} r={} views stored={} coverage={:.2} deg",
        a.out.display(),
        geometry.n(),
        geometry.n_d(),
        geometry.r(),
        geometry.views() - geometry.r(),
        geometry.coverage_degrees()
    );
    Ok(())
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<()> {
    if a.grid == 0 {
        return Err(Error::InvalidArgument("grid must be positive".into()));
    }
    let filter = match a.filter {
        FilterMode::Plateau => FilterSpec::plateau(a.tau, a.beta)?,
        FilterMode::Bump => FilterSpec::bump(a.tau, a.order)?,
    };
    // Resolve the reference before the expensive part so a bad path fails early.
    let reference = a
        .metrics
        .as_ref()
        .map(|_| load_phantom(&a.phantom))
        .transpose()?;
    let sinogram = parse_sinogram(&fs::read(&a.input)?)?;
    let geometry = *sinogram.geometry();

    let mut set = sine_coefficients(&sinogram);
    if geometry.r() > 0 {
        let completion = complete_coefficients(&set, &filter)?;
        let weak: Vec<usize> = completion.ill_conditioned().map(|f| f.k).collect();
        if !weak.is_empty() {
            eprintln!(
                "warning: ill-conditioned systems at k = {weak:?}; solved by spectral truncation"
            );
        }
        set = completion.coefficients;
    }
    let image = oped_evaluate(&set, &filter, a.grid)?;

    let (lo, hi) = window(&image, a.window_lo, a.window_hi);
    write_atomic(&a.out, &write_image(&image, lo, hi)?)?;
    println!(
        "wrote {}: {}x{} from N={} r={} ({filter})",
        a.out.display(),
        a.grid,
        a.grid,
        geometry.n(),
        geometry.r()
    );

    if let (Some(path), Some(phantom)) = (&a.metrics, reference) {
        let metrics = compute_metrics(&image, &reference_image(&phantom, a.grid))?;
        write_atomic(path, metrics_json(&metrics).as_bytes())?;
        println!(
            "rmse={:e} rel_l2={:e} max_abs={:e}",
            metrics.rmse_inside_disk, metrics.rel_l2_inside_disk, metrics.max_abs_inside_disk
        );
    }
    Ok(())
}

/// Explicit bounds win; open bounds follow the image range. A constant
/// image with both bounds open gets a unit-wide window.
fn window(image: &crate::transform::ReconImage, lo: Option<f64>, hi: Option<f64>) -> (f64, f64) {
    let (min, max) = image
        .masked()
        .map(|(_, _, v)| v)
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    let (min, max) = if min <= max { (min, max) } else { (0.0, 1.0) };
    match (lo, hi) {
        (None, None) if max <= min => (min, min + 1.0),
        _ => (lo.unwrap_or(min), hi.unwrap_or(max)),
    }
}

fn cmd_cond_report(a: &CondReportArgs) -> Result<()> {
    let convention: TableConvention = a.table_convention.parse()?;
    let params: Vec<(f64, f64)> = if a.sweep {
        SWEEP_GRID.to_vec()
    } else {
        vec![(a.tau, a.beta)]
    };
    let reports = condition_table(a.n, a.r, &params, convention)?;

    println!(
        "N={} r={} coverage={:.2} deg",
        a.n, a.r, reports[0].coverage_degrees
    );
    println!("{:>6} {:>6} {:>14} {:>6}", "tau", "beta", "max_cond", "k");
    for report in &reports {
        let k = report.argmax_k.map_or("-".to_string(), |k| k.to_string());
        println!(
            "{:>6} {:>6} {:>14.6e} {:>6}",
            report.tau,
            report.beta,
            report.max_condition.value(),
            k
        );
        for failure in report
            .per_k
            .iter()
            .filter_map(|c| c.error.as_ref().map(|e| (c.k, e)))
        {
            eprintln!(
                "warning: tau={} beta={} k={}: {}",
                report.tau, report.beta, failure.0, failure.1
            );
        }
    }
    if let Some(out) = &a.out {
        write_atomic(out, report_csv(&reports).as_bytes())?;
        write_atomic(&summary_path(out), reports_json(&reports).as_bytes())?;
    }
    Ok(())
}

/// `report.csv` → `report.json`.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let suite: Suite = a.suite.parse()?;
    let checks = run_suite(suite, a.n)?;
    for check in &checks {
        println!("{check}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    );
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
}
