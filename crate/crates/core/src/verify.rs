//! Self-check suites: the spectral theorems for the completion matrices,
//! view-parity identities, and polynomial preservation.

use std::fmt;
use std::str::FromStr;

use crate::completion::{build_matrix, CompletionLayout, MatrixKind};
use crate::phantom::{
    sample_sinogram, AngleSet, EllipsePhantom, PolynomialImage, SinogramGeometry,
};
use crate::spectral::symmetric_eigenvalues;
use crate::transform::{
    half_circle_symmetry_residual, oped_evaluate, parity_equivalence, sine_coefficients, FilterSpec,
};
use crate::{Error, Result};

/// Eigenvalues within this distance of a target count as equal to it.
pub const EIGEN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Theorems,
    Parity,
    Preservation,
}

impl Suite {
    pub fn default_n(self) -> usize {
        match self {
            Suite::Theorems => 16,
            Suite::Parity => 9,
            Suite::Preservation => 64,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorems" => Ok(Suite::Theorems),
            "parity" => Ok(Suite::Parity),
            "preservation" => Ok(Suite::Preservation),
            other => Err(Error::InvalidArgument(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {}: {}", self.name, self.detail)
    }
}

pub fn run_suite(suite: Suite, n: Option<usize>) -> Result<Vec<Check>> {
    let n = n.unwrap_or(suite.default_n());
    match suite {
        Suite::Theorems => theorem_checks(n),
        Suite::Parity => parity_checks(n),
        Suite::Preservation => preservation_checks(n),
    }
}

fn spectrum(
    kind: MatrixKind,
    k: usize,
    r: usize,
    layout: &CompletionLayout,
    f: Option<&FilterSpec>,
) -> Result<Vec<f64>> {
    symmetric_eigenvalues(&build_matrix(kind, k, r, layout, f)?.entries)
}

/// Largest `r` for which the `r` leading views `2πμ/n` point in distinct
/// directions modulo π. Beyond it, on even `n`, the spectral statements
/// about `M_{k,r}` no longer hold.
pub fn distinct_direction_limit(n: usize) -> usize {
    if n % 2 == 1 {
        n - 1
    } else {
        n / 2
    }
}

/// Eigenvalue statements about `M_{k,r}` for one `(k, r)`: spectrum in
/// `[0, 1]`, positive definite iff `k + r < n`, and zero with multiplicity
/// `k + r + 1 - n` otherwise. Returns the failed statements.
pub fn m_spectrum_violations(n: usize, k: usize, r: usize) -> Result<Vec<String>> {
    let layout = CompletionLayout::full_circle(n)?;
    let mu = spectrum(MatrixKind::M, k, r, &layout, None)?;
    let mut failed = Vec::new();
    if mu
        .iter()
        .any(|&v| !(-EIGEN_TOL..=1.0 + EIGEN_TOL).contains(&v))
    {
        failed.push(format!(
            "k={k} r={r}: spectrum [{:.3e}, {:.3e}] leaves [0, 1]",
            mu[0],
            mu[r - 1]
        ));
    }
    if (mu[0] > EIGEN_TOL) != (k + r < n) {
        failed.push(format!("k={k} r={r}: definiteness wrong (min {:e})", mu[0]));
    }
    if k + r >= n {
        let zeros = mu.iter().filter(|v| v.abs() <= EIGEN_TOL).count();
        if zeros != k + r + 1 - n {
            failed.push(format!(
                "k={k} r={r}: {zeros} zero eigenvalues, expected {}",
                k + r + 1 - n
            ));
        }
    }
    Ok(failed)
}

/// Spectral facts about `M_{k,r}` and `A_{k,r}` on the full circle of `n`
/// views, for `r` up to [`distinct_direction_limit`].
pub fn theorem_checks(n: usize) -> Result<Vec<Check>> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "theorem suite needs N >= 4, got {n}"
        )));
    }
    let layout = CompletionLayout::full_circle(n)?;
    let r_max = distinct_direction_limit(n);
    let mut checks = Vec::new();

    let mut failures = Vec::new();
    for k in 0..n {
        for r in 1..=r_max {
            failures.extend(m_spectrum_violations(n, k, r)?);
        }
    }
    checks.push(Check::new(
        "M spectrum in [0, 1], definite iff k + r < N, zero multiplicity k + r + 1 - N",
        failures.is_empty(),
        if failures.is_empty() {
            format!("holds for k < {n}, 1 <= r <= {r_max}")
        } else {
            failures.join("; ")
        },
    ));

    // M_{N-l-2, r} = B_{l, r} / N
    let mut worst: f64 = 0.0;
    for l in 0..=n - 2 {
        for r in 1..=r_max {
            let m = build_matrix(MatrixKind::M, n - l - 2, r, &layout, None)?;
            let b = build_matrix(MatrixKind::B, l, r, &layout, None)?;
            for i in 0..r {
                for j in 0..r {
                    worst = worst.max((m.entries[(i, j)] - b.entries[(i, j)] / n as f64).abs());
                }
            }
        }
    }
    checks.push(Check::new(
        "M_{N-l-2} = B_l / N",
        worst <= 1e-12,
        format!("max deviation {worst:e} for r <= {r_max}"),
    ));

    // A with a filter that reaches 1 at τ = 1/2.
    let filter = FilterSpec::plateau(0.5, 0.0)?;
    let r_bound = ((1.0 - filter.tau()) * n as f64).ceil() as usize;
    let mut definite_below = true;
    let mut worst_min = f64::INFINITY;
    for r in 1..r_bound.min(n) {
        for k in 0..n {
            let mu = spectrum(MatrixKind::A, k, r, &layout, Some(&filter))?;
            worst_min = worst_min.min(mu[0]);
            definite_below &= mu[0] > EIGEN_TOL;
        }
    }
    checks.push(Check::new(
        "A positive definite when tau < 1 - r/N",
        definite_below,
        format!("r < {r_bound}: smallest eigenvalue {worst_min:e}"),
    ));
    if r_bound < n && (1.0 - filter.tau()) * n as f64 == r_bound as f64 {
        let r = r_bound;
        let mut smallest = f64::INFINITY;
        for k in 0..n {
            smallest = smallest.min(spectrum(MatrixKind::A, k, r, &layout, Some(&filter))?[0]);
        }
        checks.push(Check::new(
            "A singular at tau = 1 - r/N",
            smallest <= EIGEN_TOL,
            format!("r = {r}: smallest eigenvalue {smallest:e}"),
        ));
    }

    // μ(A) = 1 - η + η μ(M), and 1 - η has multiplicity k + r + 1 - N.
    let mut identity_worst: f64 = 0.0;
    let mut multiplicity_ok = true;
    for k in 0..n {
        let eta = layout.filter_weight(&filter, k);
        for r in 1..=r_max {
            let a = spectrum(MatrixKind::A, k, r, &layout, Some(&filter))?;
            let m = spectrum(MatrixKind::M, k, r, &layout, None)?;
            for (x, y) in a.iter().zip(&m) {
                identity_worst = identity_worst.max((x - (1.0 - eta + eta * y)).abs());
            }
            if k + r >= n {
                let target = 1.0 - eta;
                let count = a
                    .iter()
                    .filter(|v| (*v - target).abs() <= EIGEN_TOL)
                    .count();
                // Eigenvalues of M equal to 1 also map onto 1 - η + η = 1,
                // which coincides with the target only when η = 0.
                if eta > 0.0 && count < k + r + 1 - n {
                    multiplicity_ok = false;
                }
            }
        }
    }
    checks.push(Check::new(
        "A spectrum = 1 - eta + eta * M spectrum",
        identity_worst <= EIGEN_TOL,
        format!("max deviation {identity_worst:e}"),
    ));
    checks.push(Check::new(
        "A eigenvalue 1 - eta has multiplicity k + r + 1 - N",
        multiplicity_ok,
        if multiplicity_ok {
            "matches".to_string()
        } else {
            "mismatch".to_string()
        },
    ));
    Ok(checks)
}

/// View-parity identities on the head phantom: the odd-`n` half-circle
/// rewrite and the half-circle symmetry at `n - 1` (or `n` when even).
pub fn parity_checks(n: usize) -> Result<Vec<Check>> {
    let phantom = EllipsePhantom::shepp_logan();
    let filter = FilterSpec::default();
    let (odd, even) = if n % 2 == 1 { (n, n - 1) } else { (n + 1, n) };
    let mut checks = Vec::new();

    let full = sine_coefficients(&sample_sinogram(
        &phantom,
        &SinogramGeometry::new(odd, odd, 0, AngleSet::FullCircle)?,
    ));
    let diff = parity_equivalence(&full, &filter, 64)?;
    checks.push(Check::new(
        format!("odd N = {odd}: half-circle angles reproduce the full circle"),
        diff <= 1e-10,
        format!("max pixel difference {diff:e}"),
    ));

    let full_even = sine_coefficients(&sample_sinogram(
        &phantom,
        &SinogramGeometry::new(even, even, 0, AngleSet::FullCircle)?,
    ));
    let residual = half_circle_symmetry_residual(&full_even)?;
    checks.push(Check::new(
        format!("even N = {even}: lambda[k][v + N/2] = (-1)^k lambda[k][v]"),
        residual <= 1e-10,
        format!("residual {residual:e}"),
    ));

    let half_even = sine_coefficients(&sample_sinogram(
        &phantom,
        &SinogramGeometry::new(even, even, 0, AngleSet::EvenHalfCircle)?,
    ));
    let a = oped_evaluate(&full_even, &filter, 64)?;
    let b = oped_evaluate(&half_even, &filter, 64)?;
    let diff = a.max_abs_difference(&b)?;
    checks.push(Check::new(
        format!("even N = {even}: full-circle sum equals twice the half-circle sum"),
        diff <= 1e-10,
        format!("max pixel difference {diff:e}"),
    ));
    Ok(checks)
}

/// Test polynomials for the preservation suite, with their labels.
pub fn preservation_polynomials() -> Vec<(&'static str, PolynomialImage)> {
    vec![
        ("1", PolynomialImage::from_terms(&[(1.0, 0, 0)])),
        ("x", PolynomialImage::from_terms(&[(1.0, 1, 0)])),
        ("y", PolynomialImage::from_terms(&[(1.0, 0, 1)])),
        (
            "x^2+y^2",
            PolynomialImage::from_terms(&[(1.0, 2, 0), (1.0, 0, 2)]),
        ),
        ("xy", PolynomialImage::from_terms(&[(1.0, 1, 1)])),
    ]
}

/// Reconstructs low-degree polynomials from exact data with `N_d = n/2`,
/// `τ = 1/4`, and compares at 128 × 128 pixel centres.
pub fn preservation_checks(n: usize) -> Result<Vec<Check>> {
    let geometry = SinogramGeometry::even(n, 0)?;
    let filter = FilterSpec::plateau(0.25, 0.0)?;
    let degree = (filter.tau() * geometry.n_d() as f64).floor() as u32;
    let mut polys = preservation_polynomials();
    if degree >= 3 {
        let label = "x^3 y^(d-3) - 2 y^d + 0.5";
        polys.push((
            label,
            PolynomialImage::from_terms(&[(1.0, 3, degree - 3), (-2.0, 0, degree), (0.5, 0, 0)]),
        ));
    }
    polys
        .into_iter()
        .map(|(label, p)| {
            if p.degree() > degree {
                return Ok(Check::new(
                    label,
                    false,
                    format!("degree {} exceeds {degree}", p.degree()),
                ));
            }
            let set = sine_coefficients(&sample_sinogram(&p, &geometry));
            let img = oped_evaluate(&set, &filter, 128)?;
            let worst = img
                .masked()
                .map(|(x, y, v)| (v - p.eval(x, y)).abs())
                .fold(0.0, f64::max);
            Ok(Check::new(
                format!("preserves f = {label} (N = {n})"),
                worst <= 1e-8,
                format!("max pixel error {worst:e}"),
            ))
        })
        .collect()
}
