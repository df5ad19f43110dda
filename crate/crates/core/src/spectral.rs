//! Eigenvalues and condition numbers of the completion matrices.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::completion::{build_matrix, CompletionLayout, MatrixKind};
use crate::linalg::{jacobi_eigenvalues, Matrix};
use crate::transform::FilterSpec;
use crate::{Error, Result};

/// Eigenvalues below this fraction of the largest count as zero.
pub const SINGULAR_REL_THRESHOLD: f64 = 1e-13;

/// Ascending eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    if a.dim() == 0 {
        return Err(Error::InvalidMatrix("empty matrix".into()));
    }
    a.ensure_symmetric(1e-12)?;
    jacobi_eigenvalues(a)
}

/// `μ_max / μ_min`, or infinite when `μ_min ≤ 1e-13 μ_max`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Condition {
    Finite(f64),
    Infinite,
}

impl Condition {
    pub fn from_extremes(mu_min: f64, mu_max: f64) -> Self {
        if mu_max <= 0.0 || mu_min <= SINGULAR_REL_THRESHOLD * mu_max {
            Condition::Infinite
        } else {
            Condition::Finite(mu_max / mu_min)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Condition::Finite(v) => v,
            Condition::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Condition::Finite(_))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Finite(v) => write!(f, "{v}"),
            Condition::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Condition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Condition::Finite(v) => s.serialize_f64(*v),
            Condition::Infinite => s.serialize_str("inf"),
        }
    }
}

pub fn condition_number(a: &Matrix) -> Result<Condition> {
    let mu = symmetric_eigenvalues(a)?;
    Ok(Condition::from_extremes(mu[0], mu[mu.len() - 1]))
}

/// Which `N` the tabulated matrices use for an even sinogram parameter `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableConvention {
    /// `N_sys = N/2`, `k < N/2`, filter at `2k/N`: the half-circle pipeline.
    Half,
    /// `N_sys = N`, `k < N`, filter at `k/N`.
    Full,
}

impl FromStr for TableConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" => Ok(TableConvention::Half),
            "full" => Ok(TableConvention::Full),
            other => Err(Error::InvalidArgument(format!(
                "unknown table convention `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyCondition {
    pub k: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    pub cond: Condition,
    /// Eigensolver failure for this `k`; the other fields are then NaN.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub r: usize,
    pub tau: f64,
    pub beta: f64,
    pub convention: TableConvention,
    pub filter: String,
    /// Arc covered by the available views, `180° - 360° r / N`.
    pub coverage_degrees: f64,
    pub max_condition: Condition,
    /// Frequency attaining `max_condition`.
    pub argmax_k: Option<usize>,
    #[serde(skip)]
    pub per_k: Vec<FrequencyCondition>,
}

/// Condition numbers of `A_{k,r}` for every frequency, one report per
/// `(τ, β)` pair, with the C³ plateau filter.
pub fn condition_table(
    n: usize,
    r: usize,
    params: &[(f64, f64)],
    convention: TableConvention,
) -> Result<Vec<SpectralReport>> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidGeometry(format!(
            "condition tables need a positive even N, got {n}"
        )));
    }
    let layout = match convention {
        TableConvention::Half => CompletionLayout::even_half(n, n / 2)?,
        TableConvention::Full => CompletionLayout::full_circle(n)?,
    };
    if r == 0 || r + 1 >= layout.n_sys() {
        return Err(Error::InvalidGeometry(format!(
            "r = {r} must satisfy 1 <= r < {}",
            layout.n_sys() - 1
        )));
    }
    params
        .iter()
        .map(|&(tau, beta)| {
            let filter = FilterSpec::plateau(tau, beta)?;
            Ok(frequency_sweep(n, r, &layout, &filter, convention))
        })
        .collect()
}

fn frequency_sweep(
    n: usize,
    r: usize,
    layout: &CompletionLayout,
    filter: &FilterSpec,
    convention: TableConvention,
) -> SpectralReport {
    let per_k: Vec<FrequencyCondition> = (0..layout.n_sys())
        .into_par_iter()
        .map(|k| {
            let spectrum = build_matrix(MatrixKind::A, k, r, layout, Some(filter))
                .and_then(|m| symmetric_eigenvalues(&m.entries));
            match spectrum {
                Ok(mu) => {
                    let (lo, hi) = (mu[0], mu[mu.len() - 1]);
                    FrequencyCondition {
                        k,
                        mu_min: lo,
                        mu_max: hi,
                        cond: Condition::from_extremes(lo, hi),
                        error: None,
                    }
                }
                Err(e) => FrequencyCondition {
                    k,
                    mu_min: f64::NAN,
                    mu_max: f64::NAN,
                    cond: Condition::Infinite,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let (argmax_k, max_condition) = per_k.iter().filter(|c| c.error.is_none()).fold(
        (None, Condition::Finite(0.0)),
        |(arg, best), c| {
            if c.cond.value() > best.value() {
                (Some(c.k), c.cond)
            } else {
                (arg, best)
            }
        },
    );

    SpectralReport {
        n,
        r,
        tau: filter.tau(),
        beta: filter.beta(),
        convention,
        filter: filter.to_string(),
        coverage_degrees: 180.0 - 360.0 * r as f64 / n as f64,
        max_condition,
        argmax_k,
        per_k,
    }
}

/// The `(τ, β)` grid of the standard sweep.
pub const SWEEP_GRID: [(f64, f64); 6] = [
    (0.0, 0.5),
    (0.0, 0.9),
    (0.1, 0.5),
    (0.1, 0.9),
    (0.2, 0.5),
    (0.2, 0.9),
];

/// `c_{μν} = sin(2(μ-ν)Φ) / ((μ-ν)π)`, diagonal `2Φ/π`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlepianMatrix {
    pub phi: f64,
    pub entries: Matrix,
}

pub fn slepian_matrix(phi: f64, r: usize) -> Result<SlepianMatrix> {
    if !(phi > 0.0 && phi < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidSlepian(format!(
            "Phi must lie in (0, pi/2), got {phi}"
        )));
    }
    if r == 0 {
        return Err(Error::InvalidSlepian("size must be at least 1".into()));
    }
    let entries = Matrix::from_fn(r, |i, j| {
        if i == j {
            2.0 * phi / std::f64::consts::PI
        } else {
            let d = i as f64 - j as f64;
            (2.0 * d * phi).sin() / (d * std::f64::consts::PI)
        }
    });
    Ok(SlepianMatrix { phi, entries })
}
