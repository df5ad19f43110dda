//! Recovery of the sine coefficients of missing views.
//!
//! For a polynomial image of low enough degree the coefficients at any view
//! angle are a filtered combination of the coefficients at all views. Split
//! into missing (`ν < r`) and available views, that identity becomes, for
//! every frequency `k`, an `r × r` system
//!
//! ```text
//! (I - A_k) x = Σ_{ν ≥ r} a_k(μ, ν) λ[k][ν],   a_k(μ, ν) = η(k/n_d) U_k(cos(φ_μ - φ_ν)) / n_sys
//! ```
//!
//! whose matrix is positive definite for every `k` exactly when
//! `τ < 1 - r / n_sys`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::linalg::{jacobi_eigen, Cholesky, Matrix};
use crate::phantom::{AngleSet, SinogramGeometry};
use crate::transform::{FilterSpec, SineCoefficientSet};
use crate::{Error, Result};

/// Suggested distance below the singular bound `1 - r/n_sys` when picking τ.
/// Not enforced.
pub const RECOMMENDED_TAU_MARGIN: f64 = 0.05;

/// Largest τ (exclusive) for which every completion matrix is invertible.
pub fn tau_bound(r: usize, n_sys: usize) -> f64 {
    1.0 - r as f64 / n_sys as f64
}

/// Angular layout of the completion matrices: view spacing `2π / period`,
/// the `N` dividing the kernel (`n_sys`), and the `n_d` scaling the filter
/// argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompletionLayout {
    n_sys: usize,
    n_d: usize,
    period: usize,
}

impl CompletionLayout {
    pub fn new(n_sys: usize, n_d: usize, period: usize) -> Result<Self> {
        if n_sys == 0 || n_d == 0 || period == 0 {
            return Err(Error::InvalidMatrix(format!(
                "layout sizes must be positive (n_sys = {n_sys}, n_d = {n_d}, period = {period})"
            )));
        }
        Ok(Self { n_sys, n_d, period })
    }

    /// Views `2πν/N`, kernel scaled by `1/N`, filter at `k/N`.
    pub fn full_circle(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    /// Even-`N` half circle: views `2πν/N`, kernel scaled by `2/N`, filter
    /// at `k/n_d`.
    pub fn even_half(n: usize, n_d: usize) -> Result<Self> {
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidMatrix(format!(
                "half-circle layout needs even N, got {n}"
            )));
        }
        Self::new(n / 2, n_d, n)
    }

    pub fn from_geometry(g: &SinogramGeometry) -> Self {
        let period = match g.angles() {
            AngleSet::EvenHalfCircle | AngleSet::FullCircle => g.n(),
            AngleSet::OddFullCircle => 2 * g.n(),
        };
        Self {
            n_sys: g.system_size(),
            n_d: g.n_d(),
            period,
        }
    }

    pub fn n_sys(&self) -> usize {
        self.n_sys
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    /// `U_k(cos(d · 2π/period))`, the kernel between views `d` apart.
    pub fn kernel(&self, k: usize, d: usize) -> f64 {
        let p = self.period;
        let m = d % p;
        let degree = (k + 1) as f64;
        if m == 0 {
            return degree;
        }
        if 2 * m == p {
            return if k.is_multiple_of(2) { degree } else { -degree };
        }
        // Reduce (k+1)·d modulo the period in integers before scaling.
        let numerator = ((k + 1) % p) * m % p;
        let unit = 2.0 * PI / p as f64;
        (numerator as f64 * unit).sin() / (m as f64 * unit).sin()
    }

    /// `η(k / n_d)`.
    pub fn filter_weight(&self, filter: &FilterSpec, k: usize) -> f64 {
        filter.eval(k as f64 / self.n_d as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// `b_{μν} = U_k(cos(φ_μ - φ_ν))`.
    B,
    /// `I - B / n_sys`.
    M,
    /// `I - η(k/n_d) B / n_sys`.
    A,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionMatrix {
    pub kind: MatrixKind,
    pub k: usize,
    pub r: usize,
    pub n_sys: usize,
    /// Filter weight folded into the matrix; 1 for kinds `B` and `M`.
    pub eta: f64,
    pub entries: Matrix,
}

/// Builds the `r × r` matrix of the requested kind. Kind `A` requires a
/// filter; `B` and `M` are only defined for `k < n_sys`.
pub fn build_matrix(
    kind: MatrixKind,
    k: usize,
    r: usize,
    layout: &CompletionLayout,
    filter: Option<&FilterSpec>,
) -> Result<CompletionMatrix> {
    if r == 0 {
        return Err(Error::InvalidMatrix(
            "matrix size r must be at least 1".into(),
        ));
    }
    if kind != MatrixKind::A && k >= layout.n_sys {
        return Err(Error::InvalidMatrix(format!(
            "frequency k = {k} out of range for N_sys = {}",
            layout.n_sys
        )));
    }
    let eta = match (kind, filter) {
        (MatrixKind::A, Some(f)) => layout.filter_weight(f, k),
        (MatrixKind::A, None) => {
            return Err(Error::InvalidMatrix("kind A needs a filter".into()));
        }
        _ => 1.0,
    };
    let band: Vec<f64> = (0..r).map(|d| layout.kernel(k, d)).collect();
    let scale = eta / layout.n_sys as f64;
    let entries = Matrix::from_fn(r, |i, j| {
        let b = band[i.abs_diff(j)];
        match kind {
            MatrixKind::B => b,
            MatrixKind::M | MatrixKind::A => f64::from(u8::from(i == j)) - scale * b,
        }
    });
    Ok(CompletionMatrix {
        kind,
        k,
        r,
        n_sys: layout.n_sys,
        eta,
        entries,
    })
}

/// One frequency's system `A x = rhs` for the missing coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionSystem {
    pub k: usize,
    pub matrix: CompletionMatrix,
    pub rhs: Vec<f64>,
}

/// Assembles the system for frequency `k` from the available views of `set`.
pub fn assemble_system(
    set: &SineCoefficientSet,
    k: usize,
    filter: &FilterSpec,
) -> Result<CompletionSystem> {
    let g = set.geometry();
    let r = g.r();
    if r == 0 {
        return Err(Error::InvalidArgument(
            "no missing views; nothing to complete".into(),
        ));
    }
    if k >= g.n_d() {
        return Err(Error::InvalidArgument(format!(
            "frequency {k} out of range (n_d = {})",
            g.n_d()
        )));
    }
    if let Some(view) = (r..set.views()).find(|&v| !set.is_available(v)) {
        return Err(Error::MissingViews { view });
    }
    let layout = CompletionLayout::from_geometry(g);
    let matrix = build_matrix(MatrixKind::A, k, r, &layout, Some(filter))?;
    let scale = matrix.eta / layout.n_sys as f64;
    let lambda = set.frequency(k);
    let rhs = (0..r)
        .map(|mu| {
            scale
                * (r..set.views())
                    .map(|view| layout.kernel(k, view - mu) * lambda[view])
                    .sum::<f64>()
        })
        .collect();
    Ok(CompletionSystem { k, matrix, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveMethod {
    Cholesky,
    /// Eigen-expansion that dropped `discarded` components below
    /// `1e-12 μ_max`.
    Spectral {
        discarded: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Vec<f64>,
    pub method: SolveMethod,
    /// `‖A x - rhs‖_∞`.
    pub residual: f64,
    /// Set when the Cholesky factorisation failed or the residual exceeded
    /// `1e-8 (1 + ‖rhs‖_∞)`.
    pub ill_conditioned: bool,
}

const PIVOT_REL_FLOOR: f64 = 1e-13;
const SPECTRAL_REL_CUTOFF: f64 = 1e-12;
const RESIDUAL_REL_TOL: f64 = 1e-8;

pub fn solve_system(system: &CompletionSystem) -> Result<Solution> {
    solve_symmetric(&system.matrix.entries, &system.rhs)
}

/// Solves `a x = rhs` for symmetric `a`: Cholesky first, truncated
/// eigen-expansion if a pivot falls below `1e-13 ‖a‖_F`.
pub fn solve_symmetric(a: &Matrix, rhs: &[f64]) -> Result<Solution> {
    if rhs.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: rhs.len(),
        });
    }
    a.ensure_symmetric(1e-12)?;
    let norm = a.frobenius_norm();
    let rhs_max = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual_of = |x: &[f64]| {
        a.mul_vec(x)
            .iter()
            .zip(rhs)
            .fold(0.0f64, |m, (ax, b)| m.max((ax - b).abs()))
    };

    if let Some(chol) = Cholesky::factor(a, PIVOT_REL_FLOOR * norm) {
        let values = chol.solve(rhs);
        let residual = residual_of(&values);
        let ill_conditioned = residual.is_nan() || residual > RESIDUAL_REL_TOL * (1.0 + rhs_max);
        return Ok(Solution {
            values,
            method: SolveMethod::Cholesky,
            residual,
            ill_conditioned,
        });
    }

    let eig = jacobi_eigen(a)?;
    let n = a.dim();
    let mu_max = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = SPECTRAL_REL_CUTOFF * mu_max;
    let mut values = vec![0.0; n];
    let mut discarded = 0;
    for (col, &mu) in eig.values.iter().enumerate() {
        if mu <= cutoff {
            discarded += 1;
            continue;
        }
        let coef = (0..n).map(|i| eig.vectors[(i, col)] * rhs[i]).sum::<f64>() / mu;
        for (i, x) in values.iter_mut().enumerate() {
            *x += coef * eig.vectors[(i, col)];
        }
    }
    let residual = residual_of(&values);
    Ok(Solution {
        values,
        method: SolveMethod::Spectral { discarded },
        residual,
        ill_conditioned: true,
    })
}

/// Per-frequency solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub k: usize,
    pub method: SolveMethod,
    pub residual: f64,
    pub ill_conditioned: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub coefficients: SineCoefficientSet,
    pub frequencies: Vec<FrequencyReport>,
}

impl Completion {
    pub fn ill_conditioned(&self) -> impl Iterator<Item = &FrequencyReport> {
        self.frequencies.iter().filter(|f| f.ill_conditioned)
    }
}

/// Fails unless every completion matrix for `r` missing views is invertible.
pub fn check_admissible(filter: &FilterSpec, r: usize, n_sys: usize) -> Result<()> {
    let bound = tau_bound(r, n_sys);
    if filter.tau() >= bound {
        return Err(Error::SingularRegime {
            tau: filter.tau(),
            r,
            n_sys,
            bound,
        });
    }
    if !filter.is_strictly_decreasing() {
        return Err(Error::InvalidFilter(
            "completion needs a filter that decays below 1 (beta < 1)".into(),
        ));
    }
    Ok(())
}

/// Solves every frequency's system and fills in the missing views.
///
/// With no missing views the set is returned unchanged.
pub fn complete_coefficients(set: &SineCoefficientSet, filter: &FilterSpec) -> Result<Completion> {
    let g = set.geometry();
    let r = g.r();
    if r == 0 {
        return Ok(Completion {
            coefficients: set.clone(),
            frequencies: Vec::new(),
        });
    }
    check_admissible(filter, r, g.system_size())?;

    let solved: Vec<(Solution, usize)> = (0..g.n_d())
        .into_par_iter()
        .map(|k| {
            let system = assemble_system(set, k, filter)?;
            Ok((solve_system(&system)?, k))
        })
        .collect::<Result<_>>()?;

    let mut coefficients = set.clone();
    let mut frequencies = Vec::with_capacity(solved.len());
    for (solution, k) in solved {
        coefficients.fill_missing(k, &solution.values);
        frequencies.push(FrequencyReport {
            k,
            method: solution.method,
            residual: solution.residual,
            ill_conditioned: solution.ill_conditioned,
        });
    }
    coefficients.mark_complete();
    Ok(Completion {
        coefficients,
        frequencies,
    })
}
