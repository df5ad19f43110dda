use std::f64::consts::PI;

use rayon::prelude::*;

use crate::phantom::{AngleSet, Sinogram, SinogramGeometry};
use crate::{Error, Result};

/// Discrete sine coefficients `λ[k][ν]`, `k < n_d`, one column per view.
/// Columns of missing views hold zeros until they are completed.
#[derive(Debug, Clone, PartialEq)]
pub struct SineCoefficientSet {
    geometry: SinogramGeometry,
    /// Row-major by frequency: `lambda[k * views + ν]`.
    lambda: Vec<f64>,
    available: Vec<bool>,
}

impl SineCoefficientSet {
    /// Builds a set from a frequency-major table covering every view.
    /// Views `ν < geometry.r()` are flagged missing.
    pub fn from_table(geometry: SinogramGeometry, lambda: Vec<f64>) -> Result<Self> {
        let expected = geometry.n_d() * geometry.views();
        if lambda.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: lambda.len(),
            });
        }
        let available = (0..geometry.views()).map(|v| v >= geometry.r()).collect();
        Ok(Self {
            geometry,
            lambda,
            available,
        })
    }

    pub fn geometry(&self) -> &SinogramGeometry {
        &self.geometry
    }

    pub fn n_d(&self) -> usize {
        self.geometry.n_d()
    }

    pub fn views(&self) -> usize {
        self.geometry.views()
    }

    #[inline]
    pub fn get(&self, k: usize, view: usize) -> f64 {
        self.lambda[k * self.views() + view]
    }

    /// All views at frequency `k`.
    pub fn frequency(&self, k: usize) -> &[f64] {
        let v = self.views();
        &self.lambda[k * v..(k + 1) * v]
    }

    pub fn is_available(&self, view: usize) -> bool {
        self.available[view]
    }

    pub fn first_missing(&self) -> Option<usize> {
        self.available.iter().position(|a| !a)
    }

    pub fn is_complete(&self) -> bool {
        self.first_missing().is_none()
    }

    /// Writes recovered values for views `0..values.len()` at frequency `k`.
    pub(crate) fn fill_missing(&mut self, k: usize, values: &[f64]) {
        let v = self.views();
        self.lambda[k * v..k * v + values.len()].copy_from_slice(values);
    }

    /// Marks every view available; the geometry records no missing views.
    pub(crate) fn mark_complete(&mut self) {
        self.available.iter_mut().for_each(|a| *a = true);
        self.geometry = self
            .geometry
            .with_missing(0)
            .expect("r = 0 is always valid");
    }

    pub fn max_abs_difference(&self, other: &Self) -> Result<f64> {
        if self.lambda.len() != other.lambda.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lambda.len(),
                actual: other.lambda.len(),
            });
        }
        Ok(self
            .lambda
            .iter()
            .zip(&other.lambda)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// `sin((k+1) ψ_j)` for `k, j < n_d`, row-major by `k`.
///
/// The argument `(k+1)(2j+1)π / (2 n_d)` is reduced modulo `2π` in integers
/// first, so large products lose no accuracy.
fn sine_table(n_d: usize) -> Vec<f64> {
    let period = 4 * n_d;
    let unit = PI / (2 * n_d) as f64;
    let mut table = Vec::with_capacity(n_d * n_d);
    for k in 0..n_d {
        for j in 0..n_d {
            let m = ((k + 1) * (2 * j + 1)) % period;
            table.push((m as f64 * unit).sin());
        }
    }
    table
}

/// `λ[k][ν] = (1/n_d) Σ_j sin((k+1) ψ_j) g[ν][j]` for every available view.
pub fn sine_coefficients(sinogram: &Sinogram) -> SineCoefficientSet {
    let geometry = *sinogram.geometry();
    let (n_d, views) = (geometry.n_d(), geometry.views());
    let table = sine_table(n_d);
    let scale = 1.0 / n_d as f64;

    // One column per view, transposed into the frequency-major layout below.
    let columns: Vec<Vec<f64>> = (geometry.r()..views)
        .into_par_iter()
        .map(|view| {
            let g = sinogram.view(view).expect("available view");
            table
                .chunks_exact(n_d)
                .map(|sines| scale * sines.iter().zip(g).map(|(s, v)| s * v).sum::<f64>())
                .collect()
        })
        .collect();

    let mut lambda = vec![0.0; n_d * views];
    for (column, view) in columns.iter().zip(geometry.r()..views) {
        for (k, value) in column.iter().enumerate() {
            lambda[k * views + view] = *value;
        }
    }
    SineCoefficientSet::from_table(geometry, lambda).expect("table has the right size")
}

/// `max |λ[k][ν + N/2] - (-1)^k λ[k][ν]|` over a complete full-circle set
/// with even `N`.
pub fn half_circle_symmetry_residual(set: &SineCoefficientSet) -> Result<f64> {
    let g = set.geometry();
    if g.angles() != AngleSet::FullCircle || !g.n().is_multiple_of(2) {
        return Err(Error::InvalidGeometry(format!(
            "symmetry check needs a full-circle set with even N, got {} with N = {}",
            g.angles(),
            g.n()
        )));
    }
    if let Some(view) = set.first_missing() {
        return Err(Error::MissingViews { view });
    }
    let half = g.n() / 2;
    let mut worst: f64 = 0.0;
    for k in 0..set.n_d() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let row = set.frequency(k);
        for view in 0..half {
            worst = worst.max((row[view + half] - sign * row[view]).abs());
        }
    }
    Ok(worst)
}

/// True when the half-circle symmetry holds to `1e-10`.
pub fn half_circle_symmetry_check(set: &SineCoefficientSet) -> Result<bool> {
    Ok(half_circle_symmetry_residual(set)? <= 1e-10)
}
