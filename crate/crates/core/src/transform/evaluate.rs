use rayon::prelude::*;

use super::chebyshev::clamp_unit;
use super::coefficients::SineCoefficientSet;
use super::filter::FilterSpec;
use crate::phantom::{AngleSet, SinogramGeometry};
use crate::{Error, Result};

/// An `M × M` reconstruction of the unit disk.
///
/// Pixel `(i, j)` has centre `((2j+1)/M - 1, 1 - (2i+1)/M)`: row 0 is the top
/// of the image. Pixels whose centre lies outside the disk are masked out and
/// hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconImage {
    size: usize,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl ReconImage {
    /// Evaluates `f` at every masked pixel centre.
    pub fn from_fn(size: usize, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        Self::try_from_fn(size, |x, y| Ok(f(x, y))).expect("infallible")
    }

    fn try_from_fn(size: usize, f: impl Fn(f64, f64) -> Result<f64> + Sync) -> Result<Self> {
        let rows: Vec<Vec<(f64, bool)>> = (0..size)
            .into_par_iter()
            .map(|i| {
                (0..size)
                    .map(|j| {
                        let (x, y) = pixel_center(size, i, j);
                        if x * x + y * y <= 1.0 {
                            f(x, y).map(|v| (v, true))
                        } else {
                            Ok((0.0, false))
                        }
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let (values, mask) = rows.into_iter().flatten().unzip();
        Ok(Self { size, values, mask })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        pixel_center(self.size, i, j)
    }

    /// Masked pixels as `(x, y, value)`.
    pub fn masked(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.values.len())
            .filter(|&p| self.mask[p])
            .map(move |p| {
                let (x, y) = pixel_center(self.size, p / self.size, p % self.size);
                (x, y, self.values[p])
            })
    }

    pub fn max_abs_difference(&self, other: &Self) -> Result<f64> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                actual: other.size,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

fn pixel_center(size: usize, i: usize, j: usize) -> (f64, f64) {
    let m = size as f64;
    ((2 * j + 1) as f64 / m - 1.0, 1.0 - (2 * i + 1) as f64 / m)
}

const LANES: usize = 4;

/// Per-view coefficient tables `c[ν][k] = w · η(k/n_d) (k+1) λ[k][ν]` plus
/// the view directions, packed `LANES` views at a time so the independent
/// recurrences run side by side. Padding lanes carry zero coefficients.
struct Expansion {
    n_d: usize,
    cos: Vec<[f64; LANES]>,
    sin: Vec<[f64; LANES]>,
    coefficients: Vec<[f64; LANES]>,
}

impl Expansion {
    fn new(set: &SineCoefficientSet, filter: &FilterSpec) -> Result<Self> {
        if let Some(view) = set.first_missing() {
            return Err(Error::MissingViews { view });
        }
        let g = set.geometry();
        let (n_d, views) = (g.n_d(), g.views());
        let groups = views.div_ceil(LANES);
        let weights: Vec<f64> = (0..n_d)
            .map(|k| g.sum_weight() * filter.eval(k as f64 / n_d as f64) * (k + 1) as f64)
            .collect();
        let mut coefficients = vec![[0.0; LANES]; groups * n_d];
        let mut cos = vec![[1.0; LANES]; groups];
        let mut sin = vec![[0.0; LANES]; groups];
        for view in 0..views {
            let (group, lane) = (view / LANES, view % LANES);
            (sin[group][lane], cos[group][lane]) = g.view_angle(view).sin_cos();
        }
        for (k, w) in weights.iter().enumerate() {
            for (view, lambda) in set.frequency(k).iter().enumerate() {
                coefficients[(view / LANES) * n_d + k][view % LANES] = w * lambda;
            }
        }
        Ok(Self {
            n_d,
            cos,
            sin,
            coefficients,
        })
    }

    #[inline]
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let mut total = 0.0;
        for ((c, s), coef) in self
            .cos
            .iter()
            .zip(&self.sin)
            .zip(self.coefficients.chunks_exact(self.n_d))
        {
            let mut two_t = [0.0; LANES];
            for lane in 0..LANES {
                two_t[lane] = 2.0 * clamp_unit(x * c[lane] + y * s[lane])?;
            }
            // Σ_k coef[k] U_k(t), U_k by the three-term recurrence.
            let mut prev = [0.0; LANES];
            let mut cur = [1.0; LANES];
            let mut acc = [0.0; LANES];
            for a in coef {
                for lane in 0..LANES {
                    acc[lane] += a[lane] * cur[lane];
                    let next = two_t[lane] * cur[lane] - prev[lane];
                    prev[lane] = cur[lane];
                    cur[lane] = next;
                }
            }
            total += acc.iter().sum::<f64>();
        }
        Ok(total)
    }
}

/// The OPED sum `w Σ_k Σ_ν η(k/n_d) λ[k][ν] (k+1) U_k(x cos φ_ν + y sin φ_ν)`
/// at one point, with `w` the geometry's prefactor.
pub fn oped_point(set: &SineCoefficientSet, filter: &FilterSpec, x: f64, y: f64) -> Result<f64> {
    Expansion::new(set, filter)?.eval(x, y)
}

/// Evaluates the OPED sum at every masked pixel of an `size × size` grid.
pub fn oped_evaluate(
    set: &SineCoefficientSet,
    filter: &FilterSpec,
    size: usize,
) -> Result<ReconImage> {
    let expansion = Expansion::new(set, filter)?;
    ReconImage::try_from_fn(size, |x, y| expansion.eval(x, y))
}

/// Maps a full-circle set with odd `N` onto the half-circle angles `πμ/N`.
///
/// Even `μ = 2ν` is the view `2πν/N` itself; odd `μ = 2ν+1` is the view
/// `2πν/N + π(N+1)/N` reflected through the origin, which flips the sign of
/// odd frequencies.
pub fn reindex_odd_full_to_half(full: &SineCoefficientSet) -> Result<SineCoefficientSet> {
    let g = full.geometry();
    if g.angles() != AngleSet::FullCircle || g.n().is_multiple_of(2) {
        return Err(Error::InvalidGeometry(format!(
            "parity mapping needs a full-circle set with odd N, got {} with N = {}",
            g.angles(),
            g.n()
        )));
    }
    if let Some(view) = full.first_missing() {
        return Err(Error::MissingViews { view });
    }
    let n = g.n();
    let half_geometry = SinogramGeometry::new(n, g.n_d(), 0, AngleSet::OddFullCircle)?;
    let mut table = Vec::with_capacity(n * g.n_d());
    for k in 0..g.n_d() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let row = full.frequency(k);
        table.extend((0..n).map(|mu| {
            if mu % 2 == 0 {
                row[mu / 2]
            } else {
                sign * row[(mu - 1) / 2 + n.div_ceil(2)]
            }
        }));
    }
    SineCoefficientSet::from_table(half_geometry, table)
}

/// Largest pixel difference between the full-circle evaluation of an odd-`N`
/// set and the evaluation over the equivalent half-circle angles.
pub fn parity_equivalence(
    full: &SineCoefficientSet,
    filter: &FilterSpec,
    size: usize,
) -> Result<f64> {
    let half = reindex_odd_full_to_half(full)?;
    let a = oped_evaluate(full, filter, size)?;
    let b = oped_evaluate(&half, filter, size)?;
    a.max_abs_difference(&b)
}
