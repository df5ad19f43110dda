use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Phantom;
use crate::{Error, Result};

/// Which view angles a sinogram uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleSet {
    /// `N` even, views `2πν/N` for `ν < N/2`.
    EvenHalfCircle,
    /// `N` odd, views `πν/N` for `ν < N`.
    OddFullCircle,
    /// Any `N`, views `2πν/N` for `ν < N`. Redundant for even `N`; kept for
    /// the symmetry and parity checks.
    FullCircle,
}

impl AngleSet {
    pub fn as_str(self) -> &'static str {
        match self {
            AngleSet::EvenHalfCircle => "even_half_circle",
            AngleSet::OddFullCircle => "odd_full_circle",
            AngleSet::FullCircle => "full_circle",
        }
    }
}

impl fmt::Display for AngleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AngleSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even_half_circle" => Ok(AngleSet::EvenHalfCircle),
            "odd_full_circle" => Ok(AngleSet::OddFullCircle),
            "full_circle" => Ok(AngleSet::FullCircle),
            other => Err(Error::Format(format!("unknown angle set `{other}`"))),
        }
    }
}

/// Sampling geometry: `views()` equi-angular views, each with `n_d` rays at
/// offsets `cos ψ_j`, `ψ_j = (2j+1)π / (2 n_d)`. The first `r` views are
/// missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SinogramGeometry {
    n: usize,
    n_d: usize,
    r: usize,
    angles: AngleSet,
}

impl SinogramGeometry {
    pub fn new(n: usize, n_d: usize, r: usize, angles: AngleSet) -> Result<Self> {
        match angles {
            AngleSet::EvenHalfCircle if !n.is_multiple_of(2) || n == 0 => {
                return Err(Error::InvalidGeometry(format!(
                    "half-circle geometry needs a positive even N, got {n}"
                )));
            }
            AngleSet::OddFullCircle if n.is_multiple_of(2) => {
                return Err(Error::InvalidGeometry(format!(
                    "odd geometry needs an odd N, got {n}"
                )));
            }
            AngleSet::FullCircle if n == 0 => {
                return Err(Error::InvalidGeometry("N must be positive".into()));
            }
            _ => {}
        }
        if n_d == 0 {
            return Err(Error::InvalidGeometry(
                "need at least one ray per view".into(),
            ));
        }
        let geometry = Self { n, n_d, r, angles };
        let n_sys = geometry.system_size();
        if r > 0 && r + 1 >= n_sys {
            return Err(Error::InvalidGeometry(format!(
                "missing-view count r = {r} must satisfy r < {}",
                n_sys as isize - 1
            )));
        }
        Ok(geometry)
    }

    /// Even-`N` half-circle geometry with `N/2` rays per view.
    pub fn even(n: usize, r: usize) -> Result<Self> {
        Self::new(n, n / 2, r, AngleSet::EvenHalfCircle)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn angles(&self) -> AngleSet {
        self.angles
    }

    /// Same sampling, different missing-view count.
    pub fn with_missing(&self, r: usize) -> Result<Self> {
        Self::new(self.n, self.n_d, r, self.angles)
    }

    pub fn views(&self) -> usize {
        match self.angles {
            AngleSet::EvenHalfCircle => self.n / 2,
            AngleSet::OddFullCircle | AngleSet::FullCircle => self.n,
        }
    }

    /// Angle between neighbouring views.
    pub fn view_spacing(&self) -> f64 {
        match self.angles {
            AngleSet::EvenHalfCircle | AngleSet::FullCircle => 2.0 * PI / self.n as f64,
            AngleSet::OddFullCircle => PI / self.n as f64,
        }
    }

    pub fn view_angle(&self, view: usize) -> f64 {
        view as f64 * self.view_spacing()
    }

    /// Prefactor of the reconstruction sum.
    pub fn sum_weight(&self) -> f64 {
        match self.angles {
            AngleSet::EvenHalfCircle => 2.0 / self.n as f64,
            AngleSet::OddFullCircle | AngleSet::FullCircle => 1.0 / self.n as f64,
        }
    }

    /// The `N` that appears in the completion matrices: `N/2` on the even
    /// half circle, `N` otherwise.
    pub fn system_size(&self) -> usize {
        match self.angles {
            AngleSet::EvenHalfCircle => self.n / 2,
            AngleSet::OddFullCircle | AngleSet::FullCircle => self.n,
        }
    }

    /// `ψ_j = (2j+1)π / (2 n_d)`.
    pub fn ray_angle(&self, j: usize) -> f64 {
        (2 * j + 1) as f64 * PI / (2 * self.n_d) as f64
    }

    pub fn ray_offset(&self, j: usize) -> f64 {
        self.ray_angle(j).cos()
    }

    /// Limited-angle arc covered by the available views, in degrees.
    pub fn coverage_degrees(&self) -> f64 {
        let arc = self.views() as f64 * self.view_spacing();
        (arc - self.r as f64 * self.view_spacing()).to_degrees()
    }
}

/// Radon samples `g[ν][j]` for the available views `ν ≥ r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    geometry: SinogramGeometry,
    values: Vec<f64>,
    noise_sigma: f64,
    seed: Option<u64>,
}

impl Sinogram {
    /// `values` holds the available views row-major, `(views - r) * n_d` entries.
    pub fn from_parts(
        geometry: SinogramGeometry,
        values: Vec<f64>,
        noise_sigma: f64,
        seed: Option<u64>,
    ) -> Result<Self> {
        let expected = (geometry.views() - geometry.r()) * geometry.n_d();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Format(format!(
                "non-finite sinogram value at index {i}"
            )));
        }
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bad noise sigma {noise_sigma}"
            )));
        }
        Ok(Self {
            geometry,
            values,
            noise_sigma,
            seed,
        })
    }

    pub fn geometry(&self) -> &SinogramGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Samples of view `ν`, `None` for a missing view.
    pub fn view(&self, view: usize) -> Option<&[f64]> {
        let g = &self.geometry;
        if view < g.r() || view >= g.views() {
            return None;
        }
        let start = (view - g.r()) * g.n_d();
        Some(&self.values[start..start + g.n_d()])
    }

    /// Drops the leading views so that only `ν ≥ r` remain.
    pub fn restrict(&self, r: usize) -> Result<Self> {
        if r < self.geometry.r() {
            return Err(Error::InvalidArgument(format!(
                "cannot restore views: sinogram already misses {} views",
                self.geometry.r()
            )));
        }
        let geometry = self.geometry.with_missing(r)?;
        let skip = (r - self.geometry.r()) * geometry.n_d();
        Ok(Self {
            geometry,
            values: self.values[skip..].to_vec(),
            ..self.clone()
        })
    }
}

/// Samples `R(φ_ν, cos ψ_j)` for every available view.
pub fn sample_sinogram(phantom: &impl Phantom, geometry: &SinogramGeometry) -> Sinogram {
    let offsets: Vec<f64> = (0..geometry.n_d())
        .map(|j| geometry.ray_offset(j))
        .collect();
    let values = (geometry.r()..geometry.views())
        .flat_map(|view| {
            let theta = geometry.view_angle(view);
            offsets.iter().map(move |&t| phantom.radon(theta, t))
        })
        .collect();
    Sinogram {
        geometry: *geometry,
        values,
        noise_sigma: 0.0,
        seed: None,
    }
}

/// Adds independent `N(0, sigma²)` noise to every stored sample.
///
/// Draws come from ChaCha8 seeded with `seed`, consumed row-major (view
/// outer, ray inner), so the result is reproducible bit for bit.
pub fn add_noise(sinogram: &Sinogram, sigma: f64, seed: u64) -> Result<Sinogram> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise sigma must be >= 0, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(sinogram.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = sinogram
        .values
        .iter()
        .map(|v| v + normal.sample(&mut rng))
        .collect();
    Ok(Sinogram {
        geometry: sinogram.geometry,
        values,
        noise_sigma: sinogram.noise_sigma.hypot(sigma),
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::oracle::line_integral_quadrature;
    use crate::phantom::EllipsePhantom;

    #[test]
    fn unit_disk_views_are_identical() {
        let g = SinogramGeometry::new(8, 4, 0, AngleSet::EvenHalfCircle).unwrap();
        let s = sample_sinogram(&EllipsePhantom::unit_disk(), &g);
        for view in 0..4 {
            let samples = s.view(view).unwrap();
            for (j, v) in samples.iter().enumerate() {
                let expected = 2.0 * g.ray_angle(j).sin();
                assert!((v - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn missing_prefix() {
        let g = SinogramGeometry::new(8, 4, 2, AngleSet::EvenHalfCircle).unwrap();
        let s = sample_sinogram(&EllipsePhantom::unit_disk(), &g);
        assert!(s.view(0).is_none() && s.view(1).is_none());
        assert!(s.view(2).is_some() && s.view(3).is_some());
        assert_eq!(s.values().len(), 8);
    }

    #[test]
    fn geometry_validation() {
        assert!(SinogramGeometry::new(7, 3, 0, AngleSet::EvenHalfCircle).is_err());
        assert!(SinogramGeometry::new(8, 4, 0, AngleSet::OddFullCircle).is_err());
        assert!(SinogramGeometry::new(8, 0, 0, AngleSet::EvenHalfCircle).is_err());
        // r < N/2 - 1
        assert!(SinogramGeometry::even(16, 6).is_ok());
        assert!(SinogramGeometry::even(16, 7).is_err());
        assert!(SinogramGeometry::new(9, 5, 7, AngleSet::OddFullCircle).is_ok());
        assert!(SinogramGeometry::new(9, 5, 8, AngleSet::OddFullCircle).is_err());
    }

    #[test]
    fn coverage() {
        let g = SinogramGeometry::even(502, 21).unwrap();
        assert!((g.coverage_degrees() - (180.0 - 360.0 * 21.0 / 502.0)).abs() < 1e-12);
        assert_eq!(g.with_missing(0).unwrap().coverage_degrees().round(), 180.0);
    }

    #[test]
    fn head_phantom_spot_checks() {
        let g = SinogramGeometry::even(502, 0).unwrap();
        let p = EllipsePhantom::shepp_logan();
        let s = sample_sinogram(&p, &g);
        for &(view, j) in &[(0usize, 125usize), (77, 40), (250, 200)] {
            let quad = line_integral_quadrature(&p, g.view_angle(view), g.ray_offset(j));
            assert!((s.view(view).unwrap()[j] - quad).abs() < 1e-8);
        }
    }

    #[test]
    fn restrict_drops_views() {
        let g = SinogramGeometry::even(16, 0).unwrap();
        let s = sample_sinogram(&EllipsePhantom::shepp_logan(), &g);
        let limited = s.restrict(3).unwrap();
        assert_eq!(limited.view(3), s.view(3));
        assert!(limited.view(2).is_none());
        assert!(limited.restrict(1).is_err());
    }

    #[test]
    fn zero_noise_is_identity() {
        let g = SinogramGeometry::even(16, 0).unwrap();
        let s = sample_sinogram(&EllipsePhantom::shepp_logan(), &g);
        assert_eq!(add_noise(&s, 0.0, 1).unwrap(), s);
        assert!(add_noise(&s, -0.1, 1).is_err());
    }

    #[test]
    fn noise_is_reproducible() {
        let g = SinogramGeometry::even(64, 0).unwrap();
        let s = sample_sinogram(&EllipsePhantom::shepp_logan(), &g);
        let a = add_noise(&s, 0.03, 1).unwrap();
        let b = add_noise(&s, 0.03, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, add_noise(&s, 0.03, 2).unwrap());
        assert_eq!(a.seed(), Some(1));
        assert_eq!(a.noise_sigma(), 0.03);
    }

    #[test]
    fn noise_statistics() {
        let g = SinogramGeometry::new(502, 251, 0, AngleSet::EvenHalfCircle).unwrap();
        let clean = sample_sinogram(&EllipsePhantom::shepp_logan(), &g);
        let noisy = add_noise(&clean, 0.03, 20091).unwrap();
        let diffs: Vec<f64> = noisy
            .values()
            .iter()
            .zip(clean.values())
            .map(|(a, b)| a - b)
            .collect();
        let n = diffs.len() as f64;
        assert_eq!(diffs.len(), 251 * 251);
        let mean = diffs.iter().sum::<f64>() / n;
        let var: f64 = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 4.0 * 0.03 / n.sqrt(), "mean {mean}");
        let std: f64 = var.sqrt();
        assert!((std - 0.03).abs() < 0.05 * 0.03, "std {std}");
    }
}
