use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::Phantom;
use crate::{Error, Result};

const CONTAINMENT_SLACK: f64 = 1e-12;

/// A constant-density ellipse.
///
/// `semi_major` is the semi-axis along the direction `tilt`, `semi_minor`
/// the one perpendicular to it. Neither has to be the larger of the two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center_x: f64,
    pub center_y: f64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub tilt: f64,
    pub density: f64,
}

impl Ellipse {
    pub fn new(
        center_x: f64,
        center_y: f64,
        semi_major: f64,
        semi_minor: f64,
        tilt: f64,
        density: f64,
    ) -> Result<Self> {
        let params = [center_x, center_y, semi_major, semi_minor, tilt, density];
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidEllipse("parameters must be finite".into()));
        }
        if semi_major <= 0.0 || semi_minor <= 0.0 {
            return Err(Error::InvalidEllipse(format!(
                "semi-axes must be positive, got {semi_major} and {semi_minor}"
            )));
        }
        let e = Self {
            center_x,
            center_y,
            semi_major,
            semi_minor,
            tilt,
            density,
        };
        let reach = e.max_radius();
        if reach > 1.0 + CONTAINMENT_SLACK {
            return Err(Error::InvalidEllipse(format!(
                "ellipse reaches radius {reach} outside the unit disk"
            )));
        }
        Ok(e)
    }

    /// Disk of radius `radius` centred at the origin.
    pub fn disk(radius: f64, density: f64) -> Result<Self> {
        Self::new(0.0, 0.0, radius, radius, 0.0, density)
    }

    /// Support function `max_{p in E} <p, (cos a, sin a)>`.
    fn support(&self, angle: f64) -> f64 {
        let rel = angle - self.tilt;
        let (s, c) = rel.sin_cos();
        self.center_x * angle.cos()
            + self.center_y * angle.sin()
            + (self.semi_major * self.semi_major * c * c
                + self.semi_minor * self.semi_minor * s * s)
                .sqrt()
    }

    /// Largest distance from the origin to a point of the ellipse.
    fn max_radius(&self) -> f64 {
        // Coarse scan, then golden-section refinement around the best sample.
        const SAMPLES: usize = 720;
        let step = 2.0 * PI / SAMPLES as f64;
        let (best, _) = (0..SAMPLES)
            .map(|i| {
                let a = i as f64 * step;
                (a, self.support(a))
            })
            .fold((0.0, f64::NEG_INFINITY), |acc, cur| {
                if cur.1 > acc.1 {
                    cur
                } else {
                    acc
                }
            });

        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (best - step, best + step);
        for _ in 0..80 {
            let m1 = hi - inv_phi * (hi - lo);
            let m2 = lo + inv_phi * (hi - lo);
            if self.support(m1) < self.support(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        self.support(0.5 * (lo + hi)).max(self.support(best))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.center_x, y - self.center_y);
        let (s, c) = self.tilt.sin_cos();
        let u = (dx * c + dy * s) / self.semi_major;
        let w = (-dx * s + dy * c) / self.semi_minor;
        u * u + w * w <= 1.0
    }

    /// Density times the chord length of the line `x cos(theta) + y sin(theta) = t`.
    pub fn radon(&self, theta: f64, t: f64) -> f64 {
        let shift = t - (self.center_x * theta.cos() + self.center_y * theta.sin());
        let rel = theta - self.tilt;
        let (s, c) = rel.sin_cos();
        let d2 =
            self.semi_major * self.semi_major * c * c + self.semi_minor * self.semi_minor * s * s;
        let gap = d2 - shift * shift;
        if gap <= 0.0 {
            return 0.0;
        }
        2.0 * self.density * self.semi_major * self.semi_minor * gap.sqrt() / d2
    }
}

/// Superposition of ellipses; densities add where ellipses overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsePhantom {
    ellipses: Vec<Ellipse>,
}

impl EllipsePhantom {
    pub fn new(ellipses: Vec<Ellipse>) -> Result<Self> {
        if ellipses.is_empty() {
            return Err(Error::InvalidEllipse(
                "phantom needs at least one ellipse".into(),
            ));
        }
        Ok(Self { ellipses })
    }

    pub fn ellipses(&self) -> &[Ellipse] {
        &self.ellipses
    }

    /// Constant image 1 on the whole unit disk.
    pub fn unit_disk() -> Self {
        Self {
            ellipses: vec![Ellipse::disk(1.0, 1.0).expect("unit disk is valid")],
        }
    }

    /// The original Shepp-Logan head phantom (Shepp & Logan 1974, as tabulated
    /// by Kak & Slaney). The skull has density 2 and the brain sits at about 1.02.
    pub fn shepp_logan() -> Self {
        const TABLE: [[f64; 6]; 10] = [
            // center_x, center_y, semi_major, semi_minor, tilt (deg), density
            [0.0, 0.0, 0.69, 0.92, 0.0, 2.0],
            [0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98],
            [0.22, 0.0, 0.11, 0.31, -18.0, -0.02],
            [-0.22, 0.0, 0.16, 0.41, 18.0, -0.02],
            [0.0, 0.35, 0.21, 0.25, 0.0, 0.01],
            [0.0, 0.1, 0.046, 0.046, 0.0, 0.01],
            [0.0, -0.1, 0.046, 0.046, 0.0, 0.01],
            [-0.08, -0.605, 0.046, 0.023, 0.0, 0.01],
            [0.0, -0.605, 0.023, 0.023, 0.0, 0.01],
            [0.06, -0.605, 0.023, 0.046, 0.0, 0.01],
        ];
        let ellipses = TABLE
            .iter()
            .map(|&[cx, cy, a, b, deg, rho]| {
                Ellipse::new(cx, cy, a, b, deg.to_radians(), rho)
                    .expect("Shepp-Logan table is valid")
            })
            .collect();
        Self { ellipses }
    }
}

impl Phantom for EllipsePhantom {
    fn radon(&self, theta: f64, t: f64) -> f64 {
        self.ellipses.iter().map(|e| e.radon(theta, t)).sum()
    }

    fn density(&self, x: f64, y: f64) -> f64 {
        self.ellipses
            .iter()
            .filter(|e| e.contains(x, y))
            .map(|e| e.density)
            .sum()
    }
}

/// Text form: one ellipse per line,
/// `center_x center_y semi_major semi_minor tilt_radians density`.
/// Blank lines and lines starting with `#` are ignored.
impl FromStr for EllipsePhantom {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut ellipses = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields = line
                .split_whitespace()
                .map(f64::from_str)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))?;
            let [cx, cy, a, b, tilt, rho] = fields[..] else {
                return Err(Error::Format(format!(
                    "line {}: expected 6 numbers, found {}",
                    lineno + 1,
                    fields.len()
                )));
            };
            ellipses.push(Ellipse::new(cx, cy, a, b, tilt, rho)?);
        }
        Self::new(ellipses)
    }
}

impl fmt::Display for EllipsePhantom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# center_x center_y semi_major semi_minor tilt density")?;
        for e in &self.ellipses {
            writeln!(
                f,
                "{} {} {} {} {} {}",
                e.center_x, e.center_y, e.semi_major, e.semi_minor, e.tilt, e.density
            )?;
        }
        Ok(())
    }
}
