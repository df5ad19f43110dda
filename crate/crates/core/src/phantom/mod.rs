//! Analytic test images and their sampled Radon data.

mod ellipse;
mod geometry;
mod polynomial;

#[cfg(test)]
pub(crate) mod oracle;

pub use ellipse::{Ellipse, EllipsePhantom};
pub use geometry::{add_noise, sample_sinogram, AngleSet, Sinogram, SinogramGeometry};
pub use polynomial::{Monomial, PolynomialImage};

/// An image on the unit disk whose Radon transform is known in closed form.
pub trait Phantom: Sync {
    /// Integral of the image along the line `x cos(theta) + y sin(theta) = t`.
    fn radon(&self, theta: f64, t: f64) -> f64;

    /// Image value at `(x, y)`.
    fn density(&self, x: f64, y: f64) -> f64;
}
