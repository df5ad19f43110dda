//! OPED reconstruction on the unit disk.
//!
//! The pipeline samples Radon data on a Chebyshev ray geometry, reduces every
//! view to its discrete sine coefficients, and evaluates the orthogonal
//! polynomial expansion on a pixel grid. When the leading views of a half
//! circle are missing, the coefficients of those views are recovered from
//! small symmetric positive definite systems, one per frequency, before the
//! expansion is evaluated.
//!
//! Modules follow the pipeline order:
//!
//! * [`phantom`]: analytic test images, their Radon transforms and sinograms.
//! * [`transform`]: Chebyshev polynomials, filters, sine coefficients and
//!   the reconstruction sum.
//! * [`completion`]: the per-frequency completion systems.
//! * [`spectral`]: eigenvalues, condition numbers and the Slepian matrix.
//! * [`io`]: sinogram files, 16-bit PGM images, metrics and reports.
//! * [`verify`]: self-check suites used by `oped verify`.
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod completion;
pub mod error;
pub mod io;
pub mod linalg;
pub mod phantom;
pub mod spectral;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
