//! The OPED transform: per-view sine coefficients and the polynomial
//! expansion evaluated from them.

mod chebyshev;
mod coefficients;
mod evaluate;
mod filter;

pub use chebyshev::{chebyshev_u, chebyshev_u_all, clamp_unit};
pub use coefficients::{
    half_circle_symmetry_check, half_circle_symmetry_residual, sine_coefficients,
    SineCoefficientSet,
};
pub use evaluate::{
    oped_evaluate, oped_point, parity_equivalence, reindex_odd_full_to_half, ReconImage,
};
pub use filter::{bump_h, FilterProfile, FilterSpec};
