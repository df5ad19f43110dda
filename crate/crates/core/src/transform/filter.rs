use std::fmt;

use crate::{Error, Result};

/// `h_k(t) = (1-t)^{k+1} Σ_{j=0}^{k} C(k+j, j) t^j`, the degree `2k+1`
/// polynomial falling from 1 to 0 on `[0, 1]` with `k` vanishing derivatives
/// at both ends.
pub fn bump_h(k: u32, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut power = 1.0;
    for j in 0..=k {
        if j > 0 {
            binom *= f64::from(k + j) / f64::from(j);
            power *= t;
        }
        sum += binom * power;
    }
    (1.0 - t).powi(k as i32 + 1) * sum
}

/// Shape of the filter on `(τ, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterProfile {
    /// `(β - 1)(3u² - 2u³) + 1`, decreasing from 1 to `β`.
    Plateau { beta: f64 },
    /// `h_m(u)`, decreasing from 1 to 0 with `m` smooth derivatives.
    Bump { order: u32 },
}

/// The frequency filter η: 1 on `[0, τ]`, then the profile evaluated at
/// `u = (t - τ) / (1 - τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    tau: f64,
    profile: FilterProfile,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            tau: 0.0,
            profile: FilterProfile::Plateau { beta: 0.9 },
        }
    }
}

impl FilterSpec {
    pub fn plateau(tau: f64, beta: f64) -> Result<Self> {
        check_tau(tau)?;
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidFilter(format!(
                "beta must lie in [0, 1], got {beta}"
            )));
        }
        Ok(Self {
            tau,
            profile: FilterProfile::Plateau { beta },
        })
    }

    pub fn bump(tau: f64, order: u32) -> Result<Self> {
        check_tau(tau)?;
        Ok(Self {
            tau,
            profile: FilterProfile::Bump { order },
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn profile(&self) -> FilterProfile {
        self.profile
    }

    /// `η(1)`.
    pub fn beta(&self) -> f64 {
        match self.profile {
            FilterProfile::Plateau { beta } => beta,
            FilterProfile::Bump { .. } => 0.0,
        }
    }

    /// Whether η is strictly decreasing on `[τ, 1]`.
    pub fn is_strictly_decreasing(&self) -> bool {
        self.beta() < 1.0
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.tau {
            return 1.0;
        }
        match self.profile {
            // The cubic is continued by its end value β beyond t = 1.
            FilterProfile::Plateau { beta } => {
                if t >= 1.0 {
                    return beta;
                }
                let u = (t - self.tau) / (1.0 - self.tau);
                (beta - 1.0) * (3.0 * u * u - 2.0 * u * u * u) + 1.0
            }
            FilterProfile::Bump { order } => {
                if t >= 1.0 {
                    return 0.0;
                }
                bump_h(order, (t - self.tau) / (1.0 - self.tau))
            }
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::InvalidFilter(format!(
            "tau must lie in [0, 1), got {tau}"
        )));
    }
    Ok(())
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.profile {
            FilterProfile::Plateau { beta } => {
                write!(f, "plateau C3 cubic, tau={}, beta={beta}", self.tau)
            }
            FilterProfile::Bump { order } => write!(f, "bump h_{order}, tau={}", self.tau),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        for k in 0..8 {
            assert_eq!(bump_h(k, 0.0), 1.0);
            assert_eq!(bump_h(k, 1.0), 0.0);
        }
        assert!((bump_h(1, 0.5) - 0.5).abs() < 1e-15);
        // Symmetric about the midpoint: h_k(t) + h_k(1-t) = 1.
        for k in 0..6 {
            for &t in &[0.1, 0.25, 0.4] {
                assert!((bump_h(k, t) + bump_h(k, 1.0 - t) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bump_derivatives_vanish_at_ends() {
        // Finite differences of order j ≤ k should shrink like h^{k+1-j}.
        let k = 3;
        let h = 1e-3;
        for &end in &[0.0, 1.0] {
            let near = if end == 0.0 { h } else { 1.0 - h };
            let jump = (bump_h(k, near) - bump_h(k, end)).abs();
            assert!(jump < 1e-9, "{jump}");
        }
    }

    #[test]
    fn plateau_values() {
        let f = FilterSpec::plateau(0.3, 0.5).unwrap();
        assert_eq!(f.eval(0.2), 1.0);
        assert_eq!(f.eval(0.3), 1.0);
        assert_eq!(f.eval(1.0), 0.5);
        let f = FilterSpec::plateau(0.0, 0.9).unwrap();
        assert!((f.eval(0.5) - 0.95).abs() < 1e-15);
        assert_eq!(FilterSpec::bump(0.2, 3).unwrap().eval(1.0), 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(FilterSpec::plateau(1.0, 0.5).is_err());
        assert!(FilterSpec::plateau(-0.1, 0.5).is_err());
        assert!(FilterSpec::plateau(0.1, 1.5).is_err());
        assert!(FilterSpec::bump(1.2, 3).is_err());
    }

    #[test]
    fn non_increasing_on_grid() {
        let filters = [
            FilterSpec::plateau(0.0, 0.9).unwrap(),
            FilterSpec::plateau(0.25, 0.0).unwrap(),
            FilterSpec::bump(0.1, 3).unwrap(),
            FilterSpec::bump(0.5, 7).unwrap(),
        ];
        for f in filters {
            let mut prev = f.eval(0.0);
            for i in 1..=10_000 {
                let t = i as f64 / 10_000.0;
                let v = f.eval(t);
                assert!(v <= prev + 1e-15, "{f}: {t}");
                if t <= f.tau() {
                    assert_eq!(v, 1.0);
                }
                prev = v;
            }
        }
    }

    #[test]
    fn cubic_joins_smoothly() {
        // First derivative of the cubic is 0 at both ends of [τ, 1].
        let f = FilterSpec::plateau(0.2, 0.3).unwrap();
        let h = 1e-6;
        assert!((f.eval(0.2 + h) - 1.0).abs() < 1e-10);
        assert!((f.eval(1.0 - h) - 0.3).abs() < 1e-10);
    }
}
