use super::Phantom;

/// `coefficient * x^px * y^py`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coefficient: f64,
    pub px: u32,
    pub py: u32,
}

/// A bivariate polynomial restricted to the unit disk.
///
/// Its Radon transform is integrated exactly: along the chord
/// `(t cos θ - s sin θ, t sin θ + s cos θ)`, `|s| ≤ √(1 - t²)`, every monomial
/// expands binomially into powers of `s`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolynomialImage {
    terms: Vec<Monomial>,
}

impl PolynomialImage {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Self { terms }
    }

    /// Builds from `(coefficient, px, py)` triples.
    pub fn from_terms(terms: &[(f64, u32, u32)]) -> Self {
        Self::new(
            terms
                .iter()
                .map(|&(coefficient, px, py)| Monomial {
                    coefficient,
                    px,
                    py,
                })
                .collect(),
        )
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|m| m.px + m.py).max().unwrap_or(0)
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|m| m.coefficient * x.powi(m.px as i32) * y.powi(m.py as i32))
            .sum()
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl Phantom for PolynomialImage {
    fn radon(&self, theta: f64, t: f64) -> f64 {
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let half = (1.0 - t * t).sqrt();
        let (sn, cs) = theta.sin_cos();
        // ∫_{-h}^{h} s^n ds
        let moment = |n: u32| {
            if n % 2 == 1 {
                0.0
            } else {
                2.0 * half.powi(n as i32 + 1) / f64::from(n + 1)
            }
        };
        let mut total = 0.0;
        for m in &self.terms {
            // (t cs - s sn)^px (t sn + s cs)^py
            for i in 0..=m.px {
                let xi =
                    binomial(m.px, i) * (t * cs).powi((m.px - i) as i32) * (-sn).powi(i as i32);
                for j in 0..=m.py {
                    let yj =
                        binomial(m.py, j) * (t * sn).powi((m.py - j) as i32) * cs.powi(j as i32);
                    total += m.coefficient * xi * yj * moment(i + j);
                }
            }
        }
        total
    }

    fn density(&self, x: f64, y: f64) -> f64 {
        if x * x + y * y > 1.0 {
            0.0
        } else {
            self.eval(x, y)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::oracle::line_integral_quadrature;
    use std::f64::consts::PI;

    #[test]
    fn linear_ridge() {
        // R(x)(θ, t) = 2 t √(1 - t²) cos θ
        let p = PolynomialImage::from_terms(&[(1.0, 1, 0)]);
        for &(theta, t) in &[(0.3f64, 0.4f64), (2.2, -0.7), (PI, 0.1)] {
            let expected = 2.0 * t * (1.0 - t * t).sqrt() * f64::cos(theta);
            assert!((p.radon(theta, t) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_quadrature() {
        let p = PolynomialImage::from_terms(&[(1.0, 0, 0), (0.5, 1, 1), (-0.3, 2, 0), (0.2, 0, 3)]);
        assert_eq!(p.degree(), 3);
        for &(theta, t) in &[(0.1, 0.0), (1.3, 0.55), (4.0, -0.82)] {
            let quad = line_integral_quadrature(&p, theta, t);
            assert!((p.radon(theta, t) - quad).abs() < 1e-9, "{theta} {t}");
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(6, 3), 20.0);
    }
}
