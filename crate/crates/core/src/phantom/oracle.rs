//! Quadrature oracle for line integrals, independent of the closed forms.

use super::Phantom;

/// Adaptive Simpson integration of the density along the line, an
/// oracle independent of the closed-form chord length.
pub fn line_integral_quadrature(p: &impl Phantom, theta: f64, t: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let f = |q: f64| p.density(t * c - q * s, t * s + q * c);
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let diff = left + right - whole;
        if depth > 60 || (depth > 8 && diff.abs() <= 1e-13) {
            return left + right + diff / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, depth + 1)
            + recurse(f, m, b, fm, frm, fb, right, depth + 1)
    }
    let (fa, fm, fb) = (f(-1.0), f(0.0), f(1.0));
    recurse(&f, -1.0, 1.0, fa, fm, fb, simpson(-1.0, 1.0, fa, fm, fb), 0)
}
