use crate::{Error, Result};

const DOMAIN_SLACK: f64 = 1e-12;

/// Clamps `t` into `[-1, 1]`, allowing `1e-12` of rounding slack.
pub fn clamp_unit(t: f64) -> Result<f64> {
    if t.is_nan() || t.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::OutOfDomain { value: t });
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// Chebyshev polynomial of the second kind, `U_k(cos θ) = sin((k+1)θ) / sin θ`.
///
/// Uses the sine quotient away from the endpoints and the three-term
/// recurrence where `|sin θ| ≤ 1e-8`.
pub fn chebyshev_u(k: usize, t: f64) -> Result<f64> {
    let t = clamp_unit(t)?;
    let degree = k.checked_add(1).ok_or(Error::DegreeOverflow(k))?;
    let theta = t.acos();
    let s = theta.sin();
    if s.abs() > 1e-8 {
        return Ok((degree as f64 * theta).sin() / s);
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..k {
        (prev, cur) = (cur, 2.0 * t * cur - prev);
    }
    Ok(cur)
}

/// Fills `out[k] = U_k(t)` for `k < out.len()` by the recurrence
/// `U_{k+1} = 2t U_k - U_{k-1}`. `t` must already lie in `[-1, 1]`.
#[inline]
pub fn chebyshev_u_all(t: f64, out: &mut [f64]) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for slot in out.iter_mut() {
        *slot = cur;
        (prev, cur) = (cur, 2.0 * t * cur - prev);
    }
}
