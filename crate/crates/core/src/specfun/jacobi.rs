//! Jacobi theta functions at zero argument, the elliptic sine on the real
//! and imaginary axes, and its inverse.

use std::f64::consts::FRAC_PI_2;

use super::elliptic::{agm, complement};
use crate::error::{domain, Error, Result};
use crate::quadrature::adaptive;

/// θ₂(0, q) and θ₃(0, q) for a nome `q` in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPair {
    pub q: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl ThetaPair {
    /// Elliptic modulus k = (θ₂/θ₃)² belonging to the nome.
    pub fn modulus(&self) -> f64 {
        let ratio = self.theta2 / self.theta3;
        ratio * ratio
    }
}

const THETA_TERM_TOL: f64 = 1e-16;

/// θ₂ = 2 Σ q^((n+1/2)²), θ₃ = 1 + 2 Σ q^(n²).
pub fn theta23(q: f64) -> Result<ThetaPair> {
    if !(q > 0.0 && q < 1.0) {
        return domain("theta23", format!("nome q = {q} is outside (0, 1)"));
    }
    let ln_q = q.ln();
    let mut theta2 = 0.0;
    for n in 0.. {
        let e = (n as f64 + 0.5) * (n as f64 + 0.5);
        let term = (e * ln_q).exp();
        theta2 += term;
        if term < THETA_TERM_TOL * theta2 {
            break;
        }
    }
    let mut theta3 = 0.0;
    for n in 1.. {
        let term = ((n * n) as f64 * ln_q).exp();
        theta3 += term;
        if term < THETA_TERM_TOL * (1.0 + 2.0 * theta3) {
            break;
        }
    }
    Ok(ThetaPair {
        q,
        theta2: 2.0 * theta2,
        theta3: 1.0 + 2.0 * theta3,
    })
}

/// θ₄(0, q) = 1 + 2 Σ (-1)^n q^(n²).
pub fn theta4(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return domain("theta4", format!("nome q = {q} is outside (0, 1)"));
    }
    let ln_q = q.ln();
    let mut sum = 0.0;
    for n in 1.. {
        let term = ((n * n) as f64 * ln_q).exp();
        sum += if n % 2 == 0 { term } else { -term };
        if term < THETA_TERM_TOL {
            break;
        }
    }
    Ok(1.0 + 2.0 * sum)
}

/// (sn, cn, dn)(u; k) for real `u` by the descending Landen (AGM) scheme.
/// `k_prime` must be the complement of `k`; passing it separately keeps
/// moduli near 1 accurate.
pub fn sncndn(u: f64, k: f64, k_prime: f64) -> (f64, f64, f64) {
    if k == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }
    let mut a = vec![1.0];
    let mut c = vec![k];
    let mut b = k_prime;
    while c.last().unwrap().abs() > 1e-16 * a.last().unwrap() && a.len() < 64 {
        let an = *a.last().unwrap();
        c.push(0.5 * (an - b));
        a.push(0.5 * (an + b));
        b = (an * b).sqrt();
    }
    let n = a.len() - 1;
    let mut phi = a[n] * u * 2f64.powi(n as i32);
    let mut prev = phi;
    for i in (1..=n).rev() {
        prev = phi;
        phi = 0.5 * (phi + (c[i] / a[i] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = if n == 0 { 1.0 } else { cn / (prev - phi).cos() };
    (sn, cn, dn)
}

/// Real `t` with sn(iy; k) = i t, via sn(iy; k) = i sn(y; k')/cn(y; k').
///
/// Valid on the strip |y| < K(k'), where cn(y; k') > 0.
pub fn sn_imag(y: f64, k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return domain("sn_imag", format!("k = {k} is outside (0, 1)"));
    }
    sn_imag_with_complement(y, k, complement(k))
}

/// As [`sn_imag`] with the complementary modulus supplied by the caller.
pub fn sn_imag_with_complement(y: f64, k: f64, k_prime: f64) -> Result<f64> {
    let quarter_period = FRAC_PI_2 / agm(1.0, k).0; // K(k')
    if !y.is_finite() || y.abs() >= quarter_period {
        return Err(Error::Pole {
            func: "sn_imag",
            at: y,
        });
    }
    let (s, c, _) = sncndn(y, k_prime, k);
    if c <= 0.0 {
        return Err(Error::Pole {
            func: "sn_imag",
            at: y,
        });
    }
    Ok(s / c)
}

/// sn⁻¹(w; k) = ∫₀^w dt/√((1−t²)(1−k²t²)) for 0 ≤ w ≤ 1.
///
/// The substitution t = sin θ removes the square-root endpoint singularity.
pub fn asn(w: f64, k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&w) {
        return domain("asn", format!("w = {w} is outside [0, 1]"));
    }
    if !(k >= 0.0 && k < 1.0) {
        return domain("asn", format!("k = {k} is outside [0, 1)"));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let k2 = k * k;
    adaptive(
        |theta: f64| {
            let s = theta.sin();
            1.0 / (1.0 - k2 * s * s).sqrt()
        },
        0.0,
        w.asin(),
        1e-14,
    )
}
