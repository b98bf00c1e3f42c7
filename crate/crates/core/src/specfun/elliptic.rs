//! Complete elliptic integral of the first kind and the Grötzsch modulus
//! function μ, both through the arithmetic-geometric mean.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Result};
use crate::solve::bisect;

/// Modulus `k` together with its complement `k' = sqrt(1 - k²)`.
///
/// Both are stored so that values of `k` close to 1 keep full relative
/// precision in `k'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    pub k: f64,
    pub k_prime: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return domain("EllipticModulus", format!("k = {k} is outside (0, 1)"));
        }
        Ok(Self {
            k,
            k_prime: complement(k),
        })
    }

    /// Builds the modulus from its complement.
    pub fn from_complement(k_prime: f64) -> Result<Self> {
        let m = Self::new(k_prime)?;
        Ok(Self {
            k: m.k_prime,
            k_prime: m.k,
        })
    }

    /// Builds the modulus from `k²` and `k'² = 1 - k²` given separately, so
    /// that either may be far below machine epsilon.
    pub fn from_squares(k2: f64, k_prime2: f64) -> Result<Self> {
        if !(k2 > 0.0 && k_prime2 > 0.0) || ((k2 + k_prime2) - 1.0).abs() > 1e-12 {
            return domain(
                "EllipticModulus",
                format!("k² = {k2} and k'² = {k_prime2} are not complementary"),
            );
        }
        Ok(Self {
            k: k2.sqrt(),
            k_prime: k_prime2.sqrt(),
        })
    }

    /// μ(k) = (π/2) AGM(1, k') / AGM(1, k), accurate at both ends of (0, 1).
    pub fn mu(self) -> f64 {
        FRAC_PI_2 * agm(1.0, self.k_prime).0 / agm(1.0, self.k).0
    }

    pub fn complementary(self) -> Self {
        Self {
            k: self.k_prime,
            k_prime: self.k,
        }
    }

    /// K(k).
    pub fn big_k(self) -> f64 {
        PI / (2.0 * agm(1.0, self.k_prime).0)
    }

    /// K(k').
    pub fn big_k_prime(self) -> f64 {
        PI / (2.0 * agm(1.0, self.k).0)
    }
}

/// sqrt(1 - x²) without cancellation near |x| = 1.
pub fn complement(x: f64) -> f64 {
    ((1.0 - x) * (1.0 + x)).sqrt()
}

/// Arithmetic-geometric mean of `a` and `b`, with the number of iterations
/// needed to bring the two means within relative 1e-15.
pub fn agm(mut a: f64, mut b: f64) -> (f64, usize) {
    let mut steps = 0;
    while (a - b).abs() > 1e-15 * a.abs() && steps < 64 {
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        steps += 1;
    }
    (0.5 * (a + b), steps)
}

/// Complete elliptic integral of the first kind, K(k) = π / (2 AGM(1, k')).
pub fn ell_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return domain("ell_K", format!("k = {k} is outside [0, 1)"));
    }
    if k == 0.0 {
        return Ok(FRAC_PI_2);
    }
    Ok(PI / (2.0 * agm(1.0, complement(k)).0))
}

/// Grötzsch ring modulus μ(r) = (π/2) K(r')/K(r), strictly decreasing on (0, 1).
pub fn mu(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return domain("mu", format!("r = {r} is outside (0, 1)"));
    }
    Ok(mu_unchecked(r))
}

fn mu_unchecked(r: f64) -> f64 {
    if r < 1e-150 {
        // μ(r) = log(4/r) + O(r² log r)
        return (4.0 / r).ln();
    }
    if r > 1.0 - 1e-10 {
        // μ(r) μ(r') = π²/4
        return PI * PI / (4.0 * mu_unchecked(complement(r)));
    }
    FRAC_PI_2 * agm(1.0, complement(r)).0 / agm(1.0, r).0
}

/// Inverse of μ by bisection: returns `r` with μ(r) = `y`.
pub fn mu_inv(y: f64) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) {
        return domain("mu_inv", format!("y = {y} must be positive"));
    }
    if y > 40.0 {
        return Ok(4.0 * (-y).exp());
    }
    Ok(bisect(|r| mu_unchecked(r) - y, 0.0, 1.0, 200))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_at_zero() {
        assert_eq!(ell_k(0.0).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn k_domain() {
        assert!(ell_k(1.0).is_err());
        assert!(ell_k(-0.1).is_err());
    }

    #[test]
    fn agm_converges_quickly() {
        let (_, steps) = agm(1.0, complement(0.5));
        assert!(steps <= 6, "{steps} steps");
    }

    #[test]
    fn mu_at_self_complementary_point() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((mu(r).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn mu_domain() {
        assert!(mu(0.0).is_err());
        assert!(mu(1.0).is_err());
    }

    #[test]
    fn mu_tiny_argument_uses_log_asymptote() {
        let r = 1e-200;
        assert_eq!(mu(r).unwrap(), (4.0 / r).ln());
    }

    #[test]
    fn modulus_complement() {
        let m = EllipticModulus::new(0.6).unwrap();
        assert!((m.k_prime - 0.8).abs() < 1e-15);
        let c = m.complementary();
        assert_eq!(c.k, m.k_prime);
        assert!((m.big_k_prime() - c.big_k()).abs() < 1e-15);
    }
}
