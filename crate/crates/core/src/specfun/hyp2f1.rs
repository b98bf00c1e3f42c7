//! Gauss hypergeometric function ₂F₁(a, b; c; z) for real parameters and
//! real `z < 1`.
//!
//! * `z` in `[0, 1/2]`: the defining power series.
//! * `z < 0`: Pfaff's transformation onto `z/(z-1)` in `(0, 1)`.
//! * `z` in `(1/2, 1)`: the `z -> 1-z` connection formula. When `c-a-b` lies
//!   close to an integer the two terms of that formula cancel
//!   catastrophically; there the value is interpolated in `c` between the
//!   exact logarithmic formula at the integer and the generic formula at
//!   well-separated offsets.

use super::gamma::{digamma, gamma_fn, rgamma};
use crate::error::{domain, Error, Result};

const MAX_TERMS: usize = 200;
const SERIES_RTOL: f64 = 1e-15;
/// Spacing of the interpolation nodes in `c` around an integer `c-a-b`.
const NEAR_INTEGER_STEP: f64 = 2e-3;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// F(a, b; c; z).
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return domain("hyp2f1", format!("c = {c} is a nonpositive integer"));
    }
    if !(z < 1.0) || !a.is_finite() || !b.is_finite() || !c.is_finite() {
        return domain("hyp2f1", format!("z = {z} is outside (-inf, 1)"));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        // terminating polynomial
        return series(a, b, c, z, usize::MAX);
    }
    if z < 0.0 {
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * hyp2f1(a, c - b, c, w)?);
    }
    if z <= 0.5 {
        return series(a, b, c, z, MAX_TERMS);
    }
    near_one(a, b, c, 1.0 - z)
}

/// F(a, b; c; 1 - w) for `w > 0`, with `w` supplied directly so that
/// arguments within machine epsilon of 1 keep their distance from 1.
pub fn hyp2f1_complement(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    if !(w > 0.0) || !w.is_finite() {
        return domain("hyp2f1", format!("1 - z = {w} must be positive"));
    }
    if w >= 0.5 || is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return hyp2f1(a, b, c, 1.0 - w);
    }
    if is_nonpositive_integer(c) {
        return domain("hyp2f1", format!("c = {c} is a nonpositive integer"));
    }
    if a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    near_one(a, b, c, w)
}

/// Direct summation of the power series.
fn series(a: f64, b: f64, c: f64, z: f64, max_terms: usize) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        n += 1;
        if term == 0.0 || (term.abs() <= SERIES_RTOL * sum.abs() * 0.1 && n > 2) {
            return Ok(sum);
        }
        if n >= max_terms {
            return Err(Error::NoConvergence {
                func: "hyp2f1",
                detail: format!(
                    "{max_terms} series terms did not reach relative {SERIES_RTOL:e} \
                     (a={a}, b={b}, c={c}, z={z})"
                ),
            });
        }
    }
}

fn near_one(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    let excess = c - a - b;
    if excess < 0.0 {
        // Euler: F(a,b;c;z) = (1-z)^(c-a-b) F(c-a, c-b; c; z)
        return Ok(w.powf(excess) * near_one(c - a, c - b, c, w)?);
    }
    let m = excess.round();
    let offset = excess - m;
    if offset.abs() >= 1.5 * NEAR_INTEGER_STEP {
        return connection(a, b, c, w);
    }
    // Degree-4 Lagrange interpolation in c through c0 + k*step, k = -2..=2,
    // with c0 = a + b + m evaluated by the logarithmic formula.
    let c0 = a + b + m;
    let step = NEAR_INTEGER_STEP;
    let ks = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let mut values = [0.0; 5];
    for (v, &k) in values.iter_mut().zip(&ks) {
        *v = if k == 0.0 {
            logarithmic(a, b, m as u32, w)?
        } else {
            connection(a, b, c0 + k * step, w)?
        };
    }
    let x = offset / step;
    let mut result = 0.0;
    for (i, &ki) in ks.iter().enumerate() {
        let mut basis = 1.0;
        for (j, &kj) in ks.iter().enumerate() {
            if i != j {
                basis *= (x - kj) / (ki - kj);
            }
        }
        result += basis * values[i];
    }
    Ok(result)
}

/// Generic `z -> 1-z` connection formula; requires `c-a-b` non-integer.
fn connection(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    let d = c - a - b;
    let gc = gamma_fn(c)?;
    let first = gc * gamma_fn(d)? * rgamma(c - a) * rgamma(c - b);
    let second = gc * gamma_fn(-d)? * rgamma(a) * rgamma(b);
    let mut value = 0.0;
    if first != 0.0 {
        value += first * series(a, b, 1.0 - d, w, MAX_TERMS)?;
    }
    if second != 0.0 {
        value += second * w.powf(d) * series(c - a, c - b, 1.0 + d, w, MAX_TERMS)?;
    }
    Ok(value)
}

/// Logarithmic case `c = a + b + m`, `m >= 0` an integer, `w = 1 - z`.
fn logarithmic(a: f64, b: f64, m: u32, w: f64) -> Result<f64> {
    let mf = m as f64;
    let c = a + b + mf;
    let gc = gamma_fn(c)?;

    // finite part
    let mut finite = 0.0;
    if m > 0 {
        let prefactor = gamma_fn(mf)? * gc * rgamma(a + mf) * rgamma(b + mf);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..(m - 1) {
            let nf = n as f64;
            term *= (a + nf) * (b + nf) / ((nf + 1.0) * (1.0 - mf + nf)) * w;
            sum += term;
        }
        finite = prefactor * sum;
    }

    // logarithmic series
    let ln_w = w.ln();
    let prefactor = gc * rgamma(a) * rgamma(b) * (-w).powi(m as i32);
    if prefactor == 0.0 {
        return Ok(finite);
    }
    let mut factorial_m = 1.0;
    for k in 1..=m {
        factorial_m *= k as f64;
    }
    // coefficient (a+m)_n (b+m)_n / (n! (n+m)!) w^n
    let mut coeff = 1.0 / factorial_m;
    let mut psi_n1 = digamma(1.0);
    let mut psi_nm1 = digamma(mf + 1.0);
    let mut psi_a = digamma(a + mf);
    let mut psi_b = digamma(b + mf);
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let bracket = ln_w - psi_n1 - psi_nm1 + psi_a + psi_b;
        let term = coeff * bracket;
        sum += term;
        if coeff == 0.0 || (n > 2 && coeff.abs() * (bracket.abs() + 1.0) <= SERIES_RTOL * 0.1 * sum.abs()) {
            return Ok(finite - prefactor * sum);
        }
        coeff *= (a + mf + nf) * (b + mf + nf) / ((nf + 1.0) * (nf + mf + 1.0)) * w;
        psi_n1 += 1.0 / (nf + 1.0);
        psi_nm1 += 1.0 / (nf + mf + 1.0);
        psi_a += 1.0 / (a + mf + nf);
        psi_b += 1.0 / (b + mf + nf);
    }
    Err(Error::NoConvergence {
        func: "hyp2f1",
        detail: format!("logarithmic series (a={a}, b={b}, m={m}, 1-z={w})"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain power series summed until terms vanish; converges for |z| < 1,
    /// slowly near 1, which is acceptable for an oracle.
    fn brute_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..200_000 {
            let nf = n as f64;
            term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() && n > 10 {
                break;
            }
        }
        sum
    }

    #[test]
    fn zero_argument() {
        assert_eq!(hyp2f1(0.3, 0.7, 1.1, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn log_closed_form() {
        // F(1,1;2;z) = -ln(1-z)/z
        let v = hyp2f1(1.0, 1.0, 2.0, 0.5).unwrap();
        assert!((v - 1.386_294_361_119_890_6).abs() < 1e-15);
        for &z in &[0.7, 0.9, 0.99, 0.999_999] {
            let exact = -(1.0 - z as f64).ln() / z;
            let v = hyp2f1(1.0, 1.0, 2.0, z).unwrap();
            assert!((v / exact - 1.0).abs() < 1e-13, "z = {z}: {v} vs {exact}");
        }
    }

    #[test]
    fn branches_agree_on_overlap() {
        let params = [
            (0.3, 0.7, 1.1),
            (0.25, 0.6, 1.7),
            (0.5, 0.5, 1.0),
            (0.4, 0.45, 1.85),
            (1.2, 0.3, 2.4),
        ];
        for &(a, b, c) in &params {
            for i in 0..=10 {
                let z = 0.45 + 0.01 * i as f64;
                let series_value = series(a, b, c, z, 400).unwrap();
                let transformed = near_one(a, b, c, 1.0 - z).unwrap();
                assert!(
                    (series_value - transformed).abs() < 1e-12 * series_value.abs(),
                    "({a},{b},{c};{z}): {series_value} vs {transformed}"
                );
            }
        }
    }

    #[test]
    fn logarithmic_cases_match_brute_force() {
        // c - a - b exactly 0, 1, 2 and -1
        let cases = [
            (0.5, 0.5, 1.0),
            (0.3, 0.45, 0.75),
            (0.3, 0.45, 1.75),
            (0.3, 0.45, 2.75),
            (1.3, 0.7, 1.0),
        ];
        for &(a, b, c) in &cases {
            for &z in &[0.55, 0.7, 0.9, 0.97] {
                let exact = brute_series(a, b, c, z);
                let v = hyp2f1(a, b, c, z).unwrap();
                assert!(
                    (v - exact).abs() < 1e-12 * exact.abs(),
                    "({a},{b},{c};{z}): {v} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn near_integer_excess_is_smooth() {
        // offsets straddling the interpolation window
        let (a, b) = (0.35, 0.4);
        let mut worst = 0.0f64;
        for &off in &[1e-14, 1e-9, -3e-7, 1e-4, 1e-3, 2.9e-3, 3.1e-3, -2.5e-3] {
            for &m in &[0.0, 1.0] {
                let c = a + b + m + off;
                for &z in &[0.6, 0.8, 0.95] {
                    let exact = brute_series(a, b, c, z);
                    let v = hyp2f1(a, b, c, z).unwrap();
                    let rel = (v - exact).abs() / exact.abs();
                    worst = worst.max(rel);
                }
            }
        }
        assert!(worst < 5e-12, "worst relative error {worst:e}");
    }

    #[test]
    fn negative_argument_via_pfaff() {
        for &z in &[-0.3, -2.0, -15.0] {
            // F(1,1;2;z) = ln(1-z)/(-z)
            let exact = (1.0 - z as f64).ln() / (-z);
            let v = hyp2f1(1.0, 1.0, 2.0, z).unwrap();
            assert!((v - exact).abs() < 1e-14 * exact.abs(), "z = {z}");
        }
        let z = -0.4;
        assert!((hyp2f1(0.3, 0.8, 1.4, z).unwrap() - brute_series(0.3, 0.8, 1.4, z)).abs() < 1e-14);
    }

    #[test]
    fn complement_argument() {
        // F(1,1;2;1-w) = -ln(w)/(1-w) for w far below machine epsilon
        for &w in &[1e-3, 1e-17, 1e-40] {
            let exact = -(w as f64).ln() / (1.0 - w);
            let v = hyp2f1_complement(1.0, 1.0, 2.0, w).unwrap();
            assert!((v / exact - 1.0).abs() < 1e-14, "w = {w}");
        }
        let v = hyp2f1_complement(0.3, 0.7, 1.1, 0.8).unwrap();
        assert_eq!(v, hyp2f1(0.3, 0.7, 1.1, 0.2).unwrap());
    }

    #[test]
    fn errors() {
        assert!(matches!(hyp2f1(0.5, 0.5, -2.0, 0.3), Err(Error::Domain { .. })));
        assert!(matches!(hyp2f1(0.5, 0.5, 1.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(
            series(0.5, 0.5, 1.0, 0.999, 200),
            Err(Error::NoConvergence { .. })
        ));
    }
}
