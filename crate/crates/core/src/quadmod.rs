//! Conformal modulus of quadrilaterals with vertices `0, 1, A, B` in the
//! upper half-plane.
//!
//! [`qm`] handles convex quadrilaterals through a Schwarz–Christoffel map
//! written with Gauss hypergeometric functions; [`qmt`] handles the
//! degenerate case where `A` lies on the segment `[1, B]`, so the
//! quadrilateral is a triangle with a marked boundary point.
//!
//! Both return the modulus of the quadrilateral in the sense that the
//! rectangle `0, 1, 1+hi, hi` has modulus `h`.
//!
//! The unknown of both nonlinear equations is an elliptic modulus `r`. It is
//! carried through the logistic variable `t = ln(r²/r'²)`, so that `r²` and
//! `r'² = 1 - r²` stay accurate when either is far below machine epsilon.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::solve::{brent, minimize};
use crate::specfun::{beta_fn, hyp2f1, hyp2f1_complement, EllipticModulus};
use crate::ComplexPoint;

/// Default half-width of the bracket in the logistic variable; `e^{-600}`
/// covers moduli from about 0.0052 to 192.
pub const DEFAULT_HALF_WIDTH: f64 = 600.0;
const CONSTRAINT_SLACK: f64 = 1e-12;
const RESIDUAL_LIMIT: f64 = 1e-6;
const NEWTON_STEP: f64 = 1e-7;
const MAX_DOUBLINGS: usize = 60;

/// `(r², r'²)` from the logistic variable.
fn squares(t: f64) -> (f64, f64) {
    if t >= 0.0 {
        let e = (-t).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = t.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    }
}

/// F(a, b; c; z) where `w = 1 - z` is known separately.
fn hyp_pair(a: f64, b: f64, c: f64, z: f64, w: f64) -> Result<f64> {
    if z <= 0.5 {
        hyp2f1(a, b, c, z)
    } else {
        hyp2f1_complement(a, b, c, w)
    }
}

/// Quadrilateral `0, 1, A, B` with its angle parameters: the interior
/// angles are `bπ` at 0, `(c-b)π` at 1, `(1-a)π` at `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrilateralAB {
    pub vertex_a: ComplexPoint,
    pub vertex_b: ComplexPoint,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadrilateralAB {
    pub fn new(vertex_a: ComplexPoint, vertex_b: ComplexPoint) -> Result<Self> {
        if !(vertex_a.im > 0.0 && vertex_b.im > 0.0) {
            return domain(
                "qm",
                format!("A = {vertex_a} and B = {vertex_b} must lie in the upper half-plane"),
            );
        }
        let one = ComplexPoint::new(1.0, 0.0);
        let arg_a1 = (vertex_a - one).arg();
        let arg_ab = (vertex_a - vertex_b).arg();
        let arg_b = vertex_b.arg();
        Ok(Self {
            vertex_a,
            vertex_b,
            a: 1.0 - (arg_a1 - arg_ab) / PI,
            b: arg_b / PI,
            c: (PI - arg_a1 + arg_b) / PI,
        })
    }

    /// Angle constraints of the convex case that do not hold.
    pub fn constraint_violations(&self) -> Vec<String> {
        let (a, b, c) = (self.a, self.b, self.c);
        let s = CONSTRAINT_SLACK;
        let mut out = Vec::new();
        if !(a > -s && a < 1.0 + s) {
            out.push(format!("a = {a} is outside (0, 1)"));
        }
        if !(b > -s && b < 1.0 + s) {
            out.push(format!("b = {b} is outside (0, 1)"));
        }
        if c < (a + b).max(1.0) - s {
            out.push(format!("c = {c} is below max(a+b, 1) = {}", (a + b).max(1.0)));
        }
        if c > 1.0 + a.min(b) + s {
            out.push(format!("c = {c} exceeds 1 + min(a, b) = {}", 1.0 + a.min(b)));
        }
        out
    }

    /// `L = B(c-b, 1-a)/B(b, c-b) e^{(b+1-c)πi}`.
    pub fn l_constant(&self) -> Result<ComplexPoint> {
        let (a, b, c) = (self.a, self.b, self.c);
        let ratio = beta_fn(c - b, 1.0 - a)? / beta_fn(b, c - b)?;
        Ok(ComplexPoint::from_polar(ratio, (b + 1.0 - c) * PI))
    }

    fn residual(&self, target: f64, t: f64) -> Result<f64> {
        let (a, b, c) = (self.a, self.b, self.c);
        let (z, w) = squares(t);
        let num = w.powf(c - a - b) * hyp_pair(c - a, c - b, c + 1.0 - a - b, w, z)?;
        let den = hyp_pair(a, b, c, z, w)?;
        Ok(num / den - target)
    }
}

/// How the root of the modulus equation was located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMethod {
    Bracketed,
    Minimized,
}

/// Result of [`qm_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct QmSolution {
    pub modulus: f64,
    /// `r²` and `r'²` at the root.
    pub r2: f64,
    pub r_prime2: f64,
    pub residual: f64,
    pub method: RootMethod,
    pub warnings: Vec<String>,
}

/// Conformal modulus of the quadrilateral `0, 1, A, B`.
pub fn qm(vertex_a: ComplexPoint, vertex_b: ComplexPoint) -> Result<f64> {
    Ok(qm_detailed(vertex_a, vertex_b, DEFAULT_HALF_WIDTH)?.modulus)
}

/// [`qm`] with the bracket `[-half_width, half_width]` in the logistic
/// variable, reporting the root and any violated angle constraints.
///
/// Violated constraints are reported, not rejected: the reciprocal identity
/// maps convex data outside the convex parameter range.
pub fn qm_detailed(vertex_a: ComplexPoint, vertex_b: ComplexPoint, half_width: f64) -> Result<QmSolution> {
    qm_bracketed(vertex_a, vertex_b, -half_width, half_width)
}

/// [`qm_detailed`] on the bracket `[lo, hi]` of the logistic variable
/// `ln(r²/r'²)`.
pub fn qm_bracketed(vertex_a: ComplexPoint, vertex_b: ComplexPoint, lo: f64, hi: f64) -> Result<QmSolution> {
    let quad = QuadrilateralAB::new(vertex_a, vertex_b)?;
    let warnings = quad.constraint_violations();
    let one = ComplexPoint::new(1.0, 0.0);
    let target = ((vertex_a - one) / quad.l_constant()?).re;

    let mut failure: Option<Error> = None;
    let mut h = |t: f64| match quad.residual(target, t) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let (h_lo, h_hi) = (h(lo), h(hi));
    let (mut t, method) = if h_lo * h_hi < 0.0 {
        (brent(&mut h, lo, hi, 1e-14, 300)?, RootMethod::Bracketed)
    } else {
        (
            minimize(|t| h(t).powi(2), lo, hi, 1e-12, 500)?,
            RootMethod::Minimized,
        )
    };
    let mut residual = h(t);
    let slope = (h(t + NEWTON_STEP) - h(t - NEWTON_STEP)) / (2.0 * NEWTON_STEP);
    if slope.is_finite() && slope != 0.0 {
        let polished = t - residual / slope;
        let r = h(polished);
        if r.abs() < residual.abs() {
            t = polished;
            residual = r;
        }
    }
    if let Some(e) = failure {
        if !residual.is_finite() {
            return Err(e);
        }
    }
    if !(residual.abs() <= RESIDUAL_LIMIT) {
        return Err(Error::NoRoot(format!(
            "qm({vertex_a}, {vertex_b}): best residual {residual:e} exceeds {RESIDUAL_LIMIT:e}"
        )));
    }
    let (r2, r_prime2) = squares(t);
    let modulus = 2.0 / PI * EllipticModulus::from_squares(r2, r_prime2)?.mu();
    Ok(QmSolution {
        modulus,
        r2,
        r_prime2,
        residual,
        method,
        warnings,
    })
}

/// Mirror image in the line `Re z = 1/2`, relabelled so the vertices again
/// read `0, 1, A', B'`: `(1 - conj(B), 1 - conj(A))`.
pub fn qm_symmetry_pair(vertex_a: ComplexPoint, vertex_b: ComplexPoint) -> (ComplexPoint, ComplexPoint) {
    let one = ComplexPoint::new(1.0, 0.0);
    (one - vertex_b.conj(), one - vertex_a.conj())
}

/// Vertices of the conjugate quadrilateral `B, 0, 1, A` normalized to
/// `0, 1, A', B'`; its modulus is the reciprocal of the original one.
pub fn qm_reciprocal_pair(vertex_a: ComplexPoint, vertex_b: ComplexPoint) -> (ComplexPoint, ComplexPoint) {
    let one = ComplexPoint::new(1.0, 0.0);
    ((vertex_b - one) / (vertex_a - one), -one / (vertex_a - one))
}

/// Quadrilateral `0, 1, A, B` with `A` on the segment `[1, B]`; `alpha` and
/// `beta` are the interior angles at 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriQuadrilateral {
    pub vertex_a: ComplexPoint,
    pub vertex_b: ComplexPoint,
    pub alpha: f64,
    pub beta: f64,
}

impl TriQuadrilateral {
    pub fn new(vertex_a: ComplexPoint, vertex_b: ComplexPoint) -> Result<Self> {
        if !(vertex_b.im > 0.0) {
            return domain("qmt", format!("B = {vertex_b} must lie in the upper half-plane"));
        }
        let one = ComplexPoint::new(1.0, 0.0);
        let ratio = (vertex_a - one) / (vertex_b - one);
        if ratio.im.abs() > 1e-12 || !(ratio.re > 0.0 && ratio.re < 1.0) {
            return Err(Error::Constraint(format!(
                "qmt: A = {vertex_a} is not inside the segment [1, {vertex_b}]"
            )));
        }
        let alpha = vertex_b.arg();
        let beta = PI - (vertex_b - one).arg();
        if !(alpha > 0.0 && alpha < PI && beta > 0.0 && beta < PI) {
            return Err(Error::Constraint(format!(
                "qmt: angles alpha = {alpha}, beta = {beta} must lie in (0, pi)"
            )));
        }
        Ok(Self {
            vertex_a,
            vertex_b,
            alpha,
            beta,
        })
    }

    /// Distance from 1 of the image of the real point `s > 1`, with
    /// `x = 1 - 1/s` given through its logistic variable.
    ///
    /// The map sends `(1, ∞)` onto `[1, B]`, and along that ray
    /// `f(s) = 1 + e^{i(π-β)} ∫₁ˢ t^{p-1}(t-1)^{q-1} dt / B(p, q)`, where the
    /// integral is the incomplete beta function `B_x(q, 1-p-q)`.
    pub fn image_distance(&self, t: f64) -> Result<f64> {
        let p = self.alpha / PI;
        let q = self.beta / PI;
        let (x, w) = squares(t);
        let inc = x.powf(q) / q * hyp_pair(q, p + q, q + 1.0, x, w)?;
        Ok(inc / beta_fn(p, q)?)
    }
}

/// Conformal modulus of `0, 1, A, B` with `A` on the segment `[1, B]`.
pub fn qmt(vertex_a: ComplexPoint, vertex_b: ComplexPoint) -> Result<f64> {
    let tri = TriQuadrilateral::new(vertex_a, vertex_b)?;
    let target = (vertex_a - ComplexPoint::new(1.0, 0.0)).norm();
    let mut failure: Option<Error> = None;
    let mut h = |t: f64| match tri.image_distance(t) {
        Ok(v) => target - v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    // t = ln(s - 1); the lower end s -> 1+ has h > 0, the upper end grows
    // by doubling s until h changes sign.
    let mut lo = -DEFAULT_HALF_WIDTH;
    while h(lo) <= 0.0 {
        lo *= 2.0;
        if lo < -700.0 {
            return Err(Error::NoRoot(format!("qmt({vertex_a}, {vertex_b}): A too close to 1")));
        }
    }
    let mut d = 10.0f64;
    let mut doublings = 0;
    while h((d - 1.0).ln()) > 0.0 {
        d *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::NoRoot(format!(
                "qmt({vertex_a}, {vertex_b}): no sign change after {MAX_DOUBLINGS} doublings"
            )));
        }
    }
    let t = brent(&mut h, lo, (d - 1.0).ln(), 1e-14, 300)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let (x, w) = squares(t);
    Ok(FRAC_PI_2 / EllipticModulus::from_squares(x, w)?.mu())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    #[test]
    fn angle_parameters_of_square() {
        let q = QuadrilateralAB::new(c(1.0, 1.0), c(0.0, 1.0)).unwrap();
        assert!((q.a - 0.5).abs() < 1e-15);
        assert!((q.b - 0.5).abs() < 1e-15);
        assert!((q.c - 1.0).abs() < 1e-15);
        assert!(q.constraint_violations().is_empty());
    }

    #[test]
    fn rectangles() {
        for &h in &[0.5, 1.0, 2.0] {
            let m = qm(c(1.0, h), c(0.0, h)).unwrap();
            assert!((m - h).abs() < 1e-9, "h = {h}: {m}");
        }
    }

    #[test]
    fn first_table_row() {
        let m = qm(c(7.0, 5.0), c(-1.0, 2.0)).unwrap();
        assert!((m - 1.173_365_891_585_53).abs() < 1e-10, "{m}");
    }

    #[test]
    fn symmetry_pair_is_involution() {
        let (a, b) = (c(7.0, 5.0), c(-1.0, 2.0));
        let (a1, b1) = qm_symmetry_pair(a, b);
        assert_eq!((a1, b1), (c(2.0, 2.0), c(-6.0, 5.0)));
        assert_eq!(qm_symmetry_pair(a1, b1), (a, b));
    }

    #[test]
    fn upper_half_plane_required() {
        assert!(qm(c(1.0, -1.0), c(0.0, 1.0)).is_err());
        assert!(matches!(qmt(c(0.5, 0.5), c(0.0, 1.0)).map(|_| ()), Ok(())));
        assert!(matches!(qmt(c(0.5, 0.6), c(0.0, 1.0)), Err(Error::Constraint(_))));
    }

    #[test]
    fn qmt_matches_nearly_flat_qm() {
        // pushing A slightly out of the segment gives a convex quadrilateral
        let b = c(-0.3, 1.2);
        let a = c(1.0, 0.0) + (b - c(1.0, 0.0)) * 0.4;
        let outward = (b - c(1.0, 0.0)) * c(0.0, -1.0);
        let flat = qmt(a, b).unwrap();
        let near = qm(a + outward * 1e-7, b).unwrap();
        assert!((flat - near).abs() < 1e-5, "{flat} vs {near}");
    }

    #[test]
    fn qmt_collapsing_side() {
        // the modulus decays like beta / log(1/eps) as A -> 1
        let b = c(0.0, 1.0);
        let mut last = f64::INFINITY;
        for &eps in &[1e-2, 1e-4, 1e-8, 1e-12] {
            let a = c(1.0, 0.0) + (b - c(1.0, 0.0)) * eps;
            let m = qmt(a, b).unwrap();
            assert!(m < last);
            let wedge = FRAC_PI_2 / 2.0 / (1.0 / eps).ln();
            assert!((m / wedge - 1.0).abs() < 0.35, "eps {eps}: {m} vs {wedge}");
            if eps == 1e-4 {
                let near = qm(a + (b - c(1.0, 0.0)) * c(0.0, -1e-9), b).unwrap();
                assert!((m - near).abs() < 1e-4, "{m} vs {near}");
            }
            last = m;
        }
        assert!(last < 0.05);
    }
}
