//! Closed-form conformal capacities and capacity bounds in the plane.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::hypgeom::rho_disk;
use crate::specfun::{mu, sn_imag_with_complement, theta23, theta4, EllipticModulus};
use crate::ComplexPoint;

/// Capacity of a hyperbolic disk in the unit disk with hyperbolic perimeter `p`.
pub fn cap_disk_by_perimeter(p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return domain("cap_disk_by_perimeter", format!("perimeter {p} must be positive"));
    }
    let two_pi = 2.0 * PI;
    Ok(two_pi / ((two_pi + p.hypot(two_pi)) / p).ln())
}

/// Capacity of the hyperbolic disk of radius `r` in the unit disk.
pub fn cap_hyp_disk(r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return domain("cap_hyp_disk", format!("radius {r} must be positive"));
    }
    Ok(2.0 * PI / -(0.5 * r).tanh().ln())
}

/// Capacity of the annulus `a < |z| < b`.
pub fn mod_annulus(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return domain("mod_annulus", format!("radii must satisfy 0 < {a} < {b}"));
    }
    Ok(2.0 * PI / (b / a).ln())
}

/// Grötzsch capacity γ₂(s) = 2π/μ(1/s), `s > 1`.
pub fn gamma2(s: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return domain("gamma2", format!("s = {s} must exceed 1"));
    }
    let r = 1.0 / s;
    // r' = sqrt((s-1)(s+1))/s keeps precision for s near 1
    let r_prime = ((s - 1.0) * (s + 1.0)).sqrt() / s;
    let m = EllipticModulus { k: r, k_prime: r_prime };
    Ok(2.0 * PI / m.mu())
}

/// Teichmüller capacity τ₂(s) = γ₂(√(s+1))/2, `s > 0`.
pub fn tau2(s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return domain("tau2", format!("s = {s} must be positive"));
    }
    let root = (s + 1.0).sqrt();
    let m = EllipticModulus {
        k: 1.0 / root,
        k_prime: (s / (s + 1.0)).sqrt(),
    };
    Ok(PI / m.mu())
}

/// Capacity of the unit disk minus the radial segment `[0, r]`.
pub fn cap_segment(r: f64) -> Result<f64> {
    Ok(2.0 * PI / mu(r)?)
}

/// Capacity of the unit disk minus `m` radial segments `[0, s e^{2πij/m}]`.
pub fn cap_symmetric_segments(m: u32, s: f64) -> Result<f64> {
    if m < 3 {
        return domain("cap_symmetric_segments", format!("m = {m} must be at least 3"));
    }
    if !(s > 0.0 && s < 1.0) {
        return domain("cap_symmetric_segments", format!("s = {s} is outside (0, 1)"));
    }
    let mf = m as f64;
    let sm = s.powi(m as i32);
    if sm == 0.0 {
        // μ(r) ~ log(4/r)
        return Ok(2.0 * PI * mf / (4f64.ln() - mf * s.ln()));
    }
    Ok(2.0 * PI * mf / mu(sm)?)
}

/// Hyperbolic perimeter `2m log((1+s)/(1-s))` of the `m` radial segments.
pub fn symmetric_segments_perimeter(m: u32, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain("symmetric_segments_perimeter", format!("s = {s} is outside (0, 1)"));
    }
    Ok(2.0 * m as f64 * ((1.0 + s) / (1.0 - s)).ln())
}

/// `(c, d)`: the capacity of the `m` radial segments and that of the single
/// segment with the same hyperbolic perimeter.
pub fn symmetric_segments_vs_segment(m: u32, s: f64) -> Result<(f64, f64)> {
    let c = cap_symmetric_segments(m, s)?;
    let t = symmetric_segments_perimeter(m, s)?;
    Ok((c, cap_segment((0.25 * t).tanh())?))
}

/// Labelled lower and upper bounds for a capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityBounds {
    pub lower: Vec<(String, f64)>,
    pub upper: Vec<(String, f64)>,
    pub reference: Option<f64>,
}

impl CapacityBounds {
    pub fn best_lower(&self) -> Option<f64> {
        self.lower.iter().map(|(_, v)| *v).reduce(f64::max)
    }

    pub fn best_upper(&self) -> Option<f64> {
        self.upper.iter().map(|(_, v)| *v).reduce(f64::min)
    }

    pub fn lower_value(&self, label: &str) -> Option<f64> {
        self.lower.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    pub fn upper_value(&self, label: &str) -> Option<f64> {
        self.upper.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    /// Fails if some lower bound exceeds some upper bound, or the reference
    /// value lies outside the bounds by more than `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        for (ll, lv) in &self.lower {
            for (ul, uv) in &self.upper {
                if lv > uv {
                    return Err(Error::Constraint(format!(
                        "lower bound {ll} = {lv} exceeds upper bound {ul} = {uv}"
                    )));
                }
            }
            if let Some(r) = self.reference {
                if *lv > r + tol {
                    return Err(Error::Constraint(format!(
                        "lower bound {ll} = {lv} exceeds reference {r}"
                    )));
                }
            }
        }
        if let Some(r) = self.reference {
            for (ul, uv) in &self.upper {
                if *uv < r - tol {
                    return Err(Error::Constraint(format!(
                        "upper bound {ul} = {uv} is below reference {r}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Hyperbolic perimeter `π sh t + 2t` of the upper half of a hyperbolic
/// disk of radius `t`.
pub fn halfdisk_perimeter(t: f64) -> f64 {
    PI * t.sinh() + 2.0 * t
}

/// Bounds for the capacity of the upper half of a hyperbolic disk of radius
/// `t` in the unit disk: `symmetrization`, `perimeter-segment` (segment of
/// equal perimeter), `split-families` lower bounds and the
/// `perimeter-disk` upper bound.
pub fn halfdisk_bounds(t: f64) -> Result<CapacityBounds> {
    if !(t > 0.0 && t.is_finite()) {
        return domain("halfdisk_bounds", format!("t = {t} must be positive"));
    }
    let p = halfdisk_perimeter(t);
    let sym = 2.0 * PI / mu(t.tanh())?;
    let seg = cap_segment((0.25 * p).tanh())?;
    let split = PI / -(0.5 * t).tanh().ln() + PI / mu(t.tanh())?;
    let upper = cap_disk_by_perimeter(p)?;
    Ok(CapacityBounds {
        lower: vec![
            ("symmetrization".into(), sym),
            ("perimeter-segment".into(), seg),
            ("split-families".into(), split),
        ],
        upper: vec![("perimeter-disk".into(), upper)],
        reference: None,
    })
}

/// Rectangle `(-a, a) × (0, b)` with the slit `[ic, id]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectSegmentSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RectSegmentSpec {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let spec = Self { a, b, c, d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c, d } = *self;
        if !(a > 0.0 && a.is_finite() && 0.0 < c && c < d && d < b && b.is_finite()) {
            return domain(
                "RectSegmentSpec",
                format!("need a > 0 and 0 < c < d < b, got a={a}, b={b}, c={c}, d={d}"),
            );
        }
        Ok(())
    }
}

/// Exact capacity of the rectangle-with-slit condenser through the elliptic
/// sine map onto the upper half-plane and a Möbius map onto the disk.
pub fn cap_rect_segment(spec: RectSegmentSpec) -> Result<f64> {
    spec.validate()?;
    let q = (-PI * spec.b / spec.a).exp();
    let theta = theta23(q)?;
    let k = theta.modulus();
    let ratio = theta4(q)? / theta.theta3;
    let k_prime = ratio * ratio;
    let alpha = spec.a / EllipticModulus { k, k_prime }.big_k();
    let c_hat = sn_imag_with_complement(spec.c / alpha, k, k_prime)?;
    let d_hat = sn_imag_with_complement(spec.d / alpha, k, k_prime)?;
    let r = (d_hat - c_hat) / (d_hat + c_hat);
    // r' = 2 sqrt(c d)/(c + d) without cancellation near r = 1
    let r_prime = 2.0 * (c_hat * d_hat).sqrt() / (d_hat + c_hat);
    Ok(2.0 * PI / EllipticModulus { k: r, k_prime: r_prime }.mu())
}

/// Hyperbolic perimeter of the tube `E(t)` of hyperbolic radius `t` around
/// the arc `|z| = r`, `θ ≤ arg z ≤ 2π`.
pub fn et_perimeter(theta: f64, r: f64, t: f64) -> Result<f64> {
    et_admissible(theta, r, t)?;
    Ok(2.0 * PI * t.sinh() + 4.0 * r * (2.0 * PI - theta) * t.cosh() / (1.0 - r * r))
}

/// Largest admissible `t` for the tube around the arc: the two end caps stay
/// apart, `3t ≤ 2 arsh(2r sin(θ/2)/(1-r²))`.
pub fn et_max_t(theta: f64, r: f64) -> f64 {
    2.0 * (2.0 * r * (0.5 * theta).sin() / (1.0 - r * r)).asinh() / 3.0
}

pub(crate) fn et_admissible(theta: f64, r: f64, t: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI / 2.0 + 1e-15) || !(r > 0.0 && r < 1.0) {
        return domain("E(t)", format!("need 0 < theta < pi/2 and 0 < r < 1, got {theta}, {r}"));
    }
    if !(t > 0.0 && t <= et_max_t(theta, r) * (1.0 + 1e-12)) {
        return Err(Error::Constraint(format!(
            "t = {t} is outside (0, {}] for theta = {theta}, r = {r}",
            et_max_t(theta, r)
        )));
    }
    Ok(())
}

/// Lower bound γ₂(1/th(ρ(x,y)/2)) for the capacity of any continuum in the
/// unit disk containing `x` and `y`.
pub fn lb_continuum(x: ComplexPoint, y: ComplexPoint) -> Result<f64> {
    let d = rho_disk(x, y)?;
    if d == 0.0 {
        return domain("lb_continuum", format!("coincident points {x}"));
    }
    cap_segment((0.5 * d).tanh())
}
