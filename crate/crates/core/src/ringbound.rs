//! Lower bounds for the capacity of polygonal ring domains by decomposition
//! into quadrilaterals.
//!
//! A ring between an outer polygon `a_0 .. a_{m-1}` and an inner polygon
//! `b_0 .. b_{m-1}` is split into the quadrilaterals
//! `P_j = (a_{j-1}, a_j, b_j, b_{j-1})`. The curve families joining the outer
//! side to the inner side of distinct `P_j` are separate, so the capacity is
//! at least the sum of their moduli, `Σ 1/M(P_j)` with `M` the modulus in
//! the [`crate::quadmod`] convention.

use std::f64::consts::PI;

use crate::capforms::RectSegmentSpec;
use crate::error::{domain, Error, Result};
use crate::hypgeom::{signed_area, winding_number};
use crate::quadmod::{qm, qm_symmetry_pair, qmt};
use crate::ComplexPoint;

/// Relative tolerance for treating a vertex as a straight angle.
const COLLINEAR_TOL: f64 = 1e-10;
/// Slack for the orientation tests of the disjointness check.
const ORIENT_SLACK: f64 = 1e-14;

/// Ring domain between two polygons with matched vertex lists.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalRing {
    pub outer: Vec<ComplexPoint>,
    pub inner: Vec<ComplexPoint>,
}

impl PolygonalRing {
    /// Checks that both lists have the same length `m ≥ 3`, every
    /// quadrilateral is positively oriented, no two quadrilaterals cross,
    /// and the inner vertices lie inside the outer polygon.
    pub fn new(outer: Vec<ComplexPoint>, inner: Vec<ComplexPoint>) -> Result<Self> {
        let ring = Self { outer, inner };
        ring.validate()?;
        Ok(ring)
    }

    pub fn m(&self) -> usize {
        self.outer.len()
    }

    /// Vertices `(a_{j-1}, a_j, b_j, b_{j-1})` of the `j`-th quadrilateral,
    /// `j = 1..=m`.
    pub fn quadrilateral(&self, j: usize) -> [ComplexPoint; 4] {
        let m = self.m();
        let prev = (j + m - 1) % m;
        let cur = j % m;
        [self.outer[prev], self.outer[cur], self.inner[cur], self.inner[prev]]
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.outer.len();
        if m < 3 || self.inner.len() != m {
            return domain(
                "PolygonalRing",
                format!(
                    "need matching vertex lists of length at least 3, got {} and {}",
                    m,
                    self.inner.len()
                ),
            );
        }
        if signed_area(&self.outer) <= 0.0 {
            return Err(Error::Constraint("outer polygon must be counterclockwise".into()));
        }
        for &b in &self.inner {
            if winding_number(&self.outer, b) != 1 || on_polygon(&self.outer, b) {
                return Err(Error::Constraint(format!(
                    "inner vertex {b} is not strictly inside the outer polygon"
                )));
            }
        }
        let quads: Vec<_> = (1..=m).map(|j| self.quadrilateral(j)).collect();
        for (j, q) in quads.iter().enumerate() {
            if signed_area(q) <= 0.0 {
                return Err(Error::Constraint(format!(
                    "quadrilateral {} is degenerate or clockwise",
                    j + 1
                )));
            }
            for e in 0..4 {
                for f in (e + 2)..4 {
                    if e == 0 && f == 3 {
                        continue;
                    }
                    if segments_cross(q[e], q[(e + 1) % 4], q[f], q[(f + 1) % 4]) {
                        return Err(Error::Constraint(format!(
                            "quadrilateral {} is self-intersecting",
                            j + 1
                        )));
                    }
                }
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                let (p, q) = (&quads[i], &quads[j]);
                for e in 0..4 {
                    for f in 0..4 {
                        if segments_cross(p[e], p[(e + 1) % 4], q[f], q[(f + 1) % 4]) {
                            return Err(Error::Constraint(format!(
                                "quadrilaterals {} and {} overlap",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
                let (cp, cq) = (interior_point(p), interior_point(q));
                if winding_number(q, cp) != 0 || winding_number(p, cq) != 0 {
                    return Err(Error::Constraint(format!(
                        "quadrilaterals {} and {} overlap",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

fn cross(a: ComplexPoint, b: ComplexPoint) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Sign of the orientation of `(p, q, r)` with a relative dead zone.
fn orientation(p: ComplexPoint, q: ComplexPoint, r: ComplexPoint) -> i32 {
    let v = cross(q - p, r - p);
    let scale = (q - p).norm() * (r - p).norm();
    if v > ORIENT_SLACK * scale {
        1
    } else if v < -ORIENT_SLACK * scale {
        -1
    } else {
        0
    }
}

/// True when the open segments `(p1, p2)` and `(q1, q2)` cross at a single
/// interior point of both.
fn segments_cross(p1: ComplexPoint, p2: ComplexPoint, q1: ComplexPoint, q2: ComplexPoint) -> bool {
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    d1 * d2 < 0 && d3 * d4 < 0
}

fn on_polygon(poly: &[ComplexPoint], z: ComplexPoint) -> bool {
    let n = poly.len();
    (0..n).any(|j| {
        let (p, q) = (poly[j], poly[(j + 1) % n]);
        orientation(p, q, z) == 0 && (z - p).re * (z - q).re + (z - p).im * (z - q).im <= 0.0
    })
}

/// A point inside a positively oriented simple quadrilateral: the centroid
/// of whichever corner triangle is nondegenerate and inside.
fn interior_point(q: &[ComplexPoint; 4]) -> ComplexPoint {
    for k in 0..4 {
        let (a, b, c) = (q[k], q[(k + 1) % 4], q[(k + 2) % 4]);
        if orientation(a, b, c) > 0 {
            let g = (a + b + c) / 3.0;
            if winding_number(q, g) == 1 {
                return g;
            }
        }
    }
    (q[0] + q[1] + q[2] + q[3]) / 4.0
}

/// Maps `p0 -> 0`, `p1 -> 1` by `z -> (z - p0)/(p1 - p0)` and returns the
/// images of `p2, p3` as `(A, B)`.
pub fn normalize_quadrilateral(
    p0: ComplexPoint,
    p1: ComplexPoint,
    p2: ComplexPoint,
    p3: ComplexPoint,
) -> Result<(ComplexPoint, ComplexPoint)> {
    let side = p1 - p0;
    if side.norm() == 0.0 {
        return domain("normalize_quadrilateral", format!("degenerate side at {p0}"));
    }
    Ok(((p2 - p0) / side, (p3 - p0) / side))
}

/// Index of the vertex with a straight interior angle, if any.
fn straight_vertex(q: &[ComplexPoint; 4]) -> Option<usize> {
    (0..4).find(|&k| {
        let u = q[(k + 3) % 4] - q[k];
        let v = q[(k + 1) % 4] - q[k];
        let scale = u.norm() * v.norm();
        cross(u, v).abs() <= COLLINEAR_TOL * scale && (u.re * v.re + u.im * v.im) < 0.0
    })
}

/// Modulus of the quadrilateral `p0, p1, p2, p3` (positively oriented),
/// in the convention where the rectangle `0, 1, 1+hi, hi` has modulus `h`.
///
/// A vertex with a straight angle makes the quadrilateral a triangle with a
/// marked point; the vertices are then relabelled so that point becomes `A`
/// and [`qmt`] is used. Relabelling by two positions keeps the modulus.
pub fn quad_modulus(q: [ComplexPoint; 4]) -> Result<f64> {
    let rotate = |q: [ComplexPoint; 4]| [q[2], q[3], q[0], q[1]];
    match straight_vertex(&q) {
        None => {
            let (a, b) = normalize_quadrilateral(q[0], q[1], q[2], q[3])?;
            qm(a, b)
        }
        Some(k) => {
            let q = if k < 2 { rotate(q) } else { q };
            let (a, b) = normalize_quadrilateral(q[0], q[1], q[2], q[3])?;
            if k % 2 == 0 {
                qmt(a, b)
            } else {
                let (a, b) = qm_symmetry_pair(a, b);
                qmt(a, b)
            }
        }
    }
}

/// `Σ_j 1/M(P_j)`, a lower bound for the capacity of the ring.
pub fn ring_lower_bound(ring: &PolygonalRing) -> Result<f64> {
    Ok(ring_terms(ring)?.iter().map(|m| 1.0 / m).sum())
}

/// Moduli `M(P_j)`, `j = 1..=m`.
pub fn ring_terms(ring: &PolygonalRing) -> Result<Vec<f64>> {
    (1..=ring.m())
        .map(|j| {
            quad_modulus(ring.quadrilateral(j)).map_err(|e| Error::Quadrilateral {
                index: j,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Vertices `(A, B)` of the normalized trapezoid of the regular ring with
/// `m` sides and inner scale `lambda`.
pub fn regular_ring_vertices(m: u32, lambda: f64) -> (ComplexPoint, ComplexPoint) {
    let h = 0.5 * (1.0 - lambda) / (PI / m as f64).tan();
    (
        ComplexPoint::new(0.5 * (1.0 + lambda), h),
        ComplexPoint::new(0.5 * (1.0 - lambda), h),
    )
}

/// Ring between the regular `m`-gons with vertices `e^{2πij/m}` and
/// `λ e^{2πij/m}`.
pub fn regular_ring(m: u32, lambda: f64) -> Result<PolygonalRing> {
    check_regular(m, lambda)?;
    let outer: Vec<_> = (0..m)
        .map(|j| ComplexPoint::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
        .collect();
    let inner = outer.iter().map(|z| z * lambda).collect();
    PolygonalRing::new(outer, inner)
}

fn check_regular(m: u32, lambda: f64) -> Result<()> {
    if m < 3 || !(lambda > 0.0 && lambda < 1.0) {
        return domain("cap_regular_ring", format!("need m >= 3 and 0 < lambda < 1, got {m}, {lambda}"));
    }
    Ok(())
}

/// `m / M(Q_1)` for the regular ring; equality holds in the decomposition
/// bound because the radial sides are symmetry lines.
pub fn cap_regular_ring(m: u32, lambda: f64) -> Result<f64> {
    check_regular(m, lambda)?;
    let (a, b) = regular_ring_vertices(m, lambda);
    Ok(m as f64 / qm(a, b)?)
}

/// Heights `(y0, y1)` of the inner vertices on the slit used by
/// [`rect_segment_ring`].
pub fn rect_segment_split(spec: RectSegmentSpec) -> (f64, f64) {
    let third = (spec.d - spec.c) / 3.0;
    (spec.c + third, spec.d - third)
}

/// Six-quadrilateral decomposition of the rectangle `(-a, a) × (0, b)` minus
/// the slit `[ic, id]`, with inner vertices at the slit tips and at the
/// heights of [`rect_segment_split`].
///
/// Outer vertices: `a, a+bi, bi, -a+bi, -a, 0`; inner vertices:
/// `iy0, iy1, id, iy1, iy0, ic`. The quadrilaterals meeting the slit tips
/// have a straight angle there and are handled as triangles.
pub fn rect_segment_ring(spec: RectSegmentSpec) -> Result<PolygonalRing> {
    let (y0, y1) = rect_segment_split(spec);
    rect_segment_ring_with(spec, y0, y1)
}

/// [`rect_segment_ring`] with explicit split heights `c < y0 < y1 < d`.
pub fn rect_segment_ring_with(spec: RectSegmentSpec, y0: f64, y1: f64) -> Result<PolygonalRing> {
    spec.validate()?;
    if !(spec.c < y0 && y0 < y1 && y1 < spec.d) {
        return domain(
            "rect_segment_ring",
            format!("split heights must satisfy {} < {y0} < {y1} < {}", spec.c, spec.d),
        );
    }
    let c = |re: f64, im: f64| ComplexPoint::new(re, im);
    let (a, b) = (spec.a, spec.b);
    let outer = vec![c(a, 0.0), c(a, b), c(0.0, b), c(-a, b), c(-a, 0.0), c(0.0, 0.0)];
    let inner = vec![
        c(0.0, y0),
        c(0.0, y1),
        c(0.0, spec.d),
        c(0.0, y1),
        c(0.0, y0),
        c(0.0, spec.c),
    ];
    PolygonalRing::new(outer, inner)
}

/// Lower bound for the rectangle-with-slit capacity from the six
/// quadrilaterals, using the mirror symmetry `M(Q_1) = M(Q_4)`,
/// `M(Q_2) = M(Q_3)`, `M(Q_5) = M(Q_6)`.
pub fn rect_segment_lower_bound(spec: RectSegmentSpec) -> Result<f64> {
    let ring = rect_segment_ring(spec)?;
    let mut total = 0.0;
    for j in [1, 2, 6] {
        let m = quad_modulus(ring.quadrilateral(j)).map_err(|e| Error::Quadrilateral {
            index: j,
            source: Box::new(e),
        })?;
        total += 2.0 / m;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    #[test]
    fn normalization() {
        let (a, b) = (c(0.7, 0.9), c(-0.2, 1.1));
        let (na, nb) = normalize_quadrilateral(c(0.0, 0.0), c(1.0, 0.0), a, b).unwrap();
        assert_eq!((na, nb), (a, b));
        let t = |z: ComplexPoint| c(2.0, -1.0) + z * c(0.3, 1.7);
        let (ma, mb) = normalize_quadrilateral(t(c(0.0, 0.0)), t(c(1.0, 0.0)), t(a), t(b)).unwrap();
        assert!((ma - a).norm() < 1e-13 && (mb - b).norm() < 1e-13);
        assert!(normalize_quadrilateral(a, a, b, b).is_err());
    }

    #[test]
    fn regular_vertices_match_ring() {
        let (m, lambda) = (5u32, 0.3);
        let ring = regular_ring(m, lambda).unwrap();
        let q = ring.quadrilateral(1);
        let (a, b) = normalize_quadrilateral(q[0], q[1], q[2], q[3]).unwrap();
        let (ea, eb) = regular_ring_vertices(m, lambda);
        assert!((a - ea).norm() < 1e-14 && (b - eb).norm() < 1e-14);
    }

    #[test]
    fn regular_ring_equality() {
        for &(m, lambda) in &[(4u32, 0.4), (6, 0.6), (3, 0.2)] {
            let ring = regular_ring(m, lambda).unwrap();
            let bound = ring_lower_bound(&ring).unwrap();
            let exact = cap_regular_ring(m, lambda).unwrap();
            assert!((bound - exact).abs() < 1e-12 * exact, "{bound} vs {exact}");
        }
    }

    #[test]
    fn regular_ring_reference_values() {
        let v = cap_regular_ring(3, 0.2).unwrap();
        assert!((v / 4.620_063_402_623_52 - 1.0).abs() < 1e-6, "{v}");
        let v = cap_regular_ring(10, 0.8).unwrap();
        assert!((v / 28.685_657_989_005_6 - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn overlap_detected() {
        let outer = vec![c(3.0, 0.0), c(0.0, 3.0), c(-3.0, 0.0), c(0.0, -3.0)];
        let inner = vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        assert!(PolygonalRing::new(outer.clone(), inner).is_ok());
        // inner vertices permuted: quadrilaterals cross
        let twisted = vec![c(0.0, 1.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, -1.0)];
        assert!(PolygonalRing::new(outer.clone(), twisted).is_err());
        let outside = vec![c(1.0, 0.0), c(0.0, 1.0), c(-4.0, 0.0), c(0.0, -1.0)];
        assert!(PolygonalRing::new(outer, outside).is_err());
    }

    #[test]
    fn straight_vertices_found() {
        let q = [c(0.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.5)];
        assert_eq!(straight_vertex(&q), Some(3));
        // all four placements of the marked point give the same modulus
        let base = quad_modulus(q).unwrap();
        for shift in 1..4 {
            let r = [q[shift % 4], q[(shift + 1) % 4], q[(shift + 2) % 4], q[(shift + 3) % 4]];
            let m = quad_modulus(r).unwrap();
            let expected = if shift % 2 == 0 { base } else { 1.0 / base };
            assert!((m - expected).abs() < 1e-10, "shift {shift}: {m} vs {expected}");
        }
    }

    #[test]
    fn permuting_terms_keeps_sum() {
        let ring = regular_ring(5, 0.5).unwrap();
        let terms = ring_terms(&ring).unwrap();
        let forward: f64 = terms.iter().map(|m| 1.0 / m).sum();
        let backward: f64 = terms.iter().rev().map(|m| 1.0 / m).sum();
        assert!((forward - backward).abs() < 1e-13);
    }
}
