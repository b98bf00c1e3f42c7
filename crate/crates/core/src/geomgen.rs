//! Seeded generators for the condenser families used in the experiments.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capforms::{et_admissible, RectSegmentSpec};
use crate::capsolve::{Condenser, Region};
use crate::error::{domain, Error, Result};
use crate::hypgeom::{geodesic_arc, hyp_disk_to_euclidean, polygon_hyp_perimeter, BoundaryCurve, EuclideanDisk, Piece};
use crate::ringbound::PolygonalRing;
use crate::ComplexPoint;

pub const REDRAW_LIMIT: usize = 1000;
const CURVE_NODES: usize = 4096;
const SIDE_SAMPLES: usize = 64;

/// ChaCha8 stream fixed by a 64-bit seed.
#[derive(Debug, Clone)]
pub struct SeededRng {
    pub seed: u64,
    /// Number of values drawn so far.
    pub counter: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            counter: 0,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// An independent stream derived from the same seed.
    pub fn split(&self, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(stream + 1);
        SeededRng {
            seed: self.seed,
            counter: 0,
            inner,
        }
    }

    /// Uniform on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        loop {
            self.counter += 1;
            let x: f64 = self.inner.random();
            if x > 0.0 {
                return x;
            }
        }
    }

    /// Uniform on (lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.open01()
    }

    /// Uniform on the integers `lo..=hi`.
    pub fn int(&mut self, lo: u32, hi: u32) -> u32 {
        self.counter += 1;
        self.inner.random_range(lo..=hi)
    }
}

fn cross(a: ComplexPoint, b: ComplexPoint) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Turning sign at every vertex of a closed polygon.
fn turns(v: &[ComplexPoint]) -> Vec<f64> {
    let m = v.len();
    (0..m)
        .map(|j| cross(v[j] - v[(j + m - 1) % m], v[(j + 1) % m] - v[j]))
        .collect()
}

pub fn is_convex(v: &[ComplexPoint]) -> bool {
    turns(v).iter().all(|&t| t > 0.0)
}

/// No two non-adjacent sides meet.
pub fn is_simple(v: &[ComplexPoint]) -> bool {
    let m = v.len();
    for i in 0..m {
        for j in i + 1..m {
            if j == i + 1 || (i == 0 && j == m - 1) {
                continue;
            }
            if segments_meet(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]) {
                return false;
            }
        }
    }
    true
}

fn segments_meet(p1: ComplexPoint, p2: ComplexPoint, q1: ComplexPoint, q2: ComplexPoint) -> bool {
    let d1 = cross(p2 - p1, q1 - p1);
    let d2 = cross(p2 - p1, q2 - p1);
    let d3 = cross(q2 - q1, p1 - q1);
    let d4 = cross(q2 - q1, p2 - q1);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return true;
    }
    let on = |a: ComplexPoint, b: ComplexPoint, z: ComplexPoint, d: f64| {
        d == 0.0
            && z.re >= a.re.min(b.re)
            && z.re <= a.re.max(b.re)
            && z.im >= a.im.min(b.im)
            && z.im <= a.im.max(b.im)
    };
    on(p1, p2, q1, d1) || on(p1, p2, q2, d2) || on(q1, q2, p1, d3) || on(q1, q2, p2, d4)
}

fn polygon_angles(rng: &mut SeededRng, m: u32, shift: f64, spread: f64) -> Vec<f64> {
    (1..=m)
        .map(|j| (j as f64 - shift + spread * rng.open01()) * TAU / m as f64)
        .collect()
}

/// Vertices `s e^{iθ_j}`, `θ_j = (j − 1.25 + 0.5τ_j) 2π/m`, redrawn until
/// convex.
pub fn gen_convex_polygon(rng: &mut SeededRng) -> Result<Vec<ComplexPoint>> {
    for _ in 0..REDRAW_LIMIT {
        let m = rng.int(3, 12);
        let s = rng.uniform(0.05, 0.95);
        let v: Vec<ComplexPoint> = polygon_angles(rng, m, 1.25, 0.5)
            .into_iter()
            .map(|t| ComplexPoint::from_polar(s, t))
            .collect();
        if is_convex(&v) {
            return Ok(v);
        }
    }
    Err(Error::RedrawLimit("gen_convex_polygon"))
}

/// A polygon with geodesic sides.
#[derive(Debug, Clone)]
pub struct HyperbolicPolygon {
    pub vertices: Vec<ComplexPoint>,
    pub curve: BoundaryCurve,
    pub perimeter: f64,
}

impl HyperbolicPolygon {
    pub fn new(vertices: Vec<ComplexPoint>) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return domain("HyperbolicPolygon::new", format!("{m} vertices do not form a polygon"));
        }
        let pieces = (0..m)
            .map(|j| geodesic_arc(vertices[j], vertices[(j + 1) % m]))
            .collect::<Result<Vec<_>>>()?;
        let nodes = m * (CURVE_NODES / m).max(2) / 2 * 2;
        let curve = BoundaryCurve::from_pieces(pieces, nodes.max(2 * m));
        let perimeter = polygon_hyp_perimeter(&vertices)?;
        Ok(HyperbolicPolygon {
            vertices,
            curve,
            perimeter,
        })
    }

    /// Closed polyline through samples of every side, for the grid oracle.
    pub fn region(&self) -> Region {
        let mut pts = Vec::new();
        for piece in &self.curve.pieces {
            let s = piece.sample(SIDE_SAMPLES);
            pts.extend_from_slice(&s[..s.len() - 1]);
        }
        Region::Polygon(pts)
    }
}

/// Convex vertex set joined by geodesics.
pub fn gen_hyperbolic_polygon(rng: &mut SeededRng) -> Result<HyperbolicPolygon> {
    HyperbolicPolygon::new(gen_convex_polygon(rng)?)
}

/// Radii alternating in (0.5, 0.95) and (0.05, 0.5), redrawn until simple and
/// not convex.
pub fn gen_nonconvex_polygon(rng: &mut SeededRng) -> Result<Vec<ComplexPoint>> {
    for _ in 0..REDRAW_LIMIT {
        let m = rng.int(3, 12);
        let angles = polygon_angles(rng, m, 1.25, 0.5);
        let v: Vec<ComplexPoint> = angles
            .into_iter()
            .enumerate()
            .map(|(k, t)| {
                let s = if k % 2 == 0 {
                    rng.uniform(0.5, 0.95)
                } else {
                    rng.uniform(0.05, 0.5)
                };
                ComplexPoint::from_polar(s, t)
            })
            .collect();
        if is_simple(&v) && turns(&v).iter().any(|&t| t < 0.0) {
            return Ok(v);
        }
    }
    Err(Error::RedrawLimit("gen_nonconvex_polygon"))
}

/// The tube `E(t)` around the arc `|z| = r`, `θ ≤ arg z ≤ 2π`.
#[derive(Debug, Clone)]
pub struct TubeSet {
    pub theta: f64,
    pub r: f64,
    pub t: f64,
    /// Outer and inner arc radii.
    pub u: f64,
    pub v: f64,
    /// End caps at `r` and `r e^{iθ}`.
    pub caps: [EuclideanDisk; 2],
    pub curve: BoundaryCurve,
}

impl TubeSet {
    pub fn region(&self) -> Region {
        Region::Union(vec![
            Region::AnnularSector {
                inner: self.v,
                outer: self.u,
                start: self.theta,
                end: TAU,
            },
            Region::Disk {
                center: self.caps[0].center,
                radius: self.caps[0].radius,
            },
            Region::Disk {
                center: self.caps[1].center,
                radius: self.caps[1].radius,
            },
        ])
    }

    pub fn condenser(&self) -> Condenser {
        Condenser::in_unit_disk(self.region())
    }
}

pub fn build_et(theta: f64, r: f64, t: f64) -> Result<TubeSet> {
    et_admissible(theta, r, t)?;
    let u = (r.atanh() + 0.5 * t).tanh();
    let v = (r.atanh() - 0.5 * t).tanh();
    let rot = ComplexPoint::from_polar(1.0, theta);
    let cap0 = hyp_disk_to_euclidean(ComplexPoint::new(r, 0.0), t)?;
    let cap1 = hyp_disk_to_euclidean(rot * r, t)?;
    let origin = ComplexPoint::new(0.0, 0.0);
    let pieces = vec![
        Piece::Arc { center: origin, radius: u, start: theta, sweep: TAU - theta },
        Piece::Arc { center: cap0.center, radius: cap0.radius, start: 0.0, sweep: PI },
        Piece::Arc { center: origin, radius: v, start: TAU, sweep: theta - TAU },
        Piece::Arc { center: cap1.center, radius: cap1.radius, start: theta + PI, sweep: PI },
    ];
    Ok(TubeSet {
        theta,
        r,
        t,
        u,
        v,
        caps: [cap0, cap1],
        curve: BoundaryCurve::from_pieces(pieces, CURVE_NODES),
    })
}

/// Upper half of the hyperbolic disk `B(x, t)` in the unit disk.
#[derive(Debug, Clone)]
pub struct HalfDisk {
    pub x: f64,
    pub t: f64,
    pub disk: EuclideanDisk,
    pub curve: BoundaryCurve,
}

impl HalfDisk {
    pub fn region(&self) -> Region {
        Region::UpperHalfDisk {
            center: self.disk.center,
            radius: self.disk.radius,
        }
    }

    pub fn condenser(&self) -> Condenser {
        Condenser::in_unit_disk(self.region())
    }
}

pub fn build_halfdisk(x: f64, t: f64) -> Result<HalfDisk> {
    if !(x > 0.0 && x < 1.0) {
        return domain("build_halfdisk", format!("x = {x} is outside (0, 1)"));
    }
    let disk = hyp_disk_to_euclidean(ComplexPoint::new(x, 0.0), t)?;
    if !(disk.center.re + disk.radius < 1.0) || disk.center.im.abs() > 1e-15 {
        return Err(Error::Constraint(format!(
            "half-disk at x = {x}, t = {t} is not inside the unit disk"
        )));
    }
    let right = disk.center + disk.radius;
    let left = disk.center - disk.radius;
    let pieces = vec![
        Piece::Arc { center: disk.center, radius: disk.radius, start: 0.0, sweep: PI },
        Piece::Line { from: left, to: right },
    ];
    Ok(HalfDisk {
        x,
        t,
        disk,
        curve: BoundaryCurve::from_pieces(pieces, CURVE_NODES),
    })
}

/// Rectangle `[−a, a] × [0, b]` with the slit `[ic, id]` as a condenser.
pub fn build_rect_segment(spec: RectSegmentSpec) -> Result<Condenser> {
    spec.validate()?;
    let c = |re: f64, im: f64| ComplexPoint::new(re, im);
    Ok(Condenser::new(
        Region::Polygon(vec![c(-spec.a, 0.0), c(spec.a, 0.0), c(spec.a, spec.b), c(-spec.a, spec.b)]),
        Region::Segment {
            from: c(0.0, spec.c),
            to: c(0.0, spec.d),
        },
    ))
}

/// `a_j = (3 − 0.5λ_j)e^{iθ_j}`, `b_j = (1 + 0.5λ̂_j)e^{iθ̂_j}` with
/// `θ_j = (j − 1.2 + 0.4τ_j) 2π/m`, redrawn until the ring is valid.
pub fn gen_trapezium_ring(m: u32, rng: &mut SeededRng) -> Result<PolygonalRing> {
    if m < 3 {
        return domain("gen_trapezium_ring", format!("m = {m} is below 3"));
    }
    for _ in 0..REDRAW_LIMIT {
        let outer: Vec<ComplexPoint> = polygon_angles(rng, m, 1.2, 0.4)
            .into_iter()
            .map(|t| ComplexPoint::from_polar(3.0 - 0.5 * rng.open01(), t))
            .collect();
        let inner: Vec<ComplexPoint> = polygon_angles(rng, m, 1.2, 0.4)
            .into_iter()
            .map(|t| ComplexPoint::from_polar(1.0 + 0.5 * rng.open01(), t))
            .collect();
        if let Ok(ring) = PolygonalRing::new(outer, inner) {
            return Ok(ring);
        }
    }
    Err(Error::RedrawLimit("gen_trapezium_ring"))
}
