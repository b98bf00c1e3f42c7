//! Hyperbolic geometry of the unit disk: the Poincaré distance, hyperbolic
//! disks as Euclidean disks, geodesics and perimeter quadrature.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::error::{domain, Result};
use crate::quadrature::gauss_legendre_64;
use crate::ComplexPoint;

/// Below this value of `|Im(conj(v) w)|` two points are treated as lying on a
/// common diameter.
const DIAMETER_TOL: f64 = 1e-12;

fn check_in_disk(func: &'static str, z: ComplexPoint) -> Result<()> {
    if !(z.norm_sqr() < 1.0) || !z.re.is_finite() || !z.im.is_finite() {
        return domain(func, format!("point {z} is not inside the unit disk"));
    }
    Ok(())
}

/// Hyperbolic distance in the unit disk for the metric `2|dz|/(1-|z|^2)`.
pub fn rho_disk(x: ComplexPoint, y: ComplexPoint) -> Result<f64> {
    check_in_disk("rho_disk", x)?;
    check_in_disk("rho_disk", y)?;
    let denom = ((1.0 - x.norm_sqr()) * (1.0 - y.norm_sqr())).sqrt();
    Ok(2.0 * ((x - y).norm() / denom).asinh())
}

/// A Euclidean disk in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanDisk {
    pub center: ComplexPoint,
    pub radius: f64,
}

impl EuclideanDisk {
    pub fn contains(&self, z: ComplexPoint) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

/// The hyperbolic disk with center `x` and radius `m` as a Euclidean disk.
pub fn hyp_disk_to_euclidean(x: ComplexPoint, m: f64) -> Result<EuclideanDisk> {
    check_in_disk("hyp_disk_to_euclidean", x)?;
    if !(m > 0.0) || !m.is_finite() {
        return domain("hyp_disk_to_euclidean", format!("radius {m} must be positive"));
    }
    let t = (0.5 * m).tanh();
    let x2 = x.norm_sqr();
    let denom = 1.0 - x2 * t * t;
    Ok(EuclideanDisk {
        center: x * ((1.0 - t * t) / denom),
        radius: (1.0 - x2) * t / denom,
    })
}

/// Hyperbolic length of a hyperbolic circle of radius `r`.
pub fn circle_perimeter_hyp(r: f64) -> f64 {
    2.0 * PI * r.sinh()
}

/// Hyperbolic area of a hyperbolic disk of radius `r`.
pub fn disk_area_hyp(r: f64) -> f64 {
    let s = (0.5 * r).sinh();
    4.0 * PI * s * s
}

/// Traversal direction of a closed curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Ccw,
    Cw,
}

/// A smooth boundary piece with parameter in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Line {
        from: ComplexPoint,
        to: ComplexPoint,
    },
    /// `center + radius * exp(i (start + sweep * t))`
    Arc {
        center: ComplexPoint,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Piece {
    pub fn point(&self, t: f64) -> ComplexPoint {
        match *self {
            Piece::Line { from, to } => from + (to - from) * t,
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + ComplexPoint::from_polar(radius, start + sweep * t),
        }
    }

    pub fn derivative(&self, t: f64) -> ComplexPoint {
        match *self {
            Piece::Line { from, to } => to - from,
            Piece::Arc {
                radius,
                start,
                sweep,
                ..
            } => ComplexPoint::i() * ComplexPoint::from_polar(radius * sweep, start + sweep * t),
        }
    }

    pub fn start(&self) -> ComplexPoint {
        self.point(0.0)
    }

    pub fn end(&self) -> ComplexPoint {
        self.point(1.0)
    }

    pub fn reversed(&self) -> Piece {
        match *self {
            Piece::Line { from, to } => Piece::Line { from: to, to: from },
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => Piece::Arc {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
        }
    }

    /// `samples` equally spaced parameter values including both ends.
    pub fn sample(&self, samples: usize) -> Vec<ComplexPoint> {
        let n = samples.max(2);
        (0..n)
            .map(|j| self.point(j as f64 / (n - 1) as f64))
            .collect()
    }

    /// Euclidean length.
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => (to - from).norm(),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Hyperbolic length by 64-point Gauss–Legendre quadrature; the piece
    /// must lie in the open unit disk.
    pub fn hyp_length(&self) -> Result<f64> {
        let rule = gauss_legendre_64();
        let mut bad = None;
        let value = rule.integrate(0.0, 1.0, |t| {
            let z = self.point(t);
            let w = 1.0 - z.norm_sqr();
            if w <= 0.0 {
                bad = Some(z);
            }
            2.0 * self.derivative(t).norm() / w
        });
        if let Some(z) = bad {
            return domain("hyp_length", format!("curve point {z} is outside the unit disk"));
        }
        Ok(value)
    }
}

/// A closed curve sampled at the nodes `s_k = 2πk/n`, `k = 0..n`.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    pub positions: Vec<ComplexPoint>,
    pub derivatives: Vec<ComplexPoint>,
    pub orientation: Orientation,
    pub corners: Vec<bool>,
    /// Exact smooth pieces when the curve is piecewise defined; empty for
    /// curves given by a single smooth parametrization.
    pub pieces: Vec<Piece>,
}

impl BoundaryCurve {
    /// Samples a smooth `2π`-periodic parametrization and its derivative.
    pub fn from_fn<F, D>(n: usize, f: F, df: D) -> Self
    where
        F: Fn(f64) -> ComplexPoint,
        D: Fn(f64) -> ComplexPoint,
    {
        assert!(n >= 2 && n % 2 == 0, "node count must be even and positive");
        let nodes: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
        let positions: Vec<ComplexPoint> = nodes.iter().map(|&s| f(s)).collect();
        let derivatives = nodes.iter().map(|&s| df(s)).collect();
        let orientation = orientation_of(&positions);
        Self {
            corners: vec![false; n],
            positions,
            derivatives,
            orientation,
            pieces: Vec::new(),
        }
    }

    /// The circle `center + radius e^{is}`, counterclockwise.
    pub fn circle(center: ComplexPoint, radius: f64, n: usize) -> Self {
        Self::from_fn(
            n,
            |s| center + ComplexPoint::from_polar(radius, s),
            |s| ComplexPoint::i() * ComplexPoint::from_polar(radius, s),
        )
    }

    /// The segment `[p, q]` as a degenerate closed curve traversed out and
    /// back, `p + (q-p)(1-cos s)/2`; the tips are flagged as corners.
    pub fn segment(p: ComplexPoint, q: ComplexPoint, n: usize) -> Self {
        let mut curve = Self::from_fn(
            n,
            |s| p + (q - p) * (0.5 * (1.0 - s.cos())),
            |s| (q - p) * (0.5 * s.sin()),
        );
        curve.corners[0] = true;
        curve.corners[n / 2] = true;
        curve.orientation = Orientation::Ccw;
        curve.pieces = vec![Piece::Line { from: p, to: q }, Piece::Line { from: q, to: p }];
        curve
    }

    /// A closed chain of pieces, each given an equal share of the parameter
    /// interval. Joins with a change of tangent direction are corners.
    pub fn from_pieces(pieces: Vec<Piece>, n: usize) -> Self {
        assert!(!pieces.is_empty(), "a piecewise curve needs at least one piece");
        assert!(n >= 2 && n % 2 == 0, "node count must be even and positive");
        let m = pieces.len() as f64;
        let mut positions = Vec::with_capacity(n);
        let mut derivatives = Vec::with_capacity(n);
        let mut corners = Vec::with_capacity(n);
        let mut last_piece = usize::MAX;
        for k in 0..n {
            let x = m * k as f64 / n as f64;
            let j = (x.floor() as usize).min(pieces.len() - 1);
            let t = x - j as f64;
            positions.push(pieces[j].point(t));
            derivatives.push(pieces[j].derivative(t) * (m / (2.0 * PI)));
            let starts_piece = j != last_piece && t < 1e-12;
            let prev = &pieces[(j + pieces.len() - 1) % pieces.len()];
            let turn = (pieces[j].derivative(0.0) / prev.derivative(1.0)).arg().abs();
            corners.push(starts_piece && turn > 1e-9);
            last_piece = j;
        }
        let orientation = orientation_of(&positions);
        Self {
            positions,
            derivatives,
            orientation,
            corners,
            pieces,
        }
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn has_corners(&self) -> bool {
        self.corners.iter().any(|&c| c)
    }

    /// The same curve traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let n = self.n();
        let idx = |k: usize| (n - k) % n;
        Self {
            positions: (0..n).map(|k| self.positions[idx(k)]).collect(),
            derivatives: (0..n).map(|k| -self.derivatives[idx(k)]).collect(),
            corners: (0..n).map(|k| self.corners[idx(k)]).collect(),
            orientation: match self.orientation {
                Orientation::Ccw => Orientation::Cw,
                Orientation::Cw => Orientation::Ccw,
            },
            pieces: self.pieces.iter().rev().map(Piece::reversed).collect(),
        }
    }

    /// Hyperbolic perimeter: piecewise Gauss–Legendre when exact pieces with
    /// corners are available, the trapezoidal rule otherwise.
    pub fn hyp_perimeter(&self) -> Result<f64> {
        if !self.pieces.is_empty() && self.has_corners() {
            let mut total = 0.0;
            for piece in &self.pieces {
                total += piece.hyp_length()?;
            }
            Ok(total)
        } else {
            perimeter_trapezoid(self)
        }
    }

    /// Winding number of the sampled polygon about `z`.
    pub fn winding_number(&self, z: ComplexPoint) -> i32 {
        winding_number(&self.positions, z)
    }
}

fn orientation_of(points: &[ComplexPoint]) -> Orientation {
    if signed_area(points) >= 0.0 {
        Orientation::Ccw
    } else {
        Orientation::Cw
    }
}

/// Signed area of a closed polygon (positive when counterclockwise).
pub fn signed_area(points: &[ComplexPoint]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|j| {
            let p = points[j];
            let q = points[(j + 1) % n];
            p.re * q.im - q.re * p.im
        })
        .sum::<f64>()
        * 0.5
}

/// Winding number of a closed polygon about `z`.
pub fn winding_number(points: &[ComplexPoint], z: ComplexPoint) -> i32 {
    let n = points.len();
    let mut w = 0;
    for j in 0..n {
        let p = points[j] - z;
        let q = points[(j + 1) % n] - z;
        if p.im <= 0.0 {
            if q.im > 0.0 && p.re * q.im - q.re * p.im > 0.0 {
                w += 1;
            }
        } else if q.im <= 0.0 && p.re * q.im - q.re * p.im < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Trapezoidal rule for the hyperbolic perimeter of a sampled curve.
pub fn perimeter_trapezoid(curve: &BoundaryCurve) -> Result<f64> {
    let n = curve.n();
    let mut sum = 0.0;
    for (z, dz) in curve.positions.iter().zip(&curve.derivatives) {
        let w = 1.0 - z.norm_sqr();
        if !(w > 0.0) {
            return domain("perimeter_trapezoid", format!("node {z} is outside the unit disk"));
        }
        sum += dz.norm() / w;
    }
    Ok(4.0 * PI / n as f64 * sum)
}

/// Derivative of the trigonometric interpolant of samples at the nodes
/// `2πk/n`; the Nyquist mode is dropped.
pub fn spectral_derivative(samples: &[ComplexPoint]) -> Vec<ComplexPoint> {
    let n = samples.len();
    assert!(n >= 2 && n % 2 == 0, "sample count must be even and positive");
    let mut planner = FftPlanner::new();
    let mut buf = samples.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        let k = if j < n / 2 {
            j as f64
        } else if j == n / 2 {
            0.0
        } else {
            j as f64 - n as f64
        };
        *c *= ComplexPoint::new(0.0, k / n as f64);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Hyperbolic perimeter of the closed polygonal chain through `vertices`.
/// A repeated final vertex equal to the first is ignored.
pub fn polygon_hyp_perimeter(vertices: &[ComplexPoint]) -> Result<f64> {
    let mut v = vertices;
    if v.len() > 2 && v[0] == v[v.len() - 1] {
        v = &v[..v.len() - 1];
    }
    if v.len() < 2 {
        return domain("polygon_hyp_perimeter", "need at least two vertices".to_string());
    }
    let mut total = 0.0;
    for j in 0..v.len() {
        total += rho_disk(v[j], v[(j + 1) % v.len()])?;
    }
    Ok(total)
}

/// Hyperbolic perimeter of the polygon with straight Euclidean sides through
/// `vertices`, by Gauss–Legendre quadrature on each side.
pub fn euclidean_polygon_hyp_perimeter(vertices: &[ComplexPoint]) -> Result<f64> {
    let m = vertices.len();
    if m < 2 {
        return domain("euclidean_polygon_hyp_perimeter", "need at least two vertices".to_string());
    }
    let mut total = 0.0;
    for j in 0..m {
        total += Piece::Line { from: vertices[j], to: vertices[(j + 1) % m] }.hyp_length()?;
    }
    Ok(total)
}

/// The hyperbolic geodesic from `v` to `w`: an arc of the circle through both
/// points orthogonal to the unit circle, or a chord on a diameter.
pub fn geodesic_arc(v: ComplexPoint, w: ComplexPoint) -> Result<Piece> {
    check_in_disk("geodesic_arc", v)?;
    check_in_disk("geodesic_arc", w)?;
    if (v - w).norm() == 0.0 {
        return domain("geodesic_arc", format!("coincident endpoints {v}"));
    }
    let cross = (v.conj() * w).im;
    if cross.abs() < DIAMETER_TOL {
        return Ok(Piece::Line { from: v, to: w });
    }
    let center = (w * (1.0 + v.norm_sqr()) - v * (1.0 + w.norm_sqr()))
        / ComplexPoint::new(0.0, 2.0 * cross);
    let radius = (v - center).norm();
    let start = (v - center).arg();
    let sweep = ((w - center) / (v - center)).arg();
    Ok(Piece::Arc {
        center,
        radius,
        start,
        sweep,
    })
}

/// Samples of the geodesic from `v` to `w`, endpoints included exactly.
pub fn geodesic_samples(v: ComplexPoint, w: ComplexPoint, samples: usize) -> Result<Vec<ComplexPoint>> {
    let piece = geodesic_arc(v, w)?;
    let mut pts = piece.sample(samples);
    let last = pts.len() - 1;
    pts[0] = v;
    pts[last] = w;
    Ok(pts)
}
