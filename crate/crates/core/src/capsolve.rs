//! Finite-difference capacity oracle: the discrete Dirichlet energy of the
//! condenser potential on a uniform cell-centred grid.
//!
//! Cells are classified at their centres. Edges between an interior cell and
//! a Dirichlet cell are cut where the boundary crosses them and weighted by
//! the inverse of the interior fraction, which keeps the system symmetric
//! positive definite and the boundary position exact to bisection accuracy.
//! Edges towards `Outside` cells are dropped, which gives the natural
//! (Neumann) condition used for quadrilateral moduli.

use std::f64::consts::TAU;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::hypgeom::winding_number;
use crate::ringbound::PolygonalRing;
use crate::ComplexPoint;

const THETA_MIN: f64 = 1e-3;
const BISECTIONS: usize = 48;
const MIN_GAP_CELLS: i64 = 4;
const PAD_CELLS: usize = 2;
const REDUCE_CHUNK: usize = 4096;
const TRACE_EVERY: usize = 32;
const RESOLUTION_RETRIES: usize = 16;
const RESOLUTION_SHRINK: f64 = 0.8;

/// A closed plane set described by a membership predicate.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Disk { center: ComplexPoint, radius: f64 },
    /// Part of the disk with `Im z ≥ center.im`.
    UpperHalfDisk { center: ComplexPoint, radius: f64 },
    /// `inner ≤ |z| ≤ outer` with `arg z` in `[start, end]` taken modulo 2π.
    AnnularSector { inner: f64, outer: f64, start: f64, end: f64 },
    /// Closed polygon, any orientation.
    Polygon(Vec<ComplexPoint>),
    /// Slit fattened to a capsule of half a grid cell radius.
    Segment { from: ComplexPoint, to: ComplexPoint },
    Union(Vec<Region>),
}

impl Region {
    pub fn contains(&self, z: ComplexPoint, h: f64) -> bool {
        match self {
            Region::Disk { center, radius } => (z - center).norm_sqr() <= radius * radius,
            Region::UpperHalfDisk { center, radius } => {
                z.im >= center.im && (z - center).norm_sqr() <= radius * radius
            }
            Region::AnnularSector { inner, outer, start, end } => {
                let r = z.norm();
                if r < *inner || r > *outer {
                    return false;
                }
                let mut arg = z.arg();
                while arg < *start {
                    arg += TAU;
                }
                arg <= *end
            }
            Region::Polygon(vertices) => {
                on_boundary(vertices, z) || winding_number(vertices, z) != 0
            }
            Region::Segment { from, to } => distance_to_segment(z, *from, *to) <= 0.5 * h,
            Region::Union(parts) => parts.iter().any(|p| p.contains(z, h)),
        }
    }

    /// Axis-aligned bounding box as (lower-left, upper-right).
    pub fn bbox(&self) -> (ComplexPoint, ComplexPoint) {
        match self {
            Region::Disk { center, radius } | Region::UpperHalfDisk { center, radius } => (
                center - ComplexPoint::new(*radius, *radius),
                center + ComplexPoint::new(*radius, *radius),
            ),
            Region::AnnularSector { outer, .. } => (
                ComplexPoint::new(-outer, -outer),
                ComplexPoint::new(*outer, *outer),
            ),
            Region::Polygon(v) => points_bbox(v),
            Region::Segment { from, to } => points_bbox(&[*from, *to]),
            Region::Union(parts) => {
                let boxes: Vec<_> = parts.iter().flat_map(|p| {
                    let (lo, hi) = p.bbox();
                    [lo, hi]
                }).collect();
                points_bbox(&boxes)
            }
        }
    }
}

fn points_bbox(points: &[ComplexPoint]) -> (ComplexPoint, ComplexPoint) {
    let mut lo = ComplexPoint::new(f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for p in points {
        lo.re = lo.re.min(p.re);
        lo.im = lo.im.min(p.im);
        hi.re = hi.re.max(p.re);
        hi.im = hi.im.max(p.im);
    }
    (lo, hi)
}

fn distance_to_segment(z: ComplexPoint, p: ComplexPoint, q: ComplexPoint) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let s = (((z - p) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (p + d * s)).norm()
}

fn on_boundary(vertices: &[ComplexPoint], z: ComplexPoint) -> bool {
    let n = vertices.len();
    (0..n).any(|i| distance_to_segment(z, vertices[i], vertices[(i + 1) % n]) == 0.0)
}

/// Cell classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mask {
    Interior,
    Dirichlet0,
    Dirichlet1,
    Outside,
}

impl Mask {
    fn value(self) -> Option<f64> {
        match self {
            Mask::Dirichlet0 => Some(0.0),
            Mask::Dirichlet1 => Some(1.0),
            _ => None,
        }
    }
}

/// Anything the grid oracle can discretize.
pub trait Problem: Sync {
    fn bbox(&self) -> (ComplexPoint, ComplexPoint);
    fn classify(&self, z: ComplexPoint, h: f64) -> Result<Mask>;
}

/// Condenser `(outer, inner)`: potential 1 on `inner`, 0 off `outer`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condenser {
    pub outer: Region,
    pub inner: Region,
}

impl Condenser {
    pub fn new(outer: Region, inner: Region) -> Self {
        Condenser { outer, inner }
    }

    pub fn annulus(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius > 0.0 && inner_radius < outer_radius) {
            return domain(
                "Condenser::annulus",
                format!("need 0 < {inner_radius} < {outer_radius}"),
            );
        }
        let origin = ComplexPoint::new(0.0, 0.0);
        Ok(Condenser::new(
            Region::Disk { center: origin, radius: outer_radius },
            Region::Disk { center: origin, radius: inner_radius },
        ))
    }

    /// Unit disk with the given compact set.
    pub fn in_unit_disk(inner: Region) -> Self {
        Condenser::new(
            Region::Disk { center: ComplexPoint::new(0.0, 0.0), radius: 1.0 },
            inner,
        )
    }

    pub fn polygonal_ring(ring: &PolygonalRing) -> Self {
        Condenser::new(
            Region::Polygon(ring.outer.clone()),
            Region::Polygon(ring.inner.clone()),
        )
    }
}

impl Problem for Condenser {
    fn bbox(&self) -> (ComplexPoint, ComplexPoint) {
        self.outer.bbox()
    }

    fn classify(&self, z: ComplexPoint, h: f64) -> Result<Mask> {
        let in_inner = self.inner.contains(z, h);
        let in_outer = self.outer.contains(z, h);
        match (in_inner, in_outer) {
            (true, false) => Err(Error::Constraint(format!(
                "inner set reaches {z} outside the outer domain"
            ))),
            (true, true) => Ok(Mask::Dirichlet1),
            (false, true) => Ok(Mask::Interior),
            (false, false) => Ok(Mask::Dirichlet0),
        }
    }
}

/// Polygon with potential 0 on one side, 1 on another and natural boundary
/// conditions elsewhere. Its energy is the modulus of the quadrilateral.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPolygon {
    pub vertices: Vec<ComplexPoint>,
    pub zero_side: usize,
    pub one_side: usize,
}

impl MixedPolygon {
    pub fn new(vertices: Vec<ComplexPoint>, zero_side: usize, one_side: usize) -> Result<Self> {
        let n = vertices.len();
        if n < 3 || zero_side >= n || one_side >= n || zero_side == one_side {
            return domain(
                "MixedPolygon::new",
                format!("{n} vertices with sides {zero_side} and {one_side}"),
            );
        }
        Ok(MixedPolygon { vertices, zero_side, one_side })
    }

    /// The quadrilateral `(0, 1, A, B)` whose modulus is `qm(A, B)`: 1 on the
    /// side `[1, A]`, 0 on `[B, 0]`.
    pub fn from_ab(vertex_a: ComplexPoint, vertex_b: ComplexPoint) -> Result<Self> {
        MixedPolygon::new(
            vec![
                ComplexPoint::new(0.0, 0.0),
                ComplexPoint::new(1.0, 0.0),
                vertex_a,
                vertex_b,
            ],
            3,
            1,
        )
    }

    fn side(&self, i: usize) -> (ComplexPoint, ComplexPoint) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }
}

impl Problem for MixedPolygon {
    fn bbox(&self) -> (ComplexPoint, ComplexPoint) {
        points_bbox(&self.vertices)
    }

    fn classify(&self, z: ComplexPoint, _h: f64) -> Result<Mask> {
        if winding_number(&self.vertices, z) != 0 && !on_boundary(&self.vertices, z) {
            return Ok(Mask::Interior);
        }
        let nearest = (0..self.vertices.len())
            .map(|i| {
                let (p, q) = self.side(i);
                (distance_to_segment(z, p, q), i)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, i)| i)
            .unwrap_or(0);
        Ok(if nearest == self.zero_side {
            Mask::Dirichlet0
        } else if nearest == self.one_side {
            Mask::Dirichlet1
        } else {
            Mask::Outside
        })
    }
}

#[derive(Debug, Clone, Default)]
struct System {
    /// Grid cell index of each unknown.
    cells: Vec<usize>,
    diag: Vec<f64>,
    /// Neighbouring unknowns of each row, unit weight.
    neighbours: Vec<Vec<usize>>,
    rhs: Vec<f64>,
    /// (row, boundary value, weight) for every cut edge.
    cuts: Vec<(usize, f64, f64)>,
}

/// Convergence record of a solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
    /// Quadratic functional `uᵀAu − 2bᵀu` sampled during the iteration.
    pub functional_trace: Vec<f64>,
}

/// Discretized condenser and its potential.
#[derive(Debug, Clone)]
pub struct GridField {
    pub h: f64,
    /// Centre of cell (0, 0).
    pub origin: ComplexPoint,
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<Mask>,
    pub u: Vec<f64>,
    pub stats: SolveStats,
    system: System,
}

impl GridField {
    pub fn center(&self, i: usize, j: usize) -> ComplexPoint {
        self.origin + ComplexPoint::new(i as f64 * self.h, j as f64 * self.h)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn count(&self, kind: Mask) -> usize {
        self.mask.iter().filter(|&&m| m == kind).count()
    }

    pub fn unknowns(&self) -> usize {
        self.system.cells.len()
    }

    /// Discrete Dirichlet energy of the current potential.
    pub fn energy(&self) -> f64 {
        let s = &self.system;
        let x: Vec<f64> = s.cells.iter().map(|&c| self.u[c]).collect();
        let mut e = 0.0;
        for (row, nbrs) in s.neighbours.iter().enumerate() {
            for &col in nbrs.iter().filter(|&&c| c > row) {
                let d = x[row] - x[col];
                e += d * d;
            }
        }
        for &(row, g, w) in &s.cuts {
            let d = x[row] - g;
            e += w * d * d;
        }
        e
    }

    /// Potential at the cell containing `z`, if that cell is not outside.
    pub fn value_at(&self, z: ComplexPoint) -> Option<f64> {
        let p = (z - self.origin) / self.h;
        let (i, j) = (p.re.round(), p.im.round());
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            return None;
        }
        let k = self.index(i as usize, j as usize);
        (self.mask[k] != Mask::Outside).then_some(self.u[k])
    }

    /// Plain-text matrix of `u`, one grid row per line from the bottom row
    /// up, `nan` for outside cells.
    pub fn write_matrix<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "# nx={} ny={} h={} x0={} y0={}",
            self.nx, self.ny, self.h, self.origin.re, self.origin.im
        )?;
        for j in 0..self.ny {
            let row: Vec<String> = (0..self.nx)
                .map(|i| {
                    let k = self.index(i, j);
                    if self.mask[k] == Mask::Outside {
                        "nan".to_string()
                    } else {
                        format!("{:.9e}", self.u[k])
                    }
                })
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Classifies cells, checks resolution and assembles the energy system.
pub fn build_grid<P: Problem + ?Sized>(problem: &P, h: f64) -> Result<GridField> {
    if !(h > 0.0) || !h.is_finite() {
        return domain("build_grid", format!("spacing h = {h} must be positive"));
    }
    let (lo, hi) = problem.bbox();
    let nx = ((hi.re - lo.re) / h).ceil() as usize + 2 * PAD_CELLS;
    let ny = ((hi.im - lo.im) / h).ceil() as usize + 2 * PAD_CELLS;
    if nx.saturating_mul(ny) > 50_000_000 {
        return Err(Error::Resolution(format!("{nx} x {ny} grid is too large")));
    }
    let mid = (lo + hi) * 0.5;
    let origin = mid - ComplexPoint::new((nx - 1) as f64, (ny - 1) as f64) * (0.5 * h);
    let center = |i: usize, j: usize| origin + ComplexPoint::new(i as f64 * h, j as f64 * h);

    let mask: Vec<Mask> = (0..nx * ny)
        .into_par_iter()
        .map(|k| problem.classify(center(k % nx, k / nx), h))
        .collect::<Result<_>>()?;

    for kind in [Mask::Interior, Mask::Dirichlet0, Mask::Dirichlet1] {
        if !mask.contains(&kind) {
            return Err(Error::Resolution(format!("grid with h = {h} has no {kind:?} cells")));
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let edge = i == 0 || j == 0 || i + 1 == nx || j + 1 == ny;
            if edge && mask[k] == Mask::Interior {
                return Err(Error::Resolution("interior cell on the grid border".into()));
            }
        }
    }
    check_gap(&mask, nx, ny, h)?;

    let mut index = vec![usize::MAX; nx * ny];
    let mut cells = Vec::new();
    for (k, m) in mask.iter().enumerate() {
        if *m == Mask::Interior {
            index[k] = cells.len();
            cells.push(k);
        }
    }

    let rows: Vec<(f64, Vec<usize>, f64, Vec<(f64, f64)>)> = cells
        .par_iter()
        .map(|&k| {
            let (i, j) = (k % nx, k / nx);
            let p = center(i, j);
            let mut diag = 0.0;
            let mut nbrs = Vec::with_capacity(4);
            let mut rhs = 0.0;
            let mut cuts = Vec::new();
            let around = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)];
            for (ni, nj) in around {
                let nk = nj * nx + ni;
                match mask[nk] {
                    Mask::Interior => {
                        // a plate thinner than a cell may pass between two
                        // interior centres
                        let q = center(ni, nj);
                        let mid = (p + q) * 0.5;
                        match problem.classify(mid, h).unwrap_or(Mask::Interior) {
                            Mask::Interior => {
                                diag += 1.0;
                                nbrs.push(index[nk]);
                            }
                            Mask::Outside => {}
                            fixed => {
                                let g = fixed.value().unwrap_or(0.0);
                                let theta = 0.5 * crossing_fraction(problem, p, mid, h);
                                let w = 1.0 / theta.max(THETA_MIN);
                                diag += w;
                                rhs += w * g;
                                cuts.push((g, w));
                            }
                        }
                    }
                    Mask::Outside => {}
                    fixed => {
                        let g = fixed.value().unwrap_or(0.0);
                        let theta = crossing_fraction(problem, p, center(ni, nj), h);
                        let w = 1.0 / theta.max(THETA_MIN);
                        diag += w;
                        rhs += w * g;
                        cuts.push((g, w));
                    }
                }
            }
            (diag, nbrs, rhs, cuts)
        })
        .collect();

    let mut system = System {
        cells,
        ..Default::default()
    };
    for (row, (diag, nbrs, rhs, cuts)) in rows.into_iter().enumerate() {
        system.diag.push(diag);
        system.neighbours.push(nbrs);
        system.rhs.push(rhs);
        system.cuts.extend(cuts.into_iter().map(|(g, w)| (row, g, w)));
    }

    let u = mask.iter().map(|m| m.value().unwrap_or(0.0)).collect();
    Ok(GridField {
        h,
        origin,
        nx,
        ny,
        mask,
        u,
        stats: SolveStats::default(),
        system,
    })
}

/// Fraction of the edge from the interior centre `p` towards `q` before the
/// classification changes.
fn crossing_fraction<P: Problem + ?Sized>(problem: &P, p: ComplexPoint, q: ComplexPoint, h: f64) -> f64 {
    let interior = |s: f64| matches!(problem.classify(p + (q - p) * s, h), Ok(Mask::Interior));
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if interior(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_gap(mask: &[Mask], nx: usize, ny: usize, h: f64) -> Result<()> {
    let r = MIN_GAP_CELLS - 1;
    let at = |i: i64, j: i64| -> Option<Mask> {
        (i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny)
            .then(|| mask[j as usize * nx + i as usize])
    };
    for j in 0..ny as i64 {
        for i in 0..nx as i64 {
            if at(i, j) != Some(Mask::Dirichlet1) {
                continue;
            }
            for dj in -r..=r {
                for di in -r..=r {
                    if at(i + di, j + dj) == Some(Mask::Dirichlet0) {
                        return Err(Error::Resolution(format!(
                            "plates closer than {MIN_GAP_CELLS} cells at h = {h}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(REDUCE_CHUNK)
        .zip(b.par_chunks(REDUCE_CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

fn apply(s: &System, x: &[f64], out: &mut [f64]) {
    out.par_iter_mut().enumerate().for_each(|(row, o)| {
        let mut v = s.diag[row] * x[row];
        for &c in &s.neighbours[row] {
            v -= x[c];
        }
        *o = v;
    });
}

/// Jacobi-preconditioned conjugate gradients from the potential already in
/// `grid`. Stops when `‖b − Au‖ ≤ tol‖b‖`.
pub fn solve_potential(mut grid: GridField, tol: f64, max_iter: usize) -> Result<GridField> {
    let s = &grid.system;
    let n = s.cells.len();
    let mut x: Vec<f64> = s.cells.iter().map(|&c| grid.u[c]).collect();
    let mut ax = vec![0.0; n];
    apply(s, &x, &mut ax);
    let mut r: Vec<f64> = s.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let b_norm = dot(&s.rhs, &s.rhs).sqrt();
    let functional = |x: &[f64], r: &[f64]| -dot(x, &s.rhs) - dot(x, r);
    let mut z: Vec<f64> = r.iter().zip(&s.diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut trace = vec![functional(&x, &r)];
    let mut res = dot(&r, &r).sqrt() / b_norm;
    let mut it = 0;
    while res > tol {
        if it == max_iter {
            return Err(Error::NoConvergence {
                func: "solve_potential",
                detail: format!("relative residual {res:e} after {max_iter} iterations"),
            });
        }
        apply(s, &p, &mut ax);
        let alpha = rz / dot(&p, &ax);
        x.par_iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.par_iter_mut().zip(&ax).for_each(|(r, a)| *r -= alpha * a);
        z.par_iter_mut()
            .zip(&r)
            .zip(&s.diag)
            .for_each(|((z, r), d)| *z = r / d);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        p.par_iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
        it += 1;
        res = dot(&r, &r).sqrt() / b_norm;
        if it % TRACE_EVERY == 0 {
            trace.push(functional(&x, &r));
        }
    }
    trace.push(functional(&x, &r));
    for (row, &c) in grid.system.cells.iter().enumerate() {
        grid.u[c] = x[row];
    }
    grid.stats = SolveStats {
        iterations: it,
        relative_residual: res,
        functional_trace: trace,
    };
    Ok(grid)
}

/// Copies a coarse solution onto `fine` as a starting guess.
fn prolong(coarse: &GridField, fine: &mut GridField) {
    for &c in &fine.system.cells {
        let z = fine.center(c % fine.nx, c / fine.nx);
        if let Some(v) = coarse.value_at(z) {
            fine.u[c] = v;
        }
    }
}

/// Settings for [`estimate_capacity_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    /// Refinement levels, 2 or 3.
    pub levels: usize,
    /// Cells across the longer side of the bounding box on the coarsest grid.
    pub base_cells: usize,
    /// Coarsest spacing; overrides `base_cells` when set.
    pub base_h: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            levels: 3,
            base_cells: 96,
            base_h: None,
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

/// Extrapolated capacity with its error estimate and the raw energies.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityEstimate {
    pub value: f64,
    pub error_estimate: f64,
    /// Observed convergence order used for the extrapolation.
    pub order: f64,
    /// (h, energy) per level, coarsest first.
    pub levels: Vec<(f64, f64)>,
}

pub fn estimate_capacity<P: Problem + ?Sized>(problem: &P, levels: usize) -> Result<CapacityEstimate> {
    estimate_capacity_with(
        problem,
        EstimateOptions {
            levels,
            ..Default::default()
        },
    )
}

/// Energies at h, h/2 (and h/4) combined by Richardson extrapolation. With
/// three levels the order is estimated from the energies and clamped to
/// [1, 2]; with two it is taken as 1, the rate for slits and corners.
pub fn estimate_capacity_with<P: Problem + ?Sized>(
    problem: &P,
    opts: EstimateOptions,
) -> Result<CapacityEstimate> {
    if !(2..=3).contains(&opts.levels) {
        return domain("estimate_capacity", format!("levels = {} must be 2 or 3", opts.levels));
    }
    if opts.base_cells < 8 {
        return domain("estimate_capacity", format!("base_cells = {} is too small", opts.base_cells));
    }
    let (lo, hi) = problem.bbox();
    let extent = (hi.re - lo.re).max(hi.im - lo.im);
    let mut h = match opts.base_h {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return domain("estimate_capacity", format!("spacing h = {h} must be positive")),
        None => extent / opts.base_cells as f64,
    };
    let mut grid = None;
    for _ in 0..RESOLUTION_RETRIES {
        match build_grid(problem, h) {
            Ok(g) => {
                grid = Some(g);
                break;
            }
            Err(Error::Resolution(_)) => h *= RESOLUTION_SHRINK,
            Err(e) => return Err(e),
        }
    }
    let mut grid = match grid {
        Some(g) => g,
        None => build_grid(problem, h)?,
    };

    let mut energies = Vec::with_capacity(opts.levels);
    for level in 0..opts.levels {
        if level > 0 {
            let mut fine = build_grid(problem, grid.h * 0.5)?;
            prolong(&grid, &mut fine);
            grid = fine;
        }
        grid = solve_potential(grid, opts.tol, opts.max_iter)?;
        energies.push((grid.h, grid.energy()));
    }

    let e: Vec<f64> = energies.iter().map(|x| x.1).collect();
    let extrapolate = |coarse: f64, fine: f64, p: f64| fine + (fine - coarse) / (2f64.powf(p) - 1.0);
    let (value, error_estimate, order) = if e.len() == 2 {
        let v = extrapolate(e[0], e[1], 1.0);
        (v, (v - e[1]).abs(), 1.0)
    } else {
        let d0 = e[1] - e[0];
        let d1 = e[2] - e[1];
        let p = if d0 != 0.0 && d1 != 0.0 && d0 / d1 > 1.0 {
            (d0 / d1).log2().clamp(1.0, 2.0)
        } else {
            2.0
        };
        let v1 = extrapolate(e[0], e[1], p);
        let v2 = extrapolate(e[1], e[2], p);
        (v2, (v2 - v1).abs().max((v2 - e[2]).abs() * 0.1), p)
    };
    Ok(CapacityEstimate {
        value,
        error_estimate,
        order,
        levels: energies,
    })
}
