//! Command-line front end: every command produces a [`Table`] written as CSV
//! or JSON.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use crate::capforms::{
    cap_disk_by_perimeter, cap_rect_segment, cap_segment, et_max_t, et_perimeter,
    halfdisk_bounds, symmetric_segments_vs_segment, RectSegmentSpec,
};
use crate::capsolve::{estimate_capacity_with, CapacityEstimate, Condenser, EstimateOptions, Problem, Region};
use crate::capforms::mod_annulus;
use crate::error::{Error, Result};
use crate::geomgen::{
    build_et, build_halfdisk, build_rect_segment, gen_convex_polygon, gen_hyperbolic_polygon,
    gen_nonconvex_polygon, gen_trapezium_ring, SeededRng,
};
use crate::hypgeom::euclidean_polygon_hyp_perimeter;
use crate::literal::parse_complex;
use crate::quadmod::{qm, qm_reciprocal_pair, qmt};
use crate::ringbound::{cap_regular_ring, rect_segment_lower_bound, regular_ring, ring_lower_bound};
use crate::tables;
use crate::ComplexPoint;

pub const OUT_DIR_ENV: &str = "CONDCAP_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "condcap", version, about = "Conformal capacities, quadrilateral moduli and their bounds")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Output file; defaults to $CONDCAP_OUT_DIR/<command>.<ext> when that
    /// variable is set, otherwise standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Coarsest grid spacing of the finite-difference oracle.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Refinement levels of the oracle (2 or 3).
    #[arg(long, default_value_t = 3, global = true, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub levels: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Convex,
    Hyperbolic,
    Nonconvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RingFamily {
    Regular,
    Trapezium,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Modulus of the quadrilateral (0, 1, A, B).
    Qm {
        #[arg(long = "A", value_parser = complex_arg, allow_hyphen_values = true)]
        a: ComplexPoint,
        #[arg(long = "B", value_parser = complex_arg, allow_hyphen_values = true)]
        b: ComplexPoint,
    },
    /// Modulus of the triangle (0, 1, B) with A marked on [1, B].
    Qmt {
        #[arg(long = "A", value_parser = complex_arg, allow_hyphen_values = true)]
        a: ComplexPoint,
        #[arg(long = "B", value_parser = complex_arg, allow_hyphen_values = true)]
        b: ComplexPoint,
    },
    /// Quadrilateral moduli against the reference values.
    Table1,
    /// Regular polygonal rings against the reference capacities.
    Table2,
    /// Half-disk bounds against the reference values.
    Table3 {
        /// Also estimate the capacities with the grid oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Rectangle with a slit: exact capacity and ring lower bound.
    Table4 {
        #[arg(long)]
        oracle: bool,
    },
    /// Split-family lower bound for the half-disk.
    Lbnew,
    /// Capacity of random polygons against the equal-perimeter disk and segment.
    SweepEdi {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tube E(t) around a circular arc against the equal-perimeter segment.
    EtCurve {
        #[arg(long, default_value_t = PI / 4.0)]
        theta: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        tmin: f64,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
    },
    /// Upper half of a hyperbolic disk: bounds and oracle capacity.
    Halfdisk {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        t: f64,
    },
    /// m symmetric radial segments: exact capacity, oracle and the
    /// equal-perimeter segment.
    Symsegs {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        s: f64,
    },
    /// Polygonal ring: quadrilateral lower bound and oracle capacity.
    Ring {
        #[arg(long, value_enum)]
        family: RingFamily,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rectangle with a slit for arbitrary parameters.
    RectSegment {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        oracle: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Qm { .. } => "qm",
            Command::Qmt { .. } => "qmt",
            Command::Table1 => "table1",
            Command::Table2 => "table2",
            Command::Table3 { .. } => "table3",
            Command::Table4 { .. } => "table4",
            Command::Lbnew => "lbnew",
            Command::SweepEdi { .. } => "sweep-edi",
            Command::EtCurve { .. } => "et-curve",
            Command::Halfdisk { .. } => "halfdisk",
            Command::Symsegs { .. } => "symsegs",
            Command::Ring { .. } => "ring",
            Command::RectSegment { .. } => "rect-segment",
        }
    }
}

fn complex_arg(s: &str) -> std::result::Result<ComplexPoint, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_sig(*x),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Num(x) if x.is_finite() => format_sig(*x).parse::<f64>().map(|v| json!(v)).unwrap_or(Json::Null),
            Cell::Num(_) | Cell::Missing => Json::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

fn opt(x: Option<f64>) -> Cell {
    x.map(Cell::Num).unwrap_or(Cell::Missing)
}

/// Formats with 15 significant digits, fixed notation for moderate
/// magnitudes.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.14}", 0.0);
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{x:.14e}");
    }
    let s = format!("{:.*}", (14 - exp).max(0) as usize, x);
    let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
    let leading_zeros = if x.abs() < 1.0 { (-exp) as usize } else { 0 };
    if digits - leading_zeros > 15 && exp < 14 {
        // rounding carried into a new leading digit
        return format!("{:.*}", (13 - exp).max(0) as usize, x);
    }
    s
}

fn format_complex(z: ComplexPoint) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

/// A rectangular result with per-row failures.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// (row index, message) for rows that could not be computed.
    pub errors: Vec<(usize, String)>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Records a failed row: key cells, blanks, and the message as status.
    fn push_error(&mut self, mut key: Vec<Cell>, err: &Error) {
        let row = self.rows.len();
        self.errors.push((row, err.to_string()));
        key.resize(self.columns.len() - 1, Cell::Missing);
        key.push(Cell::Text(format!("error: {err}")));
        self.rows.push(key);
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.into_inner().map_err(|e| io::Error::other(e.to_string()))
    }

    pub fn to_json(&self) -> Vec<u8> {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| Json::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let mut out = serde_json::to_vec_pretty(&json!({ "columns": self.columns, "rows": rows }))
            .expect("table serializes");
        out.push(b'\n');
        out
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn oracle_options(cli: &Cli) -> EstimateOptions {
    EstimateOptions {
        levels: cli.levels as usize,
        base_h: cli.h,
        ..Default::default()
    }
}

fn estimate<P: Problem + ?Sized>(problem: &P, opts: EstimateOptions) -> Result<CapacityEstimate> {
    estimate_capacity_with(problem, opts)
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<Table> {
    let opts = oracle_options(cli);
    match &cli.command {
        Command::Qm { a, b } => {
            let mut t = Table::new(&["A", "B", "qm"]);
            t.push(vec![format_complex(*a).into(), format_complex(*b).into(), qm(*a, *b)?.into()]);
            Ok(t)
        }
        Command::Qmt { a, b } => {
            let mut t = Table::new(&["A", "B", "qmt"]);
            t.push(vec![format_complex(*a).into(), format_complex(*b).into(), qmt(*a, *b)?.into()]);
            Ok(t)
        }
        Command::Table1 => Ok(table1()),
        Command::Table2 => Ok(table2()),
        Command::Table3 { oracle } => Ok(table3(oracle.then_some(opts))),
        Command::Table4 { oracle } => Ok(table4(oracle.then_some(opts))),
        Command::Lbnew => Ok(lbnew()),
        Command::SweepEdi { family, count, seed } => Ok(sweep_edi(*family, *count, *seed, opts)),
        Command::EtCurve { theta, r, tmin, tmax, steps } => et_curve(*theta, *r, *tmin, *tmax, *steps, opts),
        Command::Halfdisk { x, t } => halfdisk(*x, *t, opts),
        Command::Symsegs { m, s } => symsegs(*m, *s, opts),
        Command::Ring { family, m, lambda, count, seed } => ring(*family, *m, *lambda, *count, *seed, opts),
        Command::RectSegment { a, b, c, d, oracle } => {
            let spec = RectSegmentSpec::new(*a, *b, *c, *d)?;
            let mut t = Table::new(&["a", "b", "c", "d", "cap", "lower", "cap_oracle", "oracle_error"]);
            let (v, e) = match oracle {
                true => {
                    let est = estimate(&build_rect_segment(spec)?, opts)?;
                    (Some(est.value), Some(est.error_estimate))
                }
                false => (None, None),
            };
            t.push(vec![
                (*a).into(),
                (*b).into(),
                (*c).into(),
                (*d).into(),
                cap_rect_segment(spec)?.into(),
                rect_segment_lower_bound(spec)?.into(),
                opt(v),
                opt(e),
            ]);
            Ok(t)
        }
    }
}

pub fn table1() -> Table {
    let mut t = Table::new(&["A", "B", "qm", "reference", "abs_deviation", "reciprocal_residual", "status"]);
    for row in tables::qm_rows() {
        let key = vec![format_complex(row.vertex_a).into(), format_complex(row.vertex_b).into()];
        let computed = qm(row.vertex_a, row.vertex_b).and_then(|v| {
            let (ra, rb) = qm_reciprocal_pair(row.vertex_a, row.vertex_b);
            Ok((v, (v * qm(ra, rb)? - 1.0).abs()))
        });
        match computed {
            Ok((v, residual)) => {
                let mut r = key;
                r.extend([v.into(), row.qm.into(), (v - row.qm).abs().into(), residual.into(), "ok".into()]);
                t.push(r);
            }
            Err(e) => t.push_error(key, &e),
        }
    }
    t
}

pub fn table2() -> Table {
    let mut t = Table::new(&["m", "lambda", "cap", "reference", "abs_deviation", "rel_deviation", "status"]);
    for row in tables::regular_ring_rows() {
        let m_cell = row.m.map(|m| Cell::Int(m as i64)).unwrap_or_else(|| "inf".into());
        let key = vec![m_cell, row.lambda.into()];
        let v = match row.m {
            Some(m) => cap_regular_ring(m, row.lambda),
            None => mod_annulus(row.lambda, 1.0),
        };
        match v {
            Ok(v) => {
                let mut r = key;
                let dev = (v - row.cap).abs();
                r.extend([v.into(), row.cap.into(), dev.into(), (dev / row.cap).into(), "ok".into()]);
                t.push(r);
            }
            Err(e) => t.push_error(key, &e),
        }
    }
    t
}

pub fn table3(oracle: Option<EstimateOptions>) -> Table {
    let mut t = Table::new(&["t", "quantity", "value", "reference", "abs_deviation", "error_estimate", "status"]);
    for row in tables::halfdisk_rows() {
        match halfdisk_bounds(row.t) {
            Ok(b) => {
                let refs = [
                    ("symmetrization", row.symmetrization),
                    ("perimeter-segment", row.perimeter_segment),
                    ("split-families", row.split_families),
                    ("perimeter-disk", row.perimeter_disk),
                ];
                for (label, reference) in refs {
                    let v = b.lower_value(label).or_else(|| b.upper_value(label));
                    t.push(vec![
                        row.t.into(),
                        label.into(),
                        opt(v),
                        reference.into(),
                        opt(v.map(|v| (v - reference).abs())),
                        Cell::Missing,
                        "ok".into(),
                    ]);
                }
            }
            Err(e) => t.push_error(vec![row.t.into(), "bounds".into()], &e),
        }
        if let Some(opts) = oracle {
            for (x, reference) in [(0.5, row.cap_x05), (0.75, row.cap_x075)] {
                let label = format!("cap_x{x}");
                let key = vec![row.t.into(), label.clone().into()];
                match build_halfdisk(x, row.t).and_then(|h| estimate(&h.condenser(), opts)) {
                    Ok(est) => t.push(vec![
                        row.t.into(),
                        label.into(),
                        est.value.into(),
                        reference.into(),
                        (est.value - reference).abs().into(),
                        est.error_estimate.into(),
                        "ok".into(),
                    ]),
                    Err(e) => t.push_error(key, &e),
                }
            }
        }
    }
    t
}

pub fn table4(oracle: Option<EstimateOptions>) -> Table {
    let mut cols = vec![
        "a", "b", "c", "d", "cap", "cap_reference", "cap_abs_deviation", "lower", "lower_reference",
        "lower_abs_deviation",
    ];
    if oracle.is_some() {
        cols.extend(["cap_oracle", "oracle_error"]);
    }
    cols.push("status");
    let mut t = Table::new(&cols);
    for row in tables::rect_segment_rows() {
        let key: Vec<Cell> = vec![row.a.into(), row.b.into(), row.c.into(), row.d.into()];
        let computed = RectSegmentSpec::new(row.a, row.b, row.c, row.d).and_then(|spec| {
            let cap = cap_rect_segment(spec)?;
            let lower = rect_segment_lower_bound(spec)?;
            let est = match oracle {
                Some(opts) => Some(estimate(&build_rect_segment(spec)?, opts)?),
                None => None,
            };
            Ok((cap, lower, est))
        });
        match computed {
            Ok((cap, lower, est)) => {
                let mut r = key;
                r.extend([
                    cap.into(),
                    row.cap.into(),
                    (cap - row.cap).abs().into(),
                    lower.into(),
                    row.lower.into(),
                    (lower - row.lower).abs().into(),
                ]);
                if let Some(est) = est {
                    r.extend([est.value.into(), est.error_estimate.into()]);
                }
                r.push("ok".into());
                t.push(r);
            }
            Err(e) => t.push_error(key, &e),
        }
    }
    t
}

pub fn lbnew() -> Table {
    let mut t = Table::new(&["t", "lower", "reference", "abs_deviation", "cap_reference", "gap", "status"]);
    for row in tables::halfdisk_rows() {
        match halfdisk_bounds(row.t) {
            Ok(b) => {
                let v = b.lower_value("split-families").unwrap_or(f64::NAN);
                t.push(vec![
                    row.t.into(),
                    v.into(),
                    row.split_families.into(),
                    (v - row.split_families).abs().into(),
                    row.cap_x05.into(),
                    (row.cap_x05 - v).into(),
                    "ok".into(),
                ]);
            }
            Err(e) => t.push_error(vec![row.t.into()], &e),
        }
    }
    t
}

struct EdiRow {
    m: usize,
    perimeter: f64,
    est: CapacityEstimate,
}

fn edi_row(family: Family, seed: u64, opts: EstimateOptions) -> Result<EdiRow> {
    let mut rng = SeededRng::new(seed);
    let (m, perimeter, region) = match family {
        Family::Convex => {
            let v = gen_convex_polygon(&mut rng)?;
            (v.len(), euclidean_polygon_hyp_perimeter(&v)?, Region::Polygon(v))
        }
        Family::Nonconvex => {
            let v = gen_nonconvex_polygon(&mut rng)?;
            (v.len(), euclidean_polygon_hyp_perimeter(&v)?, Region::Polygon(v))
        }
        Family::Hyperbolic => {
            let hp = gen_hyperbolic_polygon(&mut rng)?;
            (hp.vertices.len(), hp.perimeter, hp.region())
        }
    };
    let est = estimate(&Condenser::in_unit_disk(region), opts)?;
    Ok(EdiRow { m, perimeter, est })
}

/// Rows use the seeds `seed, seed + 1, …`.
pub fn sweep_edi(family: Family, count: u64, seed: u64, opts: EstimateOptions) -> Table {
    let mut t = Table::new(&[
        "index", "seed", "m", "perimeter", "cap_E", "cap_E_error", "cap_D", "cap_I", "status",
    ]);
    let results: Vec<Result<EdiRow>> = (0..count)
        .into_par_iter()
        .map(|i| edi_row(family, seed.wrapping_add(i), opts))
        .collect();
    for (i, res) in results.into_iter().enumerate() {
        let key = vec![Cell::Int(i as i64), Cell::Text(seed.wrapping_add(i as u64).to_string())];
        let full = res.and_then(|row| {
            let cap_d = cap_disk_by_perimeter(row.perimeter)?;
            let cap_i = cap_segment((0.25 * row.perimeter).tanh())?;
            Ok((row, cap_d, cap_i))
        });
        match full {
            Ok((row, cap_d, cap_i)) => {
                let mut r = key;
                r.extend([
                    Cell::Int(row.m as i64),
                    row.perimeter.into(),
                    row.est.value.into(),
                    row.est.error_estimate.into(),
                    cap_d.into(),
                    cap_i.into(),
                    "ok".into(),
                ]);
                t.push(r);
            }
            Err(e) => t.push_error(key, &e),
        }
    }
    t
}

pub fn et_curve(theta: f64, r: f64, tmin: f64, tmax: f64, steps: u64, opts: EstimateOptions) -> Result<Table> {
    if !(tmin > 0.0 && tmin <= tmax) {
        return Err(Error::Constraint(format!("need 0 < tmin <= tmax, got {tmin}, {tmax}")));
    }
    let limit = et_max_t(theta, r);
    if !(tmax <= limit) {
        return Err(Error::Constraint(format!(
            "tmax = {tmax} exceeds the admissible {limit} for theta = {theta}, r = {r}"
        )));
    }
    let ts: Vec<f64> = if steps == 1 {
        vec![tmin]
    } else {
        (0..steps).map(|k| tmin + (tmax - tmin) * k as f64 / (steps - 1) as f64).collect()
    };
    for &t in &ts {
        et_perimeter(theta, r, t)?;
    }
    let results: Vec<Result<(f64, CapacityEstimate, f64)>> = ts
        .par_iter()
        .map(|&t| {
            let f = et_perimeter(theta, r, t)?;
            let est = estimate(&build_et(theta, r, t)?.condenser(), opts)?;
            Ok((f, est, cap_segment((0.25 * f).tanh())?))
        })
        .collect();
    let mut table = Table::new(&["t", "perimeter", "cap_Et", "cap_Et_error", "cap_It", "difference", "status"]);
    for (t, res) in ts.iter().zip(results) {
        match res {
            Ok((f, est, ci)) => table.push(vec![
                (*t).into(),
                f.into(),
                est.value.into(),
                est.error_estimate.into(),
                ci.into(),
                (est.value - ci).into(),
                "ok".into(),
            ]),
            Err(e) => table.push_error(vec![(*t).into()], &e),
        }
    }
    Ok(table)
}

pub fn halfdisk(x: f64, t: f64, opts: EstimateOptions) -> Result<Table> {
    let hd = build_halfdisk(x, t)?;
    let bounds = halfdisk_bounds(t)?;
    let est = estimate(&hd.condenser(), opts)?;
    let mut table = Table::new(&["x", "t", "quantity", "value", "error_estimate"]);
    for (label, v) in bounds.lower.iter().chain(&bounds.upper) {
        table.push(vec![x.into(), t.into(), label.as_str().into(), (*v).into(), Cell::Missing]);
    }
    table.push(vec![x.into(), t.into(), "cap_oracle".into(), est.value.into(), est.error_estimate.into()]);
    Ok(table)
}

/// The star `∪ [0, s e^{2πik/m}]` as slits.
pub fn symmetric_segments_region(m: u32, s: f64) -> Region {
    Region::Union(
        (0..m)
            .map(|k| Region::Segment {
                from: ComplexPoint::new(0.0, 0.0),
                to: ComplexPoint::from_polar(s, 2.0 * PI * k as f64 / m as f64),
            })
            .collect(),
    )
}

pub fn symsegs(m: u32, s: f64, opts: EstimateOptions) -> Result<Table> {
    let (c, d) = symmetric_segments_vs_segment(m, s)?;
    let est = estimate(&Condenser::in_unit_disk(symmetric_segments_region(m, s)), opts)?;
    let mut t = Table::new(&["m", "s", "cap", "cap_oracle", "oracle_error", "rel_difference", "cap_equal_perimeter_segment"]);
    t.push(vec![
        Cell::Int(m as i64),
        s.into(),
        c.into(),
        est.value.into(),
        est.error_estimate.into(),
        ((est.value - c) / c).into(),
        d.into(),
    ]);
    Ok(t)
}

pub fn ring(family: RingFamily, m: u32, lambda: f64, count: u64, seed: u64, opts: EstimateOptions) -> Result<Table> {
    let rings = match family {
        RingFamily::Regular => vec![(Cell::Missing, regular_ring(m, lambda)?)],
        RingFamily::Trapezium => (0..count)
            .map(|i| {
                let s = seed.wrapping_add(i);
                Ok((Cell::Text(s.to_string()), gen_trapezium_ring(m, &mut SeededRng::new(s))?))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let results: Vec<Result<(f64, CapacityEstimate)>> = rings
        .par_iter()
        .map(|(_, ring)| Ok((ring_lower_bound(ring)?, estimate(&Condenser::polygonal_ring(ring), opts)?)))
        .collect();
    let mut t = Table::new(&["m", "seed", "lower", "cap_oracle", "oracle_error", "upper", "status"]);
    for ((seed_cell, _), res) in rings.into_iter().zip(results) {
        let key = vec![Cell::Int(m as i64), seed_cell];
        match res {
            Ok((lower, est)) => {
                let mut r = key;
                r.extend([lower.into(), est.value.into(), est.error_estimate.into(), "unavailable".into(), "ok".into()]);
                t.push(r);
            }
            Err(e) => t.push_error(key, &e),
        }
    }
    Ok(t)
}

fn errors_json(errors: &[(Option<usize>, String)], kind: &str) -> String {
    let list: Vec<Json> = errors
        .iter()
        .map(|(row, msg)| json!({ "kind": kind, "row": row, "message": msg }))
        .collect();
    json!({ "errors": list }).to_string()
}

fn output_path(cli: &Cli) -> Option<PathBuf> {
    if let Some(p) = &cli.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV)?;
    let ext = match cli.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    Some(PathBuf::from(dir).join(format!("{}.{ext}", cli.command.name())))
}

/// Parses `args`, runs the command and writes the result; returns the exit
/// code. Usage errors give 2, failed commands or rows 1.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or(&msg).trim_start_matches("error: ").to_string();
            let _ = writeln!(stderr, "{}", errors_json(&[(None, first)], "usage"));
            return 2;
        }
    };
    let table = match execute(&cli) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "{}", errors_json(&[(None, e.to_string())], "error"));
            return 1;
        }
    };
    let bytes = match cli.format {
        Format::Csv => match table.to_csv() {
            Ok(b) => b,
            Err(e) => {
                let _ = writeln!(stderr, "{}", errors_json(&[(None, e.to_string())], "io"));
                return 1;
            }
        },
        Format::Json => table.to_json(),
    };
    let written = match output_path(&cli) {
        Some(path) => path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map_or(Ok(()), fs::create_dir_all)
            .and_then(|_| fs::write(&path, &bytes)),
        None => stdout.write_all(&bytes),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "{}", errors_json(&[(None, e.to_string())], "io"));
        return 1;
    }
    if !table.errors.is_empty() {
        let list: Vec<(Option<usize>, String)> =
            table.errors.iter().map(|(r, m)| (Some(*r), m.clone())).collect();
        let _ = writeln!(stderr, "{}", errors_json(&list, "row"));
        return 1;
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.17336589158553), "1.17336589158553");
        assert_eq!(format_sig(4.00013977481468), "4.00013977481468");
        assert_eq!(format_sig(12.855048267353), "12.8550482673530");
        assert_eq!(format_sig(0.5), "0.500000000000000");
        assert_eq!(format_sig(9.9999999999999999), "10.0000000000000");
        assert_eq!(format_sig(1e-9), "1.00000000000000e-9");
        assert_eq!(format_sig(-2.5), "-2.50000000000000");
    }

    #[test]
    fn complex_round_trip() {
        let z = ComplexPoint::new(-1.0, 2.0);
        assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        assert_eq!(format_complex(ComplexPoint::new(7.0, -0.5)), "7-0.5i");
    }

    #[test]
    fn usage_error_exit_code() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["condcap", "qm", "--A", "7+5", "--B", "i"], &mut out, &mut err);
        assert_eq!(code, 2);
        let v: Json = serde_json::from_slice(&err).unwrap();
        assert_eq!(v["errors"][0]["kind"], "usage");
    }
}
