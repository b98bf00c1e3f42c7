//! Reference values bundled with the crate.

use crate::literal::parse_complex;
use crate::ComplexPoint;

const QM: &str = include_str!("../data/qm.csv");
const REGULAR_RING: &str = include_str!("../data/regular_ring.csv");
const HALFDISK: &str = include_str!("../data/halfdisk.csv");
const RECT_SEGMENT: &str = include_str!("../data/rect_segment.csv");

/// Data rows of an embedded CSV file: comments and header skipped.
fn rows(text: &'static str) -> impl Iterator<Item = Vec<&'static str>> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::trim).collect())
}

fn num(s: &str) -> f64 {
    s.parse().expect("embedded reference value")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmRow {
    pub vertex_a: ComplexPoint,
    pub vertex_b: ComplexPoint,
    pub qm: f64,
}

pub fn qm_rows() -> Vec<QmRow> {
    rows(QM)
        .map(|r| QmRow {
            vertex_a: parse_complex(r[0]).expect("embedded literal"),
            vertex_b: parse_complex(r[1]).expect("embedded literal"),
            qm: num(r[2]),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularRingRow {
    /// `None` for the limiting annulus.
    pub m: Option<u32>,
    pub lambda: f64,
    pub cap: f64,
}

pub fn regular_ring_rows() -> Vec<RegularRingRow> {
    rows(REGULAR_RING)
        .map(|r| RegularRingRow {
            m: if r[0] == "inf" { None } else { Some(r[0].parse().expect("embedded m")) },
            lambda: num(r[1]),
            cap: num(r[2]),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfDiskRow {
    pub t: f64,
    pub symmetrization: f64,
    pub perimeter_segment: f64,
    pub split_families: f64,
    pub perimeter_disk: f64,
    pub cap_x05: f64,
    pub cap_x075: f64,
}

pub fn halfdisk_rows() -> Vec<HalfDiskRow> {
    rows(HALFDISK)
        .map(|r| HalfDiskRow {
            t: num(r[0]),
            symmetrization: num(r[1]),
            perimeter_segment: num(r[2]),
            split_families: num(r[3]),
            perimeter_disk: num(r[4]),
            cap_x05: num(r[5]),
            cap_x075: num(r[6]),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectSegmentRow {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub cap: f64,
    pub lower: f64,
}

pub fn rect_segment_rows() -> Vec<RectSegmentRow> {
    rows(RECT_SEGMENT)
        .map(|r| RectSegmentRow {
            a: num(r[0]),
            b: num(r[1]),
            c: num(r[2]),
            d: num(r[3]),
            cap: num(r[4]),
            lower: num(r[5]),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts() {
        assert_eq!(qm_rows().len(), 8);
        assert_eq!(regular_ring_rows().len(), 36);
        assert_eq!(regular_ring_rows().iter().filter(|r| r.m.is_none()).count(), 4);
        assert_eq!(halfdisk_rows().len(), 4);
        assert_eq!(rect_segment_rows().len(), 8);
    }
}
