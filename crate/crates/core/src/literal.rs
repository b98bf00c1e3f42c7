//! Complex number literals of the form `a+bi`.
//!
//! Grammar, with spaces allowed anywhere:
//!
//! ```text
//! literal := real | imag | real sign imag
//! imag    := [sign] [number] "i"
//! ```
//!
//! so `3`, `-2.5i`, `i`, `7+5i` and `1 - 0.5 i` are accepted.

use crate::error::{Error, Result};
use crate::ComplexPoint;

pub fn parse_complex(text: &str) -> Result<ComplexPoint> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Domain {
        func: "parse_complex",
        detail: format!("malformed complex literal {text:?}"),
    };
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return match s.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(ComplexPoint::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    // split before the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().map_err(|_| bad())?
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(ComplexPoint::new(re, im))
}
