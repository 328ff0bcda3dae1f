//! Quantity strings with unit suffixes, normalised to SI:
//!
//! | kind       | bare number | suffixes                         | unit of result  |
//! |------------|-------------|----------------------------------|-----------------|
//! | time       | seconds     | `s ms us µs ns ps`               | s               |
//! | frequency  | s⁻¹         | `Hz kHz MHz GHz`                 | s⁻¹ (angular)   |
//! | separation | light-s     | time suffixes, `m km`            | light-seconds   |
//!
//! Frequencies are taken as angular without a `2π` factor: `100kHz` is
//! `1e5 s⁻¹`. Distances become light-travel times, `1km = 1/299792.458 s`.
//! Ranges are written `lo..hi`.

use thiserror::Error;

pub const SPEED_OF_LIGHT_KM_PER_S: f64 = 299_792.458;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {input:?}: {reason}")]
pub struct UnitError {
    pub input: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantityKind {
    Time,
    Frequency,
    Separation,
}

fn err(input: &str, reason: impl Into<String>) -> UnitError {
    UnitError { input: input.to_owned(), reason: reason.into() }
}

fn split_suffix(s: &str) -> (&str, &str) {
    let cut = s
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_alphabetic())
        .last()
        .map_or(s.len(), |(i, _)| i);
    (s[..cut].trim_end(), &s[cut..])
}

#[derive(Clone, Copy)]
enum Scale {
    Mul(f64),
    /// Dividing by an exact power of ten keeps `5us` equal to `5e-6`.
    Div(f64),
}

fn scale(kind: QuantityKind, suffix: &str) -> Option<Scale> {
    use Scale::{Div, Mul};
    let time = |u: &str| match u {
        "" | "s" => Some(Mul(1.0)),
        "ms" => Some(Div(1e3)),
        "us" | "µs" | "μs" => Some(Div(1e6)),
        "ns" => Some(Div(1e9)),
        "ps" => Some(Div(1e12)),
        _ => None,
    };
    match kind {
        QuantityKind::Time => time(suffix),
        QuantityKind::Frequency => match suffix {
            "" | "Hz" => Some(Mul(1.0)),
            "kHz" => Some(Mul(1e3)),
            "MHz" => Some(Mul(1e6)),
            "GHz" => Some(Mul(1e9)),
            _ => None,
        },
        QuantityKind::Separation => match suffix {
            "m" => Some(Div(1e3 * SPEED_OF_LIGHT_KM_PER_S)),
            "km" => Some(Div(SPEED_OF_LIGHT_KM_PER_S)),
            other => time(other),
        },
    }
}

/// Parse one quantity of the given kind.
pub fn parse_quantity(kind: QuantityKind, input: &str) -> Result<f64, UnitError> {
    let s = input.trim();
    let (number, suffix) = split_suffix(s);
    if number.is_empty() {
        return Err(err(input, "missing number"));
    }
    let scale = scale(kind, suffix).ok_or_else(|| err(input, format!("unknown unit {suffix:?}")))?;
    let value: f64 = number.parse().map_err(|e| err(input, format!("{e}")))?;
    let out = match scale {
        Scale::Mul(f) => value * f,
        Scale::Div(d) => value / d,
    };
    if !out.is_finite() {
        return Err(err(input, "value is not finite"));
    }
    Ok(out)
}

pub fn parse_time(input: &str) -> Result<f64, UnitError> {
    parse_quantity(QuantityKind::Time, input)
}

pub fn parse_frequency(input: &str) -> Result<f64, UnitError> {
    parse_quantity(QuantityKind::Frequency, input)
}

pub fn parse_separation(input: &str) -> Result<f64, UnitError> {
    parse_quantity(QuantityKind::Separation, input)
}

/// `lo..hi` or a single value (`lo == hi`). Requires `lo <= hi`.
pub fn parse_range(kind: QuantityKind, input: &str) -> Result<(f64, f64), UnitError> {
    let (lo, hi) = match input.split_once("..") {
        Some((a, b)) => (parse_quantity(kind, a)?, parse_quantity(kind, b)?),
        None => {
            let v = parse_quantity(kind, input)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(err(input, "range bounds are reversed"));
    }
    Ok((lo, hi))
}

/// `points` values from `lo` to `hi` inclusive, evenly or geometrically spaced.
pub fn grid(lo: f64, hi: f64, points: usize, log: bool) -> Result<Vec<f64>, UnitError> {
    let input = format!("{lo}..{hi}");
    if points == 0 {
        return Err(err(&input, "grid needs at least one point"));
    }
    if lo == hi || points == 1 {
        return Ok(vec![lo]);
    }
    if log && !(lo > 0.0) {
        return Err(err(&input, "log spacing needs a positive lower bound"));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / last;
            match (i, log) {
                (0, _) => lo,
                (i, _) if i == points - 1 => hi,
                (_, true) => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
                (_, false) => lo + t * (hi - lo),
            }
        })
        .collect())
}
