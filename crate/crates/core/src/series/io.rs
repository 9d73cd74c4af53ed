//! Plain-text series format: a header line `order K`, an optional
//! `valuation v` line for Laurent series, then one `a/b` coefficient per line.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::rings::{format_rational, parse_rational, Rational};
use crate::series::{LaurentSeries, TruncSeries};

pub fn write_trunc(s: &TruncSeries) -> String {
    let mut out = format!("order {}\n", s.order());
    for c in s.coeffs() {
        let _ = writeln!(out, "{}", format_rational(c));
    }
    out
}

/// Laurent series are written with `order` equal to the absolute precision.
pub fn write_laurent(s: &LaurentSeries) -> String {
    let prec = s.precision();
    let v = s.valuation();
    let mut out = format!("order {prec}\nvaluation {v}\n");
    for i in v..prec {
        let _ = writeln!(out, "{}", format_rational(&s.coeff(i).unwrap()));
    }
    out
}

fn header(line: Option<&str>, key: &str) -> Result<i64> {
    let line = line.ok_or_else(|| Error::Parse(format!("missing `{key}` line")))?;
    let rest = line
        .trim()
        .strip_prefix(key)
        .ok_or_else(|| Error::Parse(format!("expected `{key} <int>`, got {line:?}")))?;
    rest.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer in {line:?}")))
}

fn body<'a>(lines: impl Iterator<Item = &'a str>) -> Result<Vec<Rational>> {
    lines
        .filter(|l| !l.trim().is_empty())
        .map(parse_rational)
        .collect()
}

pub fn read_trunc(text: &str) -> Result<TruncSeries> {
    let mut lines = text.lines();
    let k = header(lines.next(), "order")?;
    let coeffs = body(lines)?;
    if k < 1 || coeffs.len() as i64 != k {
        return Err(Error::Parse(format!(
            "order {k} but {} coefficients",
            coeffs.len()
        )));
    }
    Ok(TruncSeries::new(coeffs))
}

pub fn read_laurent(text: &str) -> Result<LaurentSeries> {
    let mut lines = text.lines();
    let prec = header(lines.next(), "order")?;
    let v = header(lines.next(), "valuation")?;
    let coeffs = body(lines)?;
    if v + coeffs.len() as i64 != prec {
        return Err(Error::Parse(format!(
            "valuation {v} and {} coefficients do not reach order {prec}",
            coeffs.len()
        )));
    }
    Ok(LaurentSeries::new(v, coeffs))
}
