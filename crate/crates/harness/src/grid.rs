//! Parsing of numeric lists given on the command line.

use crate::{Error, Result};

/// Parses `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (number(start)?, number(step)?, number(stop)?);
            if !(step > 0.0) || stop < start {
                return Err(Error::Input(format!("bad range '{text}'")));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| start + step * i as f64).collect())
        }
        [_] => parse_list(text),
        _ => Err(Error::Input(format!("expected start:step:stop, got '{text}'"))),
    }
}

/// Parses `lo:hi:n`.
pub fn parse_span(text: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(Error::Input(format!("expected lo:hi:n, got '{text}'")));
    };
    let n = n
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Input(format!("bad point count in '{text}'")))?;
    Ok((number(lo)?, number(hi)?, n))
}

/// Parses a comma-separated list of reals.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(number).collect()
}

/// Parses a comma-separated pair of integers.
pub fn parse_int_pair(text: &str) -> Result<[i64; 2]> {
    let v: Vec<i64> = text
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| Error::Input(format!("bad integer in '{text}'"))))
        .collect::<Result<_>>()?;
    <[i64; 2]>::try_from(v).map_err(|_| Error::Input(format!("expected two integers, got '{text}'")))
}

/// Parses a comma-separated pair of reals.
pub fn parse_real_pair(text: &str) -> Result<[f64; 2]> {
    <[f64; 2]>::try_from(parse_list(text)?)
        .map_err(|_| Error::Input(format!("expected two numbers, got '{text}'")))
}

fn number(s: &str) -> Result<f64> {
    let x: f64 = s.trim().parse().map_err(|_| Error::Input(format!("bad number '{s}'")))?;
    if !x.is_finite() {
        return Err(Error::Input(format!("non-finite number '{s}'")));
    }
    Ok(x)
}
