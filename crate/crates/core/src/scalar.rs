//! Scalar literals accepted on the command line.
//!
//! ```text
//! -2.5      3/5      1e-3
//! 1.0+0.5i  2i       -1-i     i
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};

fn parse_error(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Decimal or `p/q` rational.
fn parse_real(text: &str, input: &str) -> Result<f64> {
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| parse_error(input, "bad numerator"))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| parse_error(input, "bad denominator"))?;
            if den == 0.0 {
                return Err(parse_error(input, "zero denominator"));
            }
            num / den
        }
        None => text
            .parse()
            .map_err(|_| parse_error(input, "not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(parse_error(input, "not finite"))
    }
}

/// Imaginary coefficient; a bare sign means one.
fn parse_imag(text: &str, input: &str) -> Result<f64> {
    match text {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(text, input),
    }
}

/// Parses `a`, `a/b`, `bi`, or `a+bi` / `a-bi`.
pub fn parse_scalar(input: &str) -> Result<Complex64> {
    let text = input.trim();
    if text.is_empty() {
        return Err(parse_error(input, "empty"));
    }
    let Some(body) = text.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(text, input)?, 0.0));
    };

    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));

    match split {
        Some(k) => {
            let re = parse_real(&body[..k], input)?;
            let im = parse_imag(&body[k..], input)?;
            Ok(Complex64::new(re, im))
        }
        None => Ok(Complex64::new(0.0, parse_imag(body, input)?)),
    }
}

/// Parses a whole first row.
pub fn parse_row<S: AsRef<str>>(items: &[S]) -> Result<Vec<Complex64>> {
    items.iter().map(|s| parse_scalar(s.as_ref())).collect()
}
