//! Working-precision configuration and the decimal text format used for every
//! serialized real number.
//!
//! All reals leave the library as decimal strings that re-parse to the exact
//! same binary value at the same precision.

use rug::float::Round;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mantissa precision and error budget for one evaluation context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    pub bits: u32,
    pub target_abs_err: f64,
    pub max_terms: usize,
}

pub const MIN_BITS: u32 = 53;
pub const DEFAULT_MAX_TERMS: usize = 4096;
pub const EVALUATION_BITS: u32 = 128;
pub const EXTRACTION_BITS: u32 = 256;

impl PrecisionConfig {
    pub fn new(bits: u32, target_abs_err: f64, max_terms: usize) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::InvalidInput(format!(
                "precision {bits} bits is below the minimum of {MIN_BITS}"
            )));
        }
        if !(target_abs_err > 0.0 && target_abs_err.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "target_abs_err must be positive and finite, got {target_abs_err}"
            )));
        }
        if max_terms < 8 {
            return Err(Error::InvalidInput(format!(
                "max_terms must be at least 8, got {max_terms}"
            )));
        }
        Ok(Self {
            bits,
            target_abs_err,
            max_terms,
        })
    }

    /// Error target 2^-(bits-32): 32 guard bits below the working mantissa.
    pub fn with_bits(bits: u32) -> Result<Self> {
        let bits = bits.max(MIN_BITS);
        let target = (2f64).powi(-(bits as i32 - 32)).max(f64::MIN_POSITIVE);
        Self::new(bits, target, DEFAULT_MAX_TERMS)
    }

    pub fn evaluation() -> Self {
        Self::with_bits(EVALUATION_BITS).expect("default precision is valid")
    }

    pub fn extraction() -> Self {
        Self::with_bits(EXTRACTION_BITS).expect("default precision is valid")
    }

    pub fn target(&self) -> Float {
        Float::with_val(self.bits, self.target_abs_err)
    }

    /// Same error budget scaled to twice the mantissa; used by cross-checks.
    pub fn doubled(&self) -> Self {
        let bits = self.bits * 2;
        let target = (self.target_abs_err * self.target_abs_err).max(f64::MIN_POSITIVE);
        Self {
            bits,
            target_abs_err: target,
            max_terms: self.max_terms * 2,
        }
    }
}

pub fn real(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn cplx(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub fn parse_real(text: &str, prec: u32) -> Result<Float> {
    let parsed = Float::parse(text).map_err(|e| Error::InvalidInput(format!("cannot parse real {text:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`. Whitespace is rejected.
pub fn parse_complex(text: &str, prec: u32) -> Result<Complex> {
    let bad = || Error::InvalidInput(format!("cannot parse complex {text:?}; expected a+bi"));
    if text.is_empty() || text.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let Some(body) = text.strip_suffix('i') else {
        let re = parse_real(text, prec)?;
        return Ok(Complex::with_val(prec, (re, 0)));
    };
    // split at the last sign that is not the leading sign and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im_text = match im_text {
        "" | "+" => "1",
        "-" => "-1",
        s => s,
    };
    let re = parse_real(re_text, prec).map_err(|_| bad())?;
    let im = parse_real(im_text.strip_prefix('+').unwrap_or(im_text), prec).map_err(|_| bad())?;
    Ok(Complex::with_val(prec, (re, im)))
}

/// Shortest positional (or scientific, for extreme exponents) decimal text
/// that re-parses to exactly `x` at its own precision.
pub fn format_real(x: &Float) -> String {
    format_digits(x, None)
}

/// Decimal text rounded to `digits` significant digits, trailing zeros trimmed.
pub fn format_real_digits(x: &Float, digits: usize) -> String {
    format_digits(x, Some(digits.max(1)))
}

fn format_digits(x: &Float, digits: Option<usize>) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.into();
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp_round(10, digits, Round::Nearest);
    let Some(exp) = exp else {
        return "0".into();
    };
    let mantissa = mantissa.trim_end_matches('0');
    let mantissa = if mantissa.is_empty() { "0" } else { mantissa };
    let sign = if neg { "-" } else { "" };
    let len = mantissa.len() as i32;
    if (-6..=24).contains(&exp) {
        let body = if exp <= 0 {
            format!("0.{}{}", "0".repeat((-exp) as usize), mantissa)
        } else if exp < len {
            let (int, frac) = mantissa.split_at(exp as usize);
            format!("{int}.{frac}")
        } else {
            format!("{}{}", mantissa, "0".repeat((exp - len) as usize))
        };
        format!("{sign}{body}")
    } else {
        let (lead, rest) = mantissa.split_at(1);
        let rest = if rest.is_empty() {
            String::new()
        } else {
            format!(".{rest}")
        };
        format!("{sign}{lead}{rest}e{}", exp - 1)
    }
}

/// `a+bi` / `a-bi` with both parts in exact round-trip form.
pub fn format_complex(z: &Complex) -> String {
    let re = format_real(z.real());
    let im = format_real(z.imag());
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

pub fn to_f64(x: &Float) -> f64 {
    x.to_f64()
}
