//! Hexadecimal floating point text (`0x1.8p+1`), exact for every finite `f64`.

use crate::error::{Error, Result};

const MANTISSA_BITS: u32 = 52;
const EXP_BIAS: i64 = 1023;

pub fn encode(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = x.to_bits();
    let exp_field = ((bits >> MANTISSA_BITS) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << MANTISSA_BITS) - 1);
    if exp_field == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_field == 0 {
        (0, 1 - EXP_BIAS)
    } else {
        (1, exp_field - EXP_BIAS)
    };
    let mut digits = format!("{mantissa:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let frac = if digits.is_empty() {
        String::new()
    } else {
        format!(".{digits}")
    };
    let exp_sign = if exp < 0 { '-' } else { '+' };
    format!("{sign}0x{lead}{frac}p{exp_sign}{}", exp.abs())
}

/// Parses the output of [`encode`] (and any normalized `0x1.hhhp±e` / `0x0.hhhp-1022` form).
pub fn decode(text: &str) -> Result<f64> {
    let bad = || Error::parse(0, format!("invalid hex float `{text}`"));
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let signed = |v: f64| if negative { -v } else { v };
    match body {
        "inf" => return Ok(signed(f64::INFINITY)),
        "nan" => return Ok(f64::NAN),
        _ => {}
    }
    let body = body.strip_prefix("0x").ok_or_else(bad)?;
    let (mant, exp) = body.split_once('p').ok_or_else(bad)?;
    let exp: i64 = exp.parse().map_err(|_| bad())?;
    let (lead, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if frac.len() > 13 || !frac.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(bad());
    }
    let frac_bits = if frac.is_empty() {
        0
    } else {
        u64::from_str_radix(frac, 16).map_err(|_| bad())? << (4 * (13 - frac.len()))
    };
    let bits = match lead {
        "0" if frac_bits == 0 => 0,
        "0" if exp == 1 - EXP_BIAS => frac_bits,
        "1" if (1 - EXP_BIAS..=EXP_BIAS).contains(&exp) => {
            (((exp + EXP_BIAS) as u64) << MANTISSA_BITS) | frac_bits
        }
        _ => return Err(bad()),
    };
    Ok(signed(f64::from_bits(bits)))
}
