//! Quantities with unit suffixes: `5kb`, `200kbps`, `1.2Mbps`, `20ms`.
//!
//! Prefixes are decimal (k = 1000). Lower-case `b` is bits and upper-case `B`
//! is bytes; `mbps` is accepted as megabits per second.

use anyhow::{anyhow, bail, Result};
use svcurve::rational::{int, parse_rational};
use svcurve::Rational;

fn split(text: &str) -> (&str, &str) {
    let s = text.trim();
    let at = s
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(s.len());
    // exponent markers are only numeric when followed by a digit or sign
    let at = match s[..at].rfind(['e', 'E']) {
        Some(e)
            if !s[e + 1..].starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+') =>
        {
            e
        }
        _ => at,
    };
    (s[..at].trim(), s[at..].trim())
}

fn number(text: &str, what: &str) -> Result<(Rational, String)> {
    let (num, unit) = split(text);
    if unit.is_empty() {
        bail!("{what} {text:?} needs a unit");
    }
    let value =
        parse_rational(num).map_err(|_| anyhow!("{what} {text:?} is not a number with a unit"))?;
    Ok((value, unit.to_string()))
}

/// Data amount in bits.
pub fn parse_data(text: &str) -> Result<Rational> {
    let (v, unit) = number(text, "data amount")?;
    let factor = match unit.as_str() {
        "b" | "bit" | "bits" => int(1),
        "kb" | "kbit" | "Kb" => int(1000),
        "Mb" | "mb" | "Mbit" => int(1_000_000),
        "B" | "byte" | "bytes" => int(8),
        "kB" | "KB" => int(8000),
        "MB" => int(8_000_000),
        other => bail!("unknown data unit {other:?} in {text:?}"),
    };
    Ok(v * factor)
}

/// Rate in bits per second.
pub fn parse_rate(text: &str) -> Result<Rational> {
    let (v, unit) = number(text, "rate")?;
    let factor = match unit.as_str() {
        "bps" | "b/s" => int(1),
        "kbps" | "Kbps" | "kb/s" => int(1000),
        "Mbps" | "mbps" | "Mb/s" => int(1_000_000),
        "Gbps" | "gbps" | "Gb/s" => int(1_000_000_000),
        other => bail!("unknown rate unit {other:?} in {text:?}"),
    };
    Ok(v * factor)
}

/// Duration in seconds.
pub fn parse_time(text: &str) -> Result<Rational> {
    let (v, unit) = number(text, "duration")?;
    let scale = match unit.as_str() {
        "s" => int(1),
        "ms" => int(1000),
        "us" => int(1_000_000),
        other => bail!("unknown time unit {other:?} in {text:?}"),
    };
    Ok(v / scale)
}
