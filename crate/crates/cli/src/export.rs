//! `svcurve export-curve`: sampled curves as CSV plus a deviation summary.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use svcurve::bounds::{horizontal_deviation, vertical_deviation};
use svcurve::oracle::SampledCurve;
use svcurve::rational::to_f64;
use svcurve::{Bound, Curve, Rational};

use crate::render::{bound_kilo, bound_ms};
use crate::units::{parse_data, parse_rate, parse_time};

#[derive(Clone, Debug)]
pub struct NamedCurve {
    pub name: String,
    pub curve: Curve,
}

/// Parses `NAME=KIND:ARG:...`, e.g. `env=token-bucket:5kb:200kbps`.
///
/// Kinds: `token-bucket:SIGMA:RHO`, `peak:PEAK:SIGMA:RHO`,
/// `rate-latency:RATE:LATENCY`, `link:RATE`, `delay:T`, `zero`.
pub fn parse_named_curve(text: &str) -> Result<NamedCurve> {
    let (name, spec) = text
        .split_once('=')
        .ok_or_else(|| anyhow!("expected NAME=SPEC, got {text:?}"))?;
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        bail!("curve name {name:?} must be non-empty and use only letters, digits, '-' and '_'");
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let curve = match parts.as_slice() {
        ["token-bucket", sigma, rho] => {
            Curve::token_bucket(&parse_data(sigma)?, &parse_rate(rho)?)?
        }
        ["peak", peak, sigma, rho] => {
            Curve::peak_rate_envelope(&parse_rate(peak)?, &parse_data(sigma)?, &parse_rate(rho)?)?
        }
        ["rate-latency", rate, latency] => {
            Curve::rate_latency(&parse_rate(rate)?, &parse_time(latency)?)?
        }
        ["link", rate] => Curve::link_rate(&parse_rate(rate)?)?,
        ["delay", t] => Curve::delay_impulse(&parse_time(t)?)?,
        ["zero"] => Curve::zero(),
        _ => bail!("unknown curve spec {spec:?}"),
    };
    Ok(NamedCurve {
        name: name.to_string(),
        curve,
    })
}

pub fn curve_csv(sampled: &SampledCurve) -> String {
    let mut out = String::from("t,value\n");
    let step = to_f64(sampled.step());
    for (i, v) in sampled.values().iter().enumerate() {
        let t = step * i as f64;
        if v.is_infinite() {
            let _ = writeln!(out, "{t},inf");
        } else {
            let _ = writeln!(out, "{t},{v}");
        }
    }
    out
}

fn deviation_line(a: &NamedCurve, b: &NamedCurve) -> String {
    let (d, q) = if a.curve.is_finite() {
        (
            horizontal_deviation(&a.curve, &b.curve),
            vertical_deviation(&a.curve, &b.curve),
        )
    } else {
        (Bound::Unbounded, Bound::Unbounded)
    };
    format!(
        "{} vs {}: d_max = {} ms (exact {} s), b_max = {} kb (exact {} b)",
        a.name,
        b.name,
        bound_ms(&d),
        d,
        bound_kilo(&q),
        q
    )
}

/// Writes one `NAME.csv` per curve and `summary.txt` with the deviations of
/// the first curve against each of the others.
pub fn export(
    curves: &[NamedCurve],
    step: &Rational,
    horizon: &Rational,
    dir: &Path,
) -> Result<Vec<String>> {
    let mut written = Vec::new();
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for c in curves {
        let sampled = SampledCurve::sample(&c.curve, step, horizon)?;
        let path = dir.join(format!("{}.csv", c.name));
        std::fs::write(&path, curve_csv(&sampled))
            .with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path.display().to_string());
    }
    let mut summary = String::new();
    if let Some((first, rest)) = curves.split_first() {
        for other in rest {
            let _ = writeln!(summary, "{}", deviation_line(first, other));
        }
        for c in curves {
            let _ = writeln!(summary, "{}: {}", c.name, c.curve);
        }
    }
    let path = dir.join("summary.txt");
    std::fs::write(&path, summary).with_context(|| format!("cannot write {}", path.display()))?;
    written.push(path.display().to_string());
    Ok(written)
}
