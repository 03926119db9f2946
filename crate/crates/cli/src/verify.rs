//! `svcurve verify`: greedy and random-trace simulations against the bounds.

use std::fmt::Write as _;

use anyhow::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svcurve::oracle::{
    check_dominance, random_conforming_arrivals, simulate, simulate_greedy, Verdict,
};
use svcurve::rational::format_significant;
use svcurve::scenario::SegmentReport;
use svcurve::{AnalysisMode, AnalysisReport, BoundsReport, NetworkElement, Rational, Scenario};

use crate::render::{bound_kilo, bound_ms};

pub struct Options {
    pub step: Rational,
    pub horizon: Rational,
    pub seed: u64,
    pub traces: usize,
    /// Multiplies every d_max before checking (negative control).
    pub corrupt_dmax_factor: Option<Rational>,
}

pub struct CheckResult {
    pub name: String,
    pub bounds: BoundsReport,
    pub verdict: Verdict,
}

/// Token-bucket parameters `(sigma, rho, peak)` of the analyzed envelope.
fn envelope_parameters(scenario: &Scenario) -> (Rational, Rational, Option<Rational>) {
    match (scenario.mode(), scenario.session(), scenario.source()) {
        (AnalysisMode::PerSession, Some(s), _) => (s.frame_size().clone(), s.rate().clone(), None),
        (
            _,
            _,
            NetworkElement::SourceEnvelope {
                sigma,
                rho,
                peak_rate,
            },
        ) => (sigma.clone(), rho.clone(), peak_rate.clone()),
        _ => unreachable!("scenario source is always an envelope"),
    }
}

pub fn run(
    scenario: &Scenario,
    report: &AnalysisReport,
    opts: &Options,
) -> Result<Vec<CheckResult>> {
    let bounds_of = |s: &SegmentReport| match &opts.corrupt_dmax_factor {
        Some(f) => s.bounds.with_scaled_d_max(f),
        None => s.bounds.clone(),
    };
    let mut results = Vec::new();
    for (name, seg) in [
        ("wireless", &report.wireless),
        ("wired", &report.wired),
        ("end-to-end", &report.end_to_end),
    ] {
        let bounds = bounds_of(seg);
        let trace = simulate_greedy(
            &report.envelope,
            seg.curves.lower(),
            seg.curves.upper(),
            &opts.horizon,
            &opts.step,
        )?;
        let verdict = check_dominance(&trace, &bounds);
        results.push(CheckResult {
            name: format!("{name}/greedy"),
            bounds,
            verdict,
        });
    }

    let (sigma, rho, peak) = envelope_parameters(scenario);
    let seg = &report.end_to_end;
    let bounds = bounds_of(seg);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for k in 0..opts.traces {
        let arrivals = random_conforming_arrivals(
            &sigma,
            &rho,
            peak.as_ref(),
            &opts.step,
            &opts.horizon,
            &mut rng,
        )?;
        let trace = simulate(arrivals, seg.curves.lower(), seg.curves.upper())?;
        let verdict = check_dominance(&trace, &bounds);
        results.push(CheckResult {
            name: format!("end-to-end/random#{k}"),
            bounds: bounds.clone(),
            verdict,
        });
    }
    Ok(results)
}

fn with_unit(value: String, unit: &str) -> String {
    if value == "unbounded" {
        value
    } else {
        format!("{value} {unit}")
    }
}

fn seconds(v: Option<f64>) -> String {
    v.map_or_else(
        || "-".into(),
        |v| format!("{} ms", format_significant(v * 1e3, 6)),
    )
}

pub fn render(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        let v = &r.verdict;
        let _ = write!(
            out,
            "{} {:<22} max delay {} (d_max {}), max backlog {} kb (b_max {})",
            if v.passed() { "PASS" } else { "FAIL" },
            r.name,
            seconds(v.max_delay),
            with_unit(bound_ms(&r.bounds.d_max), "ms"),
            format_significant(v.max_backlog / 1e3, 6),
            with_unit(bound_kilo(&r.bounds.b_max), "kb"),
        );
        if v.truncated {
            out.push_str(" [truncated]");
        }
        out.push('\n');
        if let Some(w) = &v.violation {
            let _ = writeln!(out, "     witness: {w}");
        }
    }
    let failed = results.iter().filter(|r| !r.verdict.passed()).count();
    if failed == 0 {
        let _ = writeln!(out, "verification passed: {} checks", results.len());
    } else {
        let _ = writeln!(
            out,
            "verification FAILED: {failed} of {} checks",
            results.len()
        );
    }
    out
}
