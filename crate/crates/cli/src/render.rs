//! Human, CSV and JSON renderings of reports.
//!
//! Human output uses 6 significant figures in ms / kb / kbps. CSV carries a
//! decimal `value` column (`inf` when unbounded) next to an `exact` column.
//! JSON carries exact strings only: terminating decimals, `p/q` fractions,
//! `"inf"` for infinite curve values and `"unbounded"` for divergent bounds.

use std::fmt::Write as _;

use serde_json::{json, Value};
use svcurve::rational::{format_significant, to_exact_string, to_f64};
use svcurve::scenario::{
    Discrepancy, PaperTables, SegmentReport, SegmentSummary, ShortcutBounds, Unit,
};
use svcurve::{AnalysisReport, Bound, BoundsReport, Curve, DataAmount, Rational};

pub const SIG_FIGS: usize = 6;

fn scaled(v: &Rational, factor: f64, digits: usize) -> String {
    format_significant(to_f64(v) * factor, digits)
}

pub fn ms(v: &Rational) -> String {
    scaled(v, 1e3, SIG_FIGS)
}

pub fn kilo(v: &Rational) -> String {
    scaled(v, 1e-3, SIG_FIGS)
}

pub fn bound_ms(b: &Bound) -> String {
    b.finite().map_or_else(|| "unbounded".into(), ms)
}

pub fn bound_kilo(b: &Bound) -> String {
    b.finite().map_or_else(|| "unbounded".into(), kilo)
}

fn opt_kbps(v: Option<&Rational>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{} kbps", kilo(v)))
}

fn with_unit(b: &Bound, unit: Unit) -> String {
    match (b, unit) {
        (Bound::Unbounded, _) => "unbounded".into(),
        (Bound::Finite(v), Unit::Seconds) => format!("{} ms", ms(v)),
        (Bound::Finite(v), Unit::Bits) => format!("{} kb", kilo(v)),
    }
}

fn exact(b: &Bound) -> String {
    b.to_string()
}

fn decimal(b: &Bound) -> String {
    match b {
        Bound::Finite(v) => to_f64(v).to_string(),
        Bound::Unbounded => "inf".into(),
    }
}

fn amount(a: &DataAmount) -> String {
    a.to_string()
}

pub fn curve_json(c: &Curve) -> Value {
    Value::Array(
        c.segments()
            .iter()
            .map(|s| {
                json!({
                    "start": to_exact_string(s.start()),
                    "value": amount(s.value()),
                    "right": amount(s.right_limit()),
                    "slope": to_exact_string(s.slope()),
                })
            })
            .collect(),
    )
}

pub fn bounds_json(b: &BoundsReport) -> Value {
    json!({
        "d_min_s": exact(&b.d_min),
        "d_max_s": exact(&b.d_max),
        "b_max_bits": exact(&b.b_max),
        "c_min_bps": b.c_min.as_ref().map(exact),
    })
}

fn summary_json(s: &SegmentSummary) -> Value {
    json!({
        "propagation_s": to_exact_string(&s.propagation),
        "processing_s": to_exact_string(&s.processing),
        "min_rate_bps": s.min_rate.as_ref().map(to_exact_string),
        "router_rate_bps": s.router_rate.as_ref().map(to_exact_string),
    })
}

fn shortcut_json(s: &ShortcutBounds) -> Value {
    json!({
        "min_delay_s": to_exact_string(&s.min_delay),
        "max_delay_s": exact(&s.max_delay),
        "max_buffer_bits": to_exact_string(&s.max_buffer),
    })
}

pub fn discrepancy_json(d: &Discrepancy) -> Value {
    json!({
        "id": d.id,
        "quantity": d.quantity,
        "computed": exact(&d.computed),
        "paper_value": exact(&d.paper_value),
        "unit": d.unit.to_string(),
        "citation": d.citation,
    })
}

fn segments(r: &AnalysisReport) -> [(&'static str, &SegmentReport); 3] {
    [
        ("wireless", &r.wireless),
        ("wired", &r.wired),
        ("end_to_end", &r.end_to_end),
    ]
}

pub fn analysis_json(r: &AnalysisReport) -> Value {
    let segs: Vec<Value> = segments(r)
        .iter()
        .map(|(name, s)| {
            json!({
                "name": name,
                "summary": summary_json(&s.summary),
                "lower": curve_json(s.curves.lower()),
                "upper": curve_json(s.curves.upper()),
                "bounds": bounds_json(&s.bounds),
            })
        })
        .collect();
    json!({
        "mode": r.mode.to_string(),
        "envelope": curve_json(&r.envelope),
        "segments": segs,
        "shortcut": shortcut_json(&r.shortcut),
        "sessions_supported": r.sessions_supported,
        "mns_supported": r.mns_supported,
        "total_buffer_bits": r.total_buffer.as_ref().map(exact),
        "discrepancies": r.discrepancies.iter().map(discrepancy_json).collect::<Vec<_>>(),
    })
}

fn bounds_row(out: &mut String, name: &str, b: &BoundsReport) {
    let c_min = b.c_min.as_ref().map_or_else(|| "-".into(), bound_kilo);
    let _ = writeln!(
        out,
        "{name:<12} {:>12} {:>12} {:>12} {:>13}",
        bound_ms(&b.d_min),
        bound_ms(&b.d_max),
        bound_kilo(&b.b_max),
        c_min
    );
}

fn bounds_header(out: &mut String) {
    let _ = writeln!(
        out,
        "{:<12} {:>12} {:>12} {:>12} {:>13}",
        "segment", "d_min (ms)", "d_max (ms)", "b_max (kb)", "c_min (kbps)"
    );
}

fn discrepancy_line(d: &Discrepancy, label: &str) -> String {
    format!(
        "  {:<24} {}: computed {}, {label} {} [{}]",
        d.id,
        d.quantity,
        with_unit(&d.computed, d.unit),
        with_unit(&d.paper_value, d.unit),
        d.citation
    )
}

pub fn analysis_human(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "analysis mode: {}", r.mode);
    let _ = writeln!(out, "envelope: {}", r.envelope);
    let _ = writeln!(out);
    bounds_header(&mut out);
    for (name, s) in segments(r) {
        bounds_row(&mut out, &name.replace('_', "-"), &s.bounds);
    }
    for (name, s) in segments(r) {
        let sum = &s.summary;
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{}: theta = {} ms, phi = {} ms, r = {}, p = {}",
            name.replace('_', "-"),
            ms(&sum.propagation),
            ms(&sum.processing),
            opt_kbps(sum.min_rate.as_ref()),
            opt_kbps(sum.router_rate.as_ref()),
        );
        let _ = writeln!(out, "  lower service curve: {}", s.curves.lower());
        let _ = writeln!(out, "  upper service curve: {}", s.curves.upper());
    }
    let sc = &r.shortcut;
    let _ = writeln!(out);
    let _ = writeln!(out, "shortcut formulas (wireless segment):");
    let _ = writeln!(
        out,
        "  minimum delay   theta             {} ms",
        ms(&sc.min_delay)
    );
    let _ = writeln!(
        out,
        "  maximum delay   theta + sigma/p   {}",
        with_unit(&sc.max_delay, Unit::Seconds)
    );
    let _ = writeln!(
        out,
        "  maximum buffer  sigma + rho theta {} kb",
        kilo(&sc.max_buffer)
    );
    let _ = writeln!(out);
    let count = |n: Option<u64>| n.map_or_else(|| "-".into(), |n| n.to_string());
    let _ = writeln!(out, "sessions supported: {}", count(r.sessions_supported));
    let _ = writeln!(out, "mobile nodes supported: {}", count(r.mns_supported));
    if let Some(total) = &r.total_buffer {
        let _ = writeln!(
            out,
            "buffer for all sessions: {}",
            with_unit(total, Unit::Bits)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "discrepancies (shortcut formula vs exact bound):");
    if r.discrepancies.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for d in &r.discrepancies {
        let _ = writeln!(out, "{}", discrepancy_line(d, "formula"));
    }
    out
}

fn csv_row(out: &mut String, section: &str, quantity: &str, unit: &str, b: &Bound) {
    let _ = writeln!(
        out,
        "{section},{quantity},{unit},{},{}",
        decimal(b),
        csv_exact(b)
    );
}

fn csv_exact(b: &Bound) -> String {
    match b {
        Bound::Finite(v) => to_exact_string(v),
        Bound::Unbounded => "inf".into(),
    }
}

fn csv_bounds(out: &mut String, section: &str, b: &BoundsReport) {
    csv_row(out, section, "d_min", "s", &b.d_min);
    csv_row(out, section, "d_max", "s", &b.d_max);
    csv_row(out, section, "b_max", "b", &b.b_max);
    if let Some(c) = &b.c_min {
        csv_row(out, section, "c_min", "b/s", c);
    }
}

pub const CSV_HEADER: &str = "section,quantity,unit,value,exact";

pub fn analysis_csv(r: &AnalysisReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for (name, s) in segments(r) {
        csv_bounds(&mut out, name, &s.bounds);
        let sum = &s.summary;
        csv_row(
            &mut out,
            name,
            "theta",
            "s",
            &Bound::Finite(sum.propagation.clone()),
        );
        csv_row(
            &mut out,
            name,
            "phi",
            "s",
            &Bound::Finite(sum.processing.clone()),
        );
    }
    let sc = &r.shortcut;
    csv_row(
        &mut out,
        "shortcut",
        "min_delay",
        "s",
        &Bound::Finite(sc.min_delay.clone()),
    );
    csv_row(&mut out, "shortcut", "max_delay", "s", &sc.max_delay);
    csv_row(
        &mut out,
        "shortcut",
        "max_buffer",
        "b",
        &Bound::Finite(sc.max_buffer.clone()),
    );
    let count = |n: u64| Bound::Finite(Rational::from_integer(n.into()));
    if let Some(n) = r.sessions_supported {
        csv_row(
            &mut out,
            "capacity",
            "sessions_supported",
            "count",
            &count(n),
        );
    }
    if let Some(n) = r.mns_supported {
        csv_row(&mut out, "capacity", "mns_supported", "count", &count(n));
    }
    if let Some(t) = &r.total_buffer {
        csv_row(&mut out, "capacity", "total_buffer", "b", t);
    }
    for d in &r.discrepancies {
        csv_row(
            &mut out,
            "discrepancy",
            &format!("{}.computed", d.id),
            &d.unit.to_string(),
            &d.computed,
        );
        csv_row(
            &mut out,
            "discrepancy",
            &format!("{}.stated", d.id),
            &d.unit.to_string(),
            &d.paper_value,
        );
    }
    out
}

pub fn bounds_human(b: &BoundsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "d_min = {}", with_unit(&b.d_min, Unit::Seconds));
    let _ = writeln!(out, "d_max = {}", with_unit(&b.d_max, Unit::Seconds));
    let _ = writeln!(out, "b_max = {}", with_unit(&b.b_max, Unit::Bits));
    if let Some(c) = &b.c_min {
        let _ = writeln!(
            out,
            "c_min = {}",
            c.finite()
                .map_or_else(|| "unbounded".into(), |v| format!("{} kbps", kilo(v)))
        );
    }
    out
}

pub fn bounds_csv(b: &BoundsReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    csv_bounds(&mut out, "bounds", b);
    out
}

fn table_group(id: &str) -> &'static str {
    match id.split('.').next() {
        Some("table1") => "Table I",
        Some("table2") => "Table II",
        Some("table3") => "Table III",
        _ => "Worked example",
    }
}

pub const TABLE_GROUPS: [&str; 4] = ["Table I", "Table II", "Table III", "Worked example"];

pub fn tables_human(t: &PaperTables) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Table I: delay and buffer requirement");
    let _ = writeln!(
        out,
        "{:>16} {:>15} {:>15} {:>12} {:>22}",
        "wireless (kbps)", "min delay (ms)", "max delay (ms)", "buffer (kb)", "exact d_max (ms)"
    );
    for r in &t.table1 {
        let _ = writeln!(
            out,
            "{:>16} {:>15} {:>15} {:>12} {:>22}",
            kilo(&r.wireless_capacity),
            ms(&r.min_delay),
            bound_ms(&r.max_delay),
            kilo(&r.buffer),
            bound_ms(&r.exact_max_delay)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "Table II: delay for voice data (per session)");
    let _ = writeln!(
        out,
        "{:>16} {:>15} {:>20} {:>12} {:>9}",
        "wireless (kbps)", "delay (ms)", "buffer/session (kb)", "buffer (kb)", "sessions"
    );
    for r in &t.table2 {
        let _ = writeln!(
            out,
            "{:>16} {:>15} {:>20} {:>12} {:>9}",
            kilo(&r.wireless_capacity),
            bound_ms(&r.delay),
            bound_kilo(&r.per_session_buffer),
            bound_kilo(&r.buffer),
            r.sessions
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "Table III: mobile nodes supported");
    let _ = writeln!(
        out,
        "{:>16} {:>6} {:>9}",
        "wireless (kbps)", "MNs", "sessions"
    );
    for r in &t.table3 {
        let _ = writeln!(
            out,
            "{:>16} {:>6} {:>9}",
            kilo(&r.wireless_capacity),
            r.mns,
            r.sessions
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "transmission delay L_max / C = {} ms (exact {} s)",
        scaled(&t.transmission_delay, 1e3, 3),
        to_exact_string(&t.transmission_delay)
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "Discrepancies (stated value not reproducible from the stated inputs)"
    );
    for group in TABLE_GROUPS {
        let _ = writeln!(out, "{group}:");
        let entries: Vec<_> = t
            .discrepancies
            .iter()
            .filter(|d| table_group(&d.id) == group)
            .collect();
        if entries.is_empty() {
            let _ = writeln!(out, "  (none)");
        }
        for d in entries {
            let _ = writeln!(out, "{}", discrepancy_line(d, "stated"));
        }
    }
    out
}

pub fn tables_csv(t: &PaperTables) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in &t.table1 {
        let s = format!("table1[{}]", kilo(&r.wireless_capacity));
        csv_row(
            &mut out,
            &s,
            "min_delay",
            "s",
            &Bound::Finite(r.min_delay.clone()),
        );
        csv_row(&mut out, &s, "max_delay", "s", &r.max_delay);
        csv_row(
            &mut out,
            &s,
            "buffer",
            "b",
            &Bound::Finite(r.buffer.clone()),
        );
        csv_row(&mut out, &s, "exact_max_delay", "s", &r.exact_max_delay);
    }
    for r in &t.table2 {
        let s = format!("table2[{}]", kilo(&r.wireless_capacity));
        csv_row(&mut out, &s, "delay", "s", &r.delay);
        csv_row(
            &mut out,
            &s,
            "per_session_buffer",
            "b",
            &r.per_session_buffer,
        );
        csv_row(&mut out, &s, "buffer", "b", &r.buffer);
        csv_row(
            &mut out,
            &s,
            "sessions",
            "count",
            &Bound::Finite(Rational::from_integer(r.sessions.into())),
        );
    }
    for r in &t.table3 {
        let s = format!("table3[{}]", kilo(&r.wireless_capacity));
        csv_row(
            &mut out,
            &s,
            "mns",
            "count",
            &Bound::Finite(Rational::from_integer(r.mns.into())),
        );
        csv_row(
            &mut out,
            &s,
            "sessions",
            "count",
            &Bound::Finite(Rational::from_integer(r.sessions.into())),
        );
    }
    csv_row(
        &mut out,
        "example",
        "transmission_delay",
        "s",
        &Bound::Finite(t.transmission_delay.clone()),
    );
    for d in &t.discrepancies {
        csv_row(
            &mut out,
            "discrepancy",
            &format!("{}.computed", d.id),
            &d.unit.to_string(),
            &d.computed,
        );
        csv_row(
            &mut out,
            "discrepancy",
            &format!("{}.stated", d.id),
            &d.unit.to_string(),
            &d.paper_value,
        );
    }
    out
}

pub fn tables_json(t: &PaperTables) -> Value {
    let b = |v: &Rational| to_exact_string(v);
    json!({
        "table1": t.table1.iter().map(|r| json!({
            "wireless_bps": b(&r.wireless_capacity),
            "min_delay_s": b(&r.min_delay),
            "max_delay_s": exact(&r.max_delay),
            "buffer_bits": b(&r.buffer),
            "exact_max_delay_s": exact(&r.exact_max_delay),
        })).collect::<Vec<_>>(),
        "table2": t.table2.iter().map(|r| json!({
            "wireless_bps": b(&r.wireless_capacity),
            "delay_s": exact(&r.delay),
            "per_session_buffer_bits": exact(&r.per_session_buffer),
            "buffer_bits": exact(&r.buffer),
            "sessions": r.sessions,
        })).collect::<Vec<_>>(),
        "table3": t.table3.iter().map(|r| json!({
            "wireless_bps": b(&r.wireless_capacity),
            "mns": r.mns,
            "sessions": r.sessions,
        })).collect::<Vec<_>>(),
        "transmission_delay_s": b(&t.transmission_delay),
        "discrepancies": t.discrepancies.iter().map(discrepancy_json).collect::<Vec<_>>(),
    })
}
