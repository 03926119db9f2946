//! Acceptance criteria 1 to 10. Runs as a plain binary under `cargo test`
//! and prints one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use svcurve::bounds::{
    closed_form_link_backlog, closed_form_link_delay, horizontal_deviation, min_capacity,
    vertical_deviation,
};
use svcurve::oracle::{
    check_dominance, grid_convolve, max_sample_gap, random_conforming_arrivals, run_check,
    simulate, simulate_greedy, Violation,
};
use svcurve::rational::{int, parse_rational, ratio, to_f64};
use svcurve::scenario::{
    mns_supported, reproduce_paper_tables, sessions_supported, transmission_delay, OracleCheck,
    PaperParameters, Unit,
};
use svcurve::{
    AnalysisMode, Bound, Curve, DataAmount, NetworkElement, Rational, Scenario, Segment,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn kbps(x: i64) -> Rational {
    int(x * 1000)
}

fn ms(x: i64) -> Rational {
    ratio(x, 1000)
}

fn svcurve(args: &[&str]) -> Result<String, String> {
    let out = ok(Command::new(env!("CARGO_BIN_EXE_svcurve"))
        .args(args)
        .output())?;
    ensure(out.status.success(), || {
        format!("svcurve {args:?} exited with {}", out.status)
    })?;
    ok(String::from_utf8(out.stdout))
}

// ---- 1 ---------------------------------------------------------------------

fn table_iii() -> Outcome {
    let wired = kbps(1200);
    let got = [64, 128, 256].map(|c| mns_supported(&wired, &kbps(c)).unwrap());
    ensure(got == [18, 9, 4], || format!("mns_supported gave {got:?}"))?;
    let tables = ok(reproduce_paper_tables(&PaperParameters::default()))?;
    let rows: Vec<u64> = tables.table3.iter().map(|r| r.mns).collect();
    ensure(rows == [18, 9, 4], || format!("table rows gave {rows:?}"))?;
    Ok(format!("{got:?}"))
}

// ---- 2 ---------------------------------------------------------------------

fn table_ii_sessions() -> Outcome {
    let got = [64, 128, 256].map(|c| sessions_supported(&kbps(c), &kbps(8)).unwrap());
    ensure(got == [8, 16, 32], || {
        format!("sessions_supported gave {got:?}")
    })?;
    let tables = ok(reproduce_paper_tables(&PaperParameters::default()))?;
    let rows: Vec<u64> = tables.table2.iter().map(|r| r.sessions).collect();
    ensure(rows == [8, 16, 32], || format!("table rows gave {rows:?}"))?;
    Ok(format!("{got:?}"))
}

// ---- 3 ---------------------------------------------------------------------

fn shortcut_bounds() -> Outcome {
    let report = ok(ok(PaperParameters::default().scenario(&kbps(64)))?.analyze())?;
    let s = &report.shortcut;
    ensure(s.min_delay == ms(20), || {
        format!("min delay {}", s.min_delay)
    })?;
    ensure(s.max_delay == Bound::Finite(ratio(13, 400)), || {
        format!("max delay {}", s.max_delay)
    })?;
    let t = ok(transmission_delay(&int(8000), &kbps(1200)))?;
    ensure(t == ratio(1, 150), || format!("transmission delay {t}"))?;
    let text = svcurve(&["tables"])?;
    ensure(text.contains("6.67 ms (exact 1/150 s)"), || {
        "tables output lacks '6.67 ms (exact 1/150 s)'".into()
    })?;
    Ok("min 20 ms, max 32.5 ms, L/C 6.67 ms = 1/150 s".into())
}

// ---- 4 ---------------------------------------------------------------------

const REQUIRED_IDS: &[&str] = &[
    "table1.min_delay[128]",
    "table1.min_delay[256]",
    "table1.buffer[64]",
    "table1.buffer[128]",
    "table1.buffer[256]",
    "table2.buffer[64]",
    "table2.buffer[128]",
    "table2.buffer[256]",
    "sec6.max_buffer",
    "eq24.intercept",
    "eq26.intercept",
];

fn json_bound(v: &Value) -> Result<Bound, String> {
    match v.as_str() {
        Some("unbounded") => Ok(Bound::Unbounded),
        Some(s) => ok(parse_rational(s)).map(Bound::Finite),
        None => Err(format!("not an exact value: {v}")),
    }
}

fn discrepancy_ledger() -> Outcome {
    let json: Value = ok(serde_json::from_str(&svcurve(&[
        "tables", "--format", "json",
    ])?))?;
    let entries = json["discrepancies"]
        .as_array()
        .ok_or("no discrepancies array")?;
    let tables = ok(reproduce_paper_tables(&PaperParameters::default()))?;
    let step = ratio(1, 10_000);
    let horizon = ratio(1, 2);
    let mut verified = 0;
    for id in REQUIRED_IDS {
        let entry = entries
            .iter()
            .find(|e| e["id"] == *id)
            .ok_or_else(|| format!("{id} missing"))?;
        let cited = entry["citation"].as_str().unwrap_or_default();
        ensure(!cited.is_empty(), || format!("{id} has no citation"))?;
        let computed = json_bound(&entry["computed"])?;
        let stated = json_bound(&entry["paper_value"])?;
        ensure(computed != stated, || {
            format!("{id}: computed equals stated")
        })?;

        let d = tables
            .discrepancies
            .iter()
            .find(|d| d.id == *id)
            .ok_or_else(|| format!("{id} not in library ledger"))?;
        ensure(d.computed == computed, || {
            format!("{id}: cli {computed} vs library {}", d.computed)
        })?;
        let check = d
            .check
            .as_ref()
            .ok_or_else(|| format!("{id} has no oracle check"))?;
        let expected = to_f64(
            computed
                .finite()
                .ok_or_else(|| format!("{id} computed is unbounded"))?,
        );
        let measured = ok(run_check(check, &step, &horizon))?
            .ok_or_else(|| format!("{id}: oracle measured nothing"))?;
        let tolerance = match (check, d.unit) {
            (OracleCheck::TailIntercept { .. }, _) => 1e-6 * expected.abs().max(1.0),
            (
                OracleCheck::MaxBacklog {
                    envelope,
                    multiplier,
                    ..
                },
                _,
            ) => *multiplier as f64 * to_f64(&(envelope.max_finite_slope() * &step)) + 1e-6,
            (_, Unit::Seconds) => to_f64(&step) + 1e-9,
            (_, Unit::Bits) => 1e-6,
        };
        ensure((measured - expected).abs() <= tolerance, || {
            format!("{id}: oracle {measured} vs computed {expected} (tolerance {tolerance})")
        })?;
        verified += 1;
    }
    Ok(format!(
        "{verified} required entries oracle-verified, {} listed",
        entries.len()
    ))
}

// ---- random curves -----------------------------------------------------------

fn fin(x: Rational) -> DataAmount {
    DataAmount::Finite(x)
}

/// Ultimately affine curve with jumps, flat runs and sometimes an infinite tail.
fn random_curve(rng: &mut ChaCha8Rng) -> Curve {
    let pieces = rng.gen_range(1..=4);
    let mut segments = Vec::new();
    let mut t = int(0);
    let mut left = int(rng.gen_range(0..=3));
    for i in 0..pieces {
        let point = if i == 0 {
            left.clone()
        } else {
            &left + int(rng.gen_range(0..=2))
        };
        let right = &point + int(rng.gen_range(0..=2));
        let slope = ratio(rng.gen_range(0..=4), 2);
        let len = ratio(rng.gen_range(1..=4), 3);
        left = &right + &slope * &len;
        segments.push(Segment::new(t.clone(), fin(point), fin(right), slope));
        t += len;
    }
    if rng.gen_bool(0.3) {
        segments.push(Segment::new(t, fin(left), DataAmount::Infinite, int(0)));
    }
    Curve::new(segments).expect("generator builds valid curves")
}

/// Curve continuous after 0, breakpoints on a 0.1 ms grid, rates in kbps.
fn random_grid_curve(rng: &mut ChaCha8Rng) -> Curve {
    let tick = ratio(1, 10_000);
    let pieces = rng.gen_range(1..=4);
    let mut segments = Vec::new();
    let mut t = int(0);
    let mut level = int(rng.gen_range(0..=50) * 100);
    for _ in 0..pieces {
        let slope = kbps(rng.gen_range(0..=1000));
        let len = &tick * int(rng.gen_range(1..=80));
        segments.push(Segment::affine(t.clone(), level.clone(), slope.clone()));
        level += &slope * &len;
        t += len;
    }
    if rng.gen_bool(0.25) {
        segments.push(Segment::new(t, fin(level), DataAmount::Infinite, int(0)));
    }
    Curve::new(segments).expect("generator builds valid curves")
}

// ---- 5 ---------------------------------------------------------------------

fn algebra_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cases = 1000;
    let id = Curve::delay_impulse(&int(0)).unwrap();
    for case in 0..cases {
        let (f, g, h) = (
            random_curve(&mut rng),
            random_curve(&mut rng),
            random_curve(&mut rng),
        );
        let fail = |law: &str| format!("{law} fails on case {case}: f = {f}, g = {g}, h = {h}");
        ensure(f.convolve(&g) == g.convolve(&f), || fail("commutativity"))?;
        ensure(
            f.convolve(&g).convolve(&h) == f.convolve(&g.convolve(&h)),
            || fail("associativity"),
        )?;
        ensure(f.convolve(&id) == f, || fail("identity"))?;

        let a = ratio(rng.gen_range(0..=6), 4);
        let b = ratio(rng.gen_range(0..=6), 4);
        let da = Curve::delay_impulse(&a).unwrap();
        let db = Curve::delay_impulse(&b).unwrap();
        let dab = Curve::delay_impulse(&(&a + &b)).unwrap();
        ensure(f.convolve(&da) == f.shift(&a).unwrap(), || {
            fail("shift by impulse")
        })?;
        ensure(da.convolve(&db) == dab, || fail("impulse composition"))?;
        ensure(f.convolve(&da).convolve(&db) == f.convolve(&dab), || {
            fail("shift composition")
        })?;

        let fg = f.pointwise_min(&g);
        ensure(
            fg.convolve(&h) == f.convolve(&h).pointwise_min(&g.convolve(&h)),
            || fail("distributivity"),
        )?;
        ensure(fg.convolve(&h).is_below(&g.convolve(&h)), || {
            fail("isotonicity")
        })?;
        ensure(fg.convolve(&h).is_below(&f.convolve(&h)), || {
            fail("isotonicity")
        })?;
    }
    Ok(format!("{cases} triples, 9 laws each"))
}

// ---- 6 ---------------------------------------------------------------------

fn rate_latency_composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases = 1000;
    let draw = |rng: &mut ChaCha8Rng| {
        let rate = ratio(rng.gen_range(1..=2_000_000), rng.gen_range(1..=3));
        let latency = ratio(rng.gen_range(0..=100_000), 1_000_000);
        (rate, latency)
    };
    for case in 0..cases {
        let (r1, t1) = draw(&mut rng);
        let (r2, t2) = draw(&mut rng);
        let lhs = Curve::rate_latency(&r1, &t1)
            .unwrap()
            .convolve(&Curve::rate_latency(&r2, &t2).unwrap());
        let rhs = Curve::rate_latency(&r1.clone().min(r2.clone()), &(&t1 + &t2)).unwrap();
        ensure(lhs == rhs, || {
            format!("case {case}: ({r1}, {t1}) * ({r2}, {t2}) gave {lhs}")
        })?;
    }
    let wireless = Curve::rate_latency(&kbps(64), &ms(20)).unwrap();
    for phi in [ms(0), ms(1), ms(10), ratio(7, 3000)] {
        let router = Curve::rate_latency(&kbps(400), &phi).unwrap();
        let expected = Curve::rate_latency(&kbps(64), &(ms(20) + &phi)).unwrap();
        ensure(wireless.convolve(&router) == expected, || {
            format!("(64 kbps, 20 ms) * (400 kbps, {phi}) failed")
        })?;
    }
    Ok(format!(
        "{cases} random pairs plus (64 kbps, 20 ms) * (400 kbps, phi) for 4 phi"
    ))
}

// ---- 7 ---------------------------------------------------------------------

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let step = ratio(1, 10_000);
    let horizon = ratio(3, 100);
    let cases = 200;
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let f = random_grid_curve(&mut rng);
        let g = random_grid_curve(&mut rng);
        let sampled = ok(grid_convolve(&f, &g, &horizon, &step))?;
        let gap = ok(max_sample_gap(&f.convolve(&g), &sampled))?;
        let slope = f.max_finite_slope().max(g.max_finite_slope());
        let tolerance = to_f64(&(slope * &step)) + 1e-6;
        ensure(gap <= tolerance, || {
            format!("case {case}: gap {gap} > {tolerance} for f = {f}, g = {g}")
        })?;
        worst = worst.max(gap);
    }
    Ok(format!(
        "{cases} pairs at 0.1 ms over 30 ms, largest gap {worst:.3e} b"
    ))
}

// ---- 8 ---------------------------------------------------------------------

fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let rho = rng.gen_range(50..=500);
    let rate = |rng: &mut ChaCha8Rng, hi: i64| kbps(rng.gen_range(rho.max(100)..=hi));
    let delay = |rng: &mut ChaCha8Rng, hi: i64| ratio(rng.gen_range(0..=hi), 10_000);
    let sigma = int(rng.gen_range(0..=100) * 100);
    let peak = rng
        .gen_bool(0.4)
        .then(|| kbps(rho + rng.gen_range(1..=2000)));
    let source = NetworkElement::source(sigma, kbps(rho), peak).unwrap();

    let mut wireless = vec![NetworkElement::wireless_link(rate(rng, 2000)).unwrap()];
    wireless.push(NetworkElement::propagation_delay(delay(rng, 300)).unwrap());
    if rng.gen_bool(0.7) {
        wireless.push(NetworkElement::access_router(rate(rng, 2000), delay(rng, 200)).unwrap());
    }
    if rng.gen_bool(0.3) {
        wireless.push(
            NetworkElement::multiplexer(
                kbps(rng.gen_range(64..=1000)),
                int(rng.gen_range(0..=4000)),
            )
            .unwrap(),
        );
    }
    let mut wired = vec![NetworkElement::wired_link(rate(rng, 10_000)).unwrap()];
    if rng.gen_bool(0.8) {
        wired.push(NetworkElement::propagation_delay(delay(rng, 400)).unwrap());
    }
    Scenario::new(Some(source), wireless, wired).unwrap()
}

fn bound_dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let step = ratio(1, 10_000);
    let cases = 100;
    let mut checks = 0;
    let mut truncated = 0;
    for case in 0..cases {
        let scenario = random_scenario(&mut rng);
        let report = ok(scenario.analyze())?;
        let NetworkElement::SourceEnvelope {
            sigma,
            rho,
            peak_rate,
        } = scenario.source()
        else {
            unreachable!("random scenarios have a source")
        };
        for (name, seg) in [
            ("wireless", &report.wireless),
            ("end-to-end", &report.end_to_end),
        ] {
            let d_max = seg
                .bounds
                .d_max
                .finite()
                .ok_or_else(|| format!("case {case}: {name} d_max unbounded"))?;
            let horizon = ok(parse_rational(&format!(
                "{}/1000",
                (to_f64(d_max) * 2000.0).ceil() as i64 + 20
            )))?;
            let greedy = ok(simulate_greedy(
                &report.envelope,
                seg.curves.lower(),
                seg.curves.upper(),
                &horizon,
                &step,
            ))?;
            let arrivals = ok(random_conforming_arrivals(
                sigma,
                rho,
                peak_rate.as_ref(),
                &step,
                &horizon,
                &mut rng,
            ))?;
            let random = ok(simulate(arrivals, seg.curves.lower(), seg.curves.upper()))?;
            for (kind, trace) in [("greedy", greedy), ("random", random)] {
                let verdict = check_dominance(&trace, &seg.bounds);
                ensure(verdict.passed(), || {
                    format!(
                        "case {case} {name}/{kind}: {}",
                        verdict.violation.as_ref().unwrap()
                    )
                })?;
                checks += 1;
                truncated += usize::from(verdict.truncated);
            }
        }
    }

    let mut control = ok(PaperParameters::default().scenario(&kbps(64)))?;
    control = control.with_mode(AnalysisMode::PerSession);
    let report = ok(control.analyze())?;
    let seg = &report.end_to_end;
    let halved = seg.bounds.with_scaled_d_max(&ratio(1, 2));
    let trace = ok(simulate_greedy(
        &report.envelope,
        seg.curves.lower(),
        seg.curves.upper(),
        &ratio(3, 10),
        &step,
    ))?;
    let verdict = check_dominance(&trace, &halved);
    let witness = match &verdict.violation {
        Some(v @ Violation::DelayAbove { .. }) => v.to_string(),
        other => return Err(format!("halved d_max was not caught: {other:?}")),
    };
    Ok(format!("{cases} scenarios, {checks} traces dominated ({truncated} truncated); control witness: {witness}"))
}

// ---- 9 ---------------------------------------------------------------------

fn random_envelope(rng: &mut ChaCha8Rng) -> (Curve, Rational) {
    let sigma = int(rng.gen_range(0..=20_000));
    let rho = int(rng.gen_range(1_000..=2_000_000));
    let curve = if rng.gen_bool(0.5) {
        let peak = &rho + int(rng.gen_range(1..=4_000_000));
        Curve::peak_rate_envelope(&peak, &sigma, &rho).unwrap()
    } else {
        Curve::token_bucket(&sigma, &rho).unwrap()
    };
    (curve, rho)
}

fn exceeds(b: &Bound, t: &Rational) -> bool {
    b > &Bound::Finite(t.clone())
}

fn c_min_minimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cases = 100;
    for case in 0..cases {
        let (envelope, _) = random_envelope(&mut rng);
        let target = ratio(rng.gen_range(1..=2000), 10_000);
        let c = match ok(min_capacity(&envelope, &target))? {
            Bound::Finite(c) => c,
            Bound::Unbounded => return Err(format!("case {case}: C_min unbounded for {envelope}")),
        };
        let at = horizontal_deviation(&envelope, &Curve::link_rate(&c).unwrap());
        let below = horizontal_deviation(&envelope, &Curve::link_rate(&(&c - int(1))).unwrap());
        ensure(!exceeds(&at, &target), || {
            format!("case {case}: delay {at} at C_min = {c} exceeds {target}")
        })?;
        ensure(exceeds(&below, &target), || {
            format!("case {case}: delay {below} at C_min - 1 meets {target}")
        })?;
    }
    Ok(format!("{cases} (E, T) pairs"))
}

// ---- 10 --------------------------------------------------------------------

fn closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cases = 1000;
    let mut interior = 0;
    for case in 0..cases {
        let sigma = ratio(rng.gen_range(0..=50_000), rng.gen_range(1..=4));
        let rho = int(rng.gen_range(0..=1_000_000));
        let peak = &rho + int(rng.gen_range(1..=2_000_000));
        let capacity = if rng.gen_bool(0.8) {
            // rho <= C < r
            &rho + (&peak - &rho) * ratio(rng.gen_range(0..1000), 1000)
        } else {
            ratio(rng.gen_range(1..=3), 2) * &peak
        };
        if capacity <= int(0) {
            continue;
        }
        interior += usize::from(capacity >= rho && capacity < peak);
        let envelope = Curve::peak_rate_envelope(&peak, &sigma, &rho).unwrap();
        let link = Curve::link_rate(&capacity).unwrap();
        let delay = ok(closed_form_link_delay(&sigma, &rho, &peak, &capacity))?;
        let backlog = ok(closed_form_link_backlog(&sigma, &rho, &peak, &capacity))?;
        let hdev = horizontal_deviation(&envelope, &link);
        let vdev = vertical_deviation(&envelope, &link);
        ensure(delay == hdev, || {
            format!("case {case}: delay {delay} vs deviation {hdev}")
        })?;
        ensure(backlog == vdev, || {
            format!("case {case}: backlog {backlog} vs deviation {vdev}")
        })?;
    }
    Ok(format!("{cases} tuples ({interior} with rho <= C < r)"))
}

// ---- runner ----------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("mobile nodes supported", table_iii),
        ("voice sessions supported", table_ii_sessions),
        ("closed-form delay shortcuts", shortcut_bounds),
        ("discrepancy ledger", discrepancy_ledger),
        ("min-plus algebra laws", algebra_laws),
        ("rate-latency composition", rate_latency_composition),
        ("grid oracle equivalence", oracle_equivalence),
        ("bound dominance", bound_dominance),
        ("minimum capacity", c_min_minimality),
        ("closed-form link bounds", closed_forms),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.2} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.2} s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
