//! Brute-force validation on a time grid.
//!
//! Curves are sampled at `t = i * step`, convolved by exhaustive minimization
//! over every grid split, and pushed through the slowest server a lower
//! service curve allows. Measured delays and backlogs must stay within the
//! analytic bounds. Floating point is fine here: the oracle only has to be
//! independent, not exact.

use std::fmt;

use num_traits::{Signed, ToPrimitive};
use rand::Rng;

use crate::bounds::BoundsReport;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::rational::{format_significant, to_exact_string, to_f64, Bound, DataAmount, Rational};
use crate::scenario::OracleCheck;

/// Values of a cumulative function at `t = i * step` for `i = 0..=horizon/step`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    step: Rational,
    horizon: Rational,
    values: Vec<f64>,
}

fn grid_len(step: &Rational, horizon: &Rational) -> Result<usize> {
    if !step.is_positive() {
        return Err(Error::ParameterDomain {
            name: "step",
            value: to_exact_string(step),
            reason: "must be > 0",
        });
    }
    if horizon.is_negative() {
        return Err(Error::ParameterDomain {
            name: "horizon",
            value: to_exact_string(horizon),
            reason: "must be >= 0",
        });
    }
    let n = (horizon / step)
        .floor()
        .to_integer()
        .to_usize()
        .ok_or(Error::ParameterDomain {
            name: "horizon",
            value: to_exact_string(horizon),
            reason: "too many grid points",
        })?;
    Ok(n + 1)
}

impl SampledCurve {
    pub fn sample(curve: &Curve, step: &Rational, horizon: &Rational) -> Result<Self> {
        let n = grid_len(step, horizon)?;
        let values = (0..n)
            .map(|i| {
                let t = step * Rational::from_integer(i.into());
                curve.evaluate(&t).map(|v| v.to_f64())
            })
            .collect::<Result<_>>()?;
        Ok(SampledCurve {
            step: step.clone(),
            horizon: horizon.clone(),
            values,
        })
    }

    /// Wraps raw samples; `values.len()` must match the grid.
    pub fn from_values(step: &Rational, horizon: &Rational, values: Vec<f64>) -> Result<Self> {
        let n = grid_len(step, horizon)?;
        if values.len() != n {
            return Err(Error::InvalidCurve(format!(
                "expected {n} samples, got {}",
                values.len()
            )));
        }
        if values.windows(2).any(|w| w[1] < w[0]) || values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidCurve(
                "samples must be non-negative and non-decreasing".into(),
            ));
        }
        Ok(SampledCurve {
            step: step.clone(),
            horizon: horizon.clone(),
            values,
        })
    }

    pub fn step(&self) -> &Rational {
        &self.step
    }

    pub fn horizon(&self) -> &Rational {
        &self.horizon
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        to_f64(&self.step) * i as f64
    }

    /// Grid min-plus convolution with another sampling of the same grid.
    pub fn convolve(&self, other: &SampledCurve) -> Result<SampledCurve> {
        if self.step != other.step || self.values.len() != other.values.len() {
            return Err(Error::InvalidCurve(
                "sampled curves live on different grids".into(),
            ));
        }
        Ok(SampledCurve {
            step: self.step.clone(),
            horizon: self.horizon.clone(),
            values: min_plus(&self.values, &other.values),
        })
    }
}

fn min_plus(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len())
        .map(|i| {
            a[..=i]
                .iter()
                .zip(b[..=i].iter().rev())
                .fold(f64::INFINITY, |m, (x, y)| m.min(x + y))
        })
        .collect()
}

/// `out[i] = min_{0 <= j <= i} f(j step) + g((i - j) step)`.
pub fn grid_convolve(
    f: &Curve,
    g: &Curve,
    horizon: &Rational,
    step: &Rational,
) -> Result<SampledCurve> {
    SampledCurve::sample(f, step, horizon)?.convolve(&SampledCurve::sample(g, step, horizon)?)
}

/// Arrivals, departures and what was measured between them.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationTrace {
    pub arrivals: SampledCurve,
    pub departures: SampledCurve,
    /// `A(t) - D(t)` per grid point.
    pub backlog: Vec<f64>,
    /// Virtual delay (seconds) at each grid point where new data arrived;
    /// `None` elsewhere or when departures never catch up within the horizon.
    pub virtual_delay: Vec<Option<f64>>,
    /// The horizon looks too short for steady state: the worst backlog or
    /// delay first shows up in the last quarter of the run, or data that
    /// arrived in the first half never left.
    pub truncated: bool,
}

fn tolerance(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

impl SimulationTrace {
    /// `(grid index, backlog)` of the largest backlog.
    pub fn max_backlog(&self) -> (usize, f64) {
        self.backlog
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (i, b)| if b > best.1 { (i, b) } else { best },
            )
    }

    /// `(grid index, delay)` for every measured virtual delay.
    pub fn delays(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.virtual_delay
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (i, d)))
    }

    pub fn max_delay(&self) -> Option<f64> {
        self.delays().map(|(_, d)| d).reduce(f64::max)
    }

    pub fn min_delay(&self) -> Option<f64> {
        self.delays().map(|(_, d)| d).reduce(f64::min)
    }

    /// Time from the first arrival to the first departure.
    pub fn first_departure_delay(&self) -> Option<f64> {
        let a = self.arrivals.values();
        let d = self.departures.values();
        let first_in = a.iter().position(|&v| v > tolerance(v))?;
        let first_out = d.iter().position(|&v| v > tolerance(v))?;
        Some(self.arrivals.time(first_out) - self.arrivals.time(first_in))
    }
}

/// Pushes `arrivals` through the slowest server with lower service curve
/// `lower`: `D = min(A * lower, A)`.
pub fn simulate(arrivals: SampledCurve, lower: &Curve, upper: &Curve) -> Result<SimulationTrace> {
    if !lower.is_below(upper) {
        return Err(Error::InvalidCurve(
            "lower service curve exceeds the upper one".into(),
        ));
    }
    let service = SampledCurve::sample(lower, arrivals.step(), arrivals.horizon())?;
    let mut departures = arrivals.convolve(&service)?;
    for (d, a) in departures.values.iter_mut().zip(arrivals.values()) {
        *d = d.min(*a);
    }
    let a = arrivals.values();
    let d = departures.values();
    let backlog: Vec<f64> = a.iter().zip(d).map(|(a, d)| a - d).collect();

    let mut virtual_delay = vec![None; a.len()];
    let mut unserved = None;
    let mut k = 0;
    for i in 1..a.len() {
        if a[i] <= a[i - 1] + tolerance(a[i]) {
            continue;
        }
        k = k.max(i);
        let target = a[i] - tolerance(a[i]);
        while k < d.len() && d[k] < target {
            k += 1;
        }
        if k == d.len() {
            unserved = Some(i);
            break;
        }
        virtual_delay[i] = Some(arrivals.time(k - i));
    }
    let mut trace = SimulationTrace {
        arrivals,
        departures,
        backlog,
        virtual_delay,
        truncated: false,
    };
    let last = trace.backlog.len() - 1;
    let late = |i: usize| i > 0 && 4 * i >= 3 * last;
    let (backlog_at, worst_backlog) = trace.max_backlog();
    let delay_at = trace
        .max_delay()
        .and_then(|m| trace.delays().find(|&(_, d)| d == m))
        .map(|(i, _)| i);
    trace.truncated = unserved.is_some_and(|i| 2 * i <= last)
        || (worst_backlog > 0.0 && late(backlog_at))
        || delay_at.is_some_and(late);
    Ok(trace)
}

/// A greedy source emitting exactly its envelope, starting just after 0.
pub fn greedy_arrivals(
    envelope: &Curve,
    step: &Rational,
    horizon: &Rational,
) -> Result<SampledCurve> {
    if !envelope.is_finite() {
        return Err(Error::InvalidCurve(
            "a greedy source needs a finite envelope".into(),
        ));
    }
    let mut arrivals = SampledCurve::sample(envelope, step, horizon)?;
    arrivals.values[0] = 0.0;
    Ok(arrivals)
}

pub fn simulate_greedy(
    envelope: &Curve,
    lower: &Curve,
    upper: &Curve,
    horizon: &Rational,
    step: &Rational,
) -> Result<SimulationTrace> {
    simulate(greedy_arrivals(envelope, step, horizon)?, lower, upper)
}

/// Random arrivals conforming to `min(peak t, sigma + rho t)` on the grid:
/// a token bucket that sometimes drains completely, sometimes idles, and
/// sometimes emits a random part of its tokens.
pub fn random_conforming_arrivals<R: Rng + ?Sized>(
    sigma: &Rational,
    rho: &Rational,
    peak: Option<&Rational>,
    step: &Rational,
    horizon: &Rational,
    rng: &mut R,
) -> Result<SampledCurve> {
    let n = grid_len(step, horizon)?;
    let (sigma, refill) = (to_f64(sigma), to_f64(&(rho * step)));
    let cap = peak.map(|p| to_f64(&(p * step)));
    let mut tokens = sigma;
    let mut total = 0.0;
    let mut values = Vec::with_capacity(n);
    values.push(0.0);
    for _ in 1..n {
        tokens = (tokens + refill).min(sigma.max(refill));
        let mut emit = match rng.gen_range(0..3) {
            0 => tokens,
            1 => 0.0,
            _ => tokens * rng.gen::<f64>(),
        };
        if let Some(cap) = cap {
            emit = emit.min(cap);
        }
        // shave rounding so the process stays strictly inside the envelope
        emit *= 1.0 - 1e-12;
        tokens -= emit;
        total += emit;
        values.push(total);
    }
    SampledCurve::from_values(step, horizon, values)
}

/// What broke a dominance check, at which time.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Backlog {
        time: f64,
        measured: f64,
        bound: f64,
    },
    DelayAbove {
        time: f64,
        measured: f64,
        bound: f64,
    },
    DelayBelow {
        time: f64,
        measured: f64,
        bound: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = |x: f64| format_significant(x, 9);
        match self {
            Violation::Backlog {
                time,
                measured,
                bound,
            } => {
                write!(
                    f,
                    "backlog {} b at t = {} s exceeds b_max = {} b",
                    g(*measured),
                    g(*time),
                    g(*bound)
                )
            }
            Violation::DelayAbove {
                time,
                measured,
                bound,
            } => {
                write!(
                    f,
                    "virtual delay {} s at t = {} s exceeds d_max = {} s",
                    g(*measured),
                    g(*time),
                    g(*bound)
                )
            }
            Violation::DelayBelow {
                time,
                measured,
                bound,
            } => {
                write!(
                    f,
                    "virtual delay {} s at t = {} s is below d_min = {} s",
                    g(*measured),
                    g(*time),
                    g(*bound)
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub violation: Option<Violation>,
    pub max_backlog: f64,
    pub max_delay: Option<f64>,
    pub min_delay: Option<f64>,
    pub truncated: bool,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks measured backlog against `b_max` (plus one step of arrivals) and
/// every measured virtual delay against `[d_min - step, d_max + step]`.
/// Unbounded bounds are never violated.
pub fn check_dominance(trace: &SimulationTrace, report: &BoundsReport) -> Verdict {
    let step = to_f64(trace.arrivals.step());
    let a = trace.arrivals.values();
    let max_increment = a.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let (backlog_at, max_backlog) = trace.max_backlog();

    let mut violation = None;
    if let Bound::Finite(b) = &report.b_max {
        let bound = to_f64(b);
        if max_backlog > bound + max_increment + 1e-6 {
            violation = Some(Violation::Backlog {
                time: trace.arrivals.time(backlog_at),
                measured: max_backlog,
                bound,
            });
        }
    }
    let upper = report.d_max.finite().map(to_f64);
    let lower = report.d_min.finite().map(to_f64);
    for (i, d) in trace.delays() {
        if violation.is_some() {
            break;
        }
        let time = trace.arrivals.time(i);
        if let Some(bound) = upper.filter(|u| d > u + step + 1e-12) {
            violation = Some(Violation::DelayAbove {
                time,
                measured: d,
                bound,
            });
        } else if let Some(bound) = lower.filter(|l| d < l - step - 1e-12) {
            violation = Some(Violation::DelayBelow {
                time,
                measured: d,
                bound,
            });
        }
    }
    Verdict {
        violation,
        max_backlog,
        max_delay: trace.max_delay(),
        min_delay: trace.min_delay(),
        truncated: trace.truncated,
    }
}

/// Runs the experiment behind a discrepancy entry, returning the measured
/// value in seconds or bits. `None` when nothing could be measured.
pub fn run_check(check: &OracleCheck, step: &Rational, horizon: &Rational) -> Result<Option<f64>> {
    Ok(match check {
        OracleCheck::MaxDelay { envelope, service } => {
            simulate_greedy(envelope, service, service, horizon, step)?.max_delay()
        }
        OracleCheck::MinDelay { envelope, upper } => {
            simulate_greedy(envelope, upper, upper, horizon, step)?.first_departure_delay()
        }
        OracleCheck::MaxBacklog {
            envelope,
            service,
            multiplier,
        } => {
            let trace = simulate_greedy(envelope, service, service, horizon, step)?;
            Some(trace.max_backlog().1 * *multiplier as f64)
        }
        OracleCheck::TailIntercept { factors } => {
            let mut sampled = factors
                .iter()
                .map(|f| SampledCurve::sample(f, step, horizon));
            let first = sampled.next().ok_or(Error::EmptyTandem)??;
            let product = sampled.try_fold(first, |acc, f| acc.convolve(&f?))?;
            let v = product.values();
            if v.len() < 2 {
                return Ok(None);
            }
            let n = v.len() - 1;
            let slope = (v[n] - v[n - 1]) / to_f64(step);
            Some(v[n] - slope * product.time(n))
        }
    })
}

/// Largest `|algebraic - grid|` over the grid, ignoring points where either
/// side is infinite (they must agree on which ones are).
pub fn max_sample_gap(curve: &Curve, sampled: &SampledCurve) -> Result<f64> {
    let mut gap: f64 = 0.0;
    for (i, &s) in sampled.values().iter().enumerate() {
        let t = sampled.step() * Rational::from_integer(i.into());
        match curve.evaluate(&t)? {
            DataAmount::Infinite if s.is_infinite() => {}
            DataAmount::Finite(v) if s.is_finite() => gap = gap.max((to_f64(&v) - s).abs()),
            _ => return Ok(f64::INFINITY),
        }
    }
    Ok(gap)
}

/// Convenience: is `report` dominated by a greedy simulation of `envelope`?
pub fn verify_greedy(
    envelope: &Curve,
    lower: &Curve,
    upper: &Curve,
    report: &BoundsReport,
    horizon: &Rational,
    step: &Rational,
) -> Result<Verdict> {
    let trace = simulate_greedy(envelope, lower, upper, horizon, step)?;
    Ok(check_dominance(&trace, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundsReport;
    use crate::rational::{int, ratio};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kb(x: i64) -> Rational {
        int(x * 1000)
    }
    fn ms(x: i64) -> Rational {
        ratio(x, 1000)
    }
    fn tenth_ms() -> Rational {
        ratio(1, 10_000)
    }

    #[test]
    fn grid_length() {
        let s = SampledCurve::sample(&Curve::link_rate(&int(1)).unwrap(), &ms(1), &ms(10)).unwrap();
        assert_eq!(s.len(), 11);
        let single =
            SampledCurve::sample(&Curve::link_rate(&int(1)).unwrap(), &ms(5), &ms(1)).unwrap();
        assert_eq!(single.len(), 1);
        assert!(SampledCurve::sample(&Curve::zero(), &int(0), &ms(1)).is_err());
    }

    #[test]
    fn identity_convolution_is_exact() {
        let f = Curve::token_bucket(&kb(5), &kb(200)).unwrap();
        let id = Curve::delay_impulse(&int(0)).unwrap();
        let out = grid_convolve(&f, &id, &ms(100), &tenth_ms()).unwrap();
        assert_eq!(
            out,
            SampledCurve::sample(&f, &tenth_ms(), &ms(100)).unwrap()
        );
    }

    #[test]
    fn token_buckets_convolve_to_token_bucket() {
        let f = Curve::token_bucket(&kb(5), &kb(200)).unwrap();
        let g = Curve::token_bucket(&kb(3), &kb(100)).unwrap();
        let out = grid_convolve(&f, &g, &ms(100), &tenth_ms()).unwrap();
        let expected = Curve::token_bucket(&kb(8), &kb(100)).unwrap();
        assert!(max_sample_gap(&expected, &out).unwrap() <= 200_000.0 * 1e-4 + 1e-6);
        assert!(max_sample_gap(&f.convolve(&g), &out).unwrap() <= 200_000.0 * 1e-4 + 1e-6);
    }

    #[test]
    fn composition_example_matches_grid() {
        let s = Curve::link_rate(&kb(64)).unwrap();
        let d = Curve::delay_impulse(&ms(20)).unwrap();
        let out = grid_convolve(&s, &d, &ms(200), &tenth_ms()).unwrap();
        let exact = Curve::rate_latency(&kb(64), &ms(20)).unwrap();
        assert!(max_sample_gap(&exact, &out).unwrap() < 1e-6);
    }

    #[test]
    fn greedy_backlog_matches_vertical_deviation() {
        let e = Curve::token_bucket(&kb(5), &kb(200)).unwrap();
        let s = Curve::rate_latency(&kb(400), &ms(10)).unwrap();
        let trace = simulate_greedy(&e, &s, &s, &int(1), &tenth_ms()).unwrap();
        let (_, b) = trace.max_backlog();
        assert!((b - 7000.0).abs() <= 400_000.0 * 1e-4 + 1e-6, "backlog {b}");
        let report = BoundsReport::compute(&e, &s, &s, None).unwrap();
        assert!(check_dominance(&trace, &report).passed());
        assert!(!trace.truncated);
        assert!(trace
            .departures
            .values()
            .iter()
            .zip(trace.arrivals.values())
            .all(|(d, a)| d <= a));
    }

    #[test]
    fn greedy_delay_matches_horizontal_deviation() {
        let e = Curve::token_bucket(&kb(5), &kb(200)).unwrap();
        let s = Curve::rate_latency(&kb(400), &ms(20)).unwrap();
        let trace = simulate_greedy(&e, &s, &s, &int(1), &tenth_ms()).unwrap();
        let d = trace.max_delay().unwrap();
        assert!((d - 0.0325).abs() <= 1e-4 + 1e-9, "delay {d}");
        assert!((trace.first_departure_delay().unwrap() - 0.02).abs() < 1e-9);
    }

    #[test]
    fn fast_server_gives_zero_backlog_and_delay() {
        let e = Curve::link_rate(&kb(10)).unwrap();
        let s = Curve::link_rate(&kb(100)).unwrap();
        let trace = simulate_greedy(&e, &s, &s, &ms(100), &tenth_ms()).unwrap();
        assert!(trace.max_backlog().1 < 1e-9);
        assert_eq!(trace.max_delay(), Some(0.0));
    }

    #[test]
    fn halved_bound_fails_with_witness() {
        let e = Curve::token_bucket(&kb(5), &kb(200)).unwrap();
        let s = Curve::rate_latency(&kb(400), &ms(20)).unwrap();
        let report = BoundsReport::compute(&e, &s, &s, None).unwrap();
        let trace = simulate_greedy(&e, &s, &s, &int(1), &tenth_ms()).unwrap();
        assert!(check_dominance(&trace, &report).passed());
        let verdict = check_dominance(&trace, &report.with_scaled_d_max(&ratio(1, 2)));
        assert!(
            matches!(verdict.violation, Some(Violation::DelayAbove { .. })),
            "{verdict:?}"
        );
    }

    #[test]
    fn zero_traffic_passes() {
        let s = Curve::rate_latency(&kb(400), &ms(20)).unwrap();
        let report = BoundsReport::compute(&Curve::zero(), &s, &s, None).unwrap();
        let verdict =
            verify_greedy(&Curve::zero(), &s, &s, &report, &ms(100), &tenth_ms()).unwrap();
        assert!(verdict.passed());
        assert_eq!(verdict.max_delay, None);
    }

    #[test]
    fn short_horizon_is_truncated() {
        let e = Curve::token_bucket(&kb(5), &kb(200)).unwrap();
        let s = Curve::rate_latency(&kb(400), &ms(20)).unwrap();
        let trace = simulate_greedy(&e, &s, &s, &ms(1), &tenth_ms()).unwrap();
        assert!(trace.truncated);
        let report = BoundsReport::compute(&e, &s, &s, None).unwrap();
        assert!(check_dominance(&trace, &report).passed());
    }

    #[test]
    fn random_arrivals_conform_and_are_dominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (sigma, rho, peak) = (kb(5), kb(200), kb(400));
        let e = Curve::peak_rate_envelope(&peak, &sigma, &rho).unwrap();
        let s = Curve::rate_latency(&kb(300), &ms(15)).unwrap();
        let report = BoundsReport::compute(&e, &s, &s, None).unwrap();
        for _ in 0..5 {
            let a = random_conforming_arrivals(
                &sigma,
                &rho,
                Some(&peak),
                &tenth_ms(),
                &ms(300),
                &mut rng,
            )
            .unwrap();
            let v = a.values();
            for i in (0..v.len()).step_by(37) {
                for j in (i..v.len()).step_by(53) {
                    let allowed = e
                        .evaluate(&(tenth_ms() * int((j - i) as i64)))
                        .unwrap()
                        .to_f64();
                    assert!(v[j] - v[i] <= allowed + 1e-6);
                }
            }
            let trace = simulate(a, &s, &s).unwrap();
            assert!(check_dominance(&trace, &report).passed());
        }
    }

    #[test]
    fn refinement_does_not_widen_the_backlog_gap() {
        let e = Curve::token_bucket(&kb(5), &kb(200)).unwrap();
        let s = Curve::rate_latency(&kb(400), &ms(10)).unwrap();
        let gaps: Vec<f64> = [ratio(4, 10_000), ratio(2, 10_000), ratio(1, 10_000)]
            .iter()
            .map(|step| {
                let trace = simulate_greedy(&e, &s, &s, &ms(200), step).unwrap();
                (7000.0 - trace.max_backlog().1).abs()
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{gaps:?}");
    }

    #[test]
    fn intercept_check() {
        let check = OracleCheck::TailIntercept {
            factors: vec![
                Curve::link_rate(&kb(64)).unwrap(),
                Curve::delay_impulse(&ms(20)).unwrap(),
            ],
        };
        let v = run_check(&check, &tenth_ms(), &ms(100)).unwrap().unwrap();
        assert!((v + 1280.0).abs() < 1e-6, "{v}");
    }
}
