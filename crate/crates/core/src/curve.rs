//! Piecewise-linear, wide-sense-increasing curves on `t >= 0` and their
//! min-plus algebra.
//!
//! A [`Curve`] is a finite list of [`Segment`]s. Segment `i` owns the point
//! `start_i` (where the curve takes `value`) and the open interval up to the
//! next segment's start, on which the curve is `right + slope * (t - start_i)`.
//! Keeping the point value separate from the right limit lets the same type
//! describe right-continuous envelopes (a token bucket jumps to `sigma` at 0)
//! and left-continuous impulses (`delta_d` is still 0 at `d`, `+inf` after).
//!
//! Every public operation returns a canonical curve: adjacent segments that
//! would describe the same affine piece are merged, so structural equality is
//! functional equality.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{to_exact_string, DataAmount, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    start: Rational,
    value: DataAmount,
    right: DataAmount,
    slope: Rational,
}

impl Segment {
    pub fn new(start: Rational, value: DataAmount, right: DataAmount, slope: Rational) -> Self {
        Segment {
            start,
            value,
            right,
            slope,
        }
    }

    /// Segment that is continuous at its start.
    pub fn affine(start: Rational, value: Rational, slope: Rational) -> Self {
        Segment {
            start,
            value: DataAmount::Finite(value.clone()),
            right: DataAmount::Finite(value),
            slope,
        }
    }

    pub fn start(&self) -> &Rational {
        &self.start
    }

    /// Value exactly at `start`.
    pub fn value(&self) -> &DataAmount {
        &self.value
    }

    /// Limit from the right at `start`.
    pub fn right_limit(&self) -> &DataAmount {
        &self.right
    }

    /// Slope in bits per second; zero on infinite segments.
    pub fn slope(&self) -> &Rational {
        &self.slope
    }

    fn value_after(&self, t: &Rational) -> DataAmount {
        self.right.advance(&self.slope, &(t - &self.start))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Curve {
    segments: Vec<Segment>,
}

fn domain_error(name: &'static str, value: &Rational, reason: &'static str) -> Error {
    Error::ParameterDomain {
        name,
        value: to_exact_string(value),
        reason,
    }
}

fn require_non_negative(name: &'static str, value: &Rational) -> Result<()> {
    if value.is_negative() {
        Err(domain_error(name, value, "must be >= 0"))
    } else {
        Ok(())
    }
}

fn require_positive(name: &'static str, value: &Rational) -> Result<()> {
    if value.is_positive() {
        Ok(())
    } else {
        Err(domain_error(name, value, "must be > 0"))
    }
}

impl Curve {
    /// Builds a curve from explicit segments, checking every invariant.
    pub fn new(segments: Vec<Segment>) -> Result<Curve> {
        let invalid = |msg: String| Err(Error::InvalidCurve(msg));
        let Some(first) = segments.first() else {
            return invalid("no segments".into());
        };
        if !first.start.is_zero() {
            return invalid("first segment must start at 0".into());
        }
        if !first.value.is_finite() {
            return invalid("value at 0 must be finite".into());
        }
        for (i, seg) in segments.iter().enumerate() {
            if seg.slope.is_negative() {
                return invalid(format!("segment {i} has a negative slope"));
            }
            for v in [&seg.value, &seg.right] {
                if v.finite().is_some_and(|v| v.is_negative()) {
                    return invalid(format!("segment {i} has a negative value"));
                }
            }
            if seg.right < seg.value {
                return invalid(format!("segment {i} decreases right after its start"));
            }
            if let Some(next) = segments.get(i + 1) {
                if next.start <= seg.start {
                    return invalid(format!(
                        "segment {} does not start after segment {i}",
                        i + 1
                    ));
                }
                if next.value < seg.value_after(&next.start) {
                    return invalid(format!("curve decreases at the start of segment {}", i + 1));
                }
            }
        }
        Ok(Curve::from_raw(segments))
    }

    /// Canonicalizes without validation. Used for the partial (non-monotone)
    /// curves that appear inside the convolution.
    fn from_raw(segments: Vec<Segment>) -> Curve {
        let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
        for mut seg in segments {
            if !seg.right.is_finite() {
                seg.slope = Rational::zero();
            }
            if let Some(last) = out.last() {
                let left = last.value_after(&seg.start);
                if seg.value == left && seg.right == left && seg.slope == last.slope {
                    continue;
                }
            }
            out.push(seg);
        }
        Curve { segments: out }
    }

    pub fn zero() -> Curve {
        Curve::from_raw(vec![Segment::affine(
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
        )])
    }

    /// `sigma + rho * t`; takes the value `sigma` at `t = 0`.
    pub fn token_bucket(sigma: &Rational, rho: &Rational) -> Result<Curve> {
        require_non_negative("sigma", sigma)?;
        require_non_negative("rho", rho)?;
        Ok(Curve::from_raw(vec![Segment::affine(
            Rational::zero(),
            sigma.clone(),
            rho.clone(),
        )]))
    }

    /// `rate * max(0, t - latency)`.
    pub fn rate_latency(rate: &Rational, latency: &Rational) -> Result<Curve> {
        require_positive("rate", rate)?;
        require_non_negative("latency", latency)?;
        if latency.is_zero() {
            return Curve::link_rate(rate);
        }
        Ok(Curve::from_raw(vec![
            Segment::affine(Rational::zero(), Rational::zero(), Rational::zero()),
            Segment::affine(latency.clone(), Rational::zero(), rate.clone()),
        ]))
    }

    /// `0` on `[0, delay]`, `+inf` afterwards. `delay_impulse(0)` is the
    /// identity of min-plus convolution.
    pub fn delay_impulse(delay: &Rational) -> Result<Curve> {
        require_non_negative("delay", delay)?;
        let mut segments = vec![Segment::affine(
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
        )];
        let tail = Segment::new(
            delay.clone(),
            DataAmount::zero(),
            DataAmount::Infinite,
            Rational::zero(),
        );
        if delay.is_zero() {
            segments[0] = tail;
        } else {
            segments.push(tail);
        }
        Ok(Curve::from_raw(segments))
    }

    /// Constant-rate link `capacity * t`.
    pub fn link_rate(capacity: &Rational) -> Result<Curve> {
        require_positive("capacity", capacity)?;
        Ok(Curve::from_raw(vec![Segment::affine(
            Rational::zero(),
            Rational::zero(),
            capacity.clone(),
        )]))
    }

    /// `min(peak * t, sigma + rho * t)`.
    pub fn peak_rate_envelope(peak: &Rational, sigma: &Rational, rho: &Rational) -> Result<Curve> {
        require_non_negative("peak", peak)?;
        let bucket = Curve::token_bucket(sigma, rho)?;
        let line = Curve::from_raw(vec![Segment::affine(
            Rational::zero(),
            Rational::zero(),
            peak.clone(),
        )]);
        Ok(line.pointwise_min(&bucket))
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.segments.iter().map(|s| &s.start)
    }

    fn segment_index(&self, t: &Rational) -> usize {
        self.segments
            .partition_point(|s| &s.start <= t)
            .saturating_sub(1)
    }

    pub fn evaluate(&self, t: &Rational) -> Result<DataAmount> {
        if t.is_negative() {
            return Err(Error::NegativeTime(to_exact_string(t)));
        }
        Ok(self.value_at(t))
    }

    /// Value at `t >= 0`.
    pub(crate) fn value_at(&self, t: &Rational) -> DataAmount {
        let seg = &self.segments[self.segment_index(t)];
        if &seg.start == t {
            seg.value.clone()
        } else {
            seg.value_after(t)
        }
    }

    /// Right limit at `t` and the slope just after `t`.
    pub(crate) fn right_at(&self, t: &Rational) -> (DataAmount, Rational) {
        let seg = &self.segments[self.segment_index(t)];
        if &seg.start == t {
            (seg.right.clone(), seg.slope.clone())
        } else {
            (seg.value_after(t), seg.slope.clone())
        }
    }

    /// Left limit at `t > 0`.
    pub(crate) fn left_limit(&self, t: &Rational) -> DataAmount {
        let idx = self
            .segments
            .partition_point(|s| &s.start < t)
            .saturating_sub(1);
        self.segments[idx].value_after(t)
    }

    /// Slope of the final affine piece, or `None` if the curve ends at `+inf`.
    pub fn ultimate_slope(&self) -> Option<&Rational> {
        let last = self.segments.last().expect("curves are never empty");
        last.right.is_finite().then_some(&last.slope)
    }

    pub fn is_finite(&self) -> bool {
        self.segments
            .iter()
            .all(|s| s.right.is_finite() && s.value.is_finite())
    }

    /// Largest slope over the finite pieces.
    pub fn max_finite_slope(&self) -> Rational {
        self.segments
            .iter()
            .filter(|s| s.right.is_finite())
            .map(|s| s.slope.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        *self == Curve::zero()
    }

    /// The `d` for which this curve is `delay_impulse(d)`, if it is one.
    pub fn as_delay_impulse(&self) -> Option<Rational> {
        let zero = DataAmount::zero();
        match self.segments.as_slice() {
            [only] if only.value == zero && !only.right.is_finite() => Some(Rational::zero()),
            [head, tail]
                if head.value == zero
                    && head.right == zero
                    && head.slope.is_zero()
                    && tail.value == zero
                    && !tail.right.is_finite() =>
            {
                Some(tail.start.clone())
            }
            _ => None,
        }
    }

    /// `t -> f(max(0, t - delay))`, i.e. convolution with `delay_impulse(delay)`.
    pub fn shift(&self, delay: &Rational) -> Result<Curve> {
        require_non_negative("delay", delay)?;
        if delay.is_zero() {
            return Ok(self.clone());
        }
        let origin = self.segments[0].value.clone();
        let mut segments = Vec::with_capacity(self.segments.len() + 1);
        segments.push(Segment::new(
            Rational::zero(),
            origin.clone(),
            origin,
            Rational::zero(),
        ));
        segments.extend(self.segments.iter().map(|s| Segment {
            start: &s.start + delay,
            ..s.clone()
        }));
        Ok(Curve::from_raw(segments))
    }

    /// Multiplies every value by `factor > 0`.
    pub fn scale(&self, factor: &Rational) -> Result<Curve> {
        require_positive("factor", factor)?;
        let scale = |v: &DataAmount| match v {
            DataAmount::Finite(x) => DataAmount::Finite(x * factor),
            DataAmount::Infinite => DataAmount::Infinite,
        };
        Ok(Curve::from_raw(
            self.segments
                .iter()
                .map(|s| {
                    Segment::new(
                        s.start.clone(),
                        scale(&s.value),
                        scale(&s.right),
                        &s.slope * factor,
                    )
                })
                .collect(),
        ))
    }

    /// Exact pointwise minimum.
    pub fn pointwise_min(&self, other: &Curve) -> Curve {
        let times = merged_breakpoints(self, other);
        let mut out = Vec::with_capacity(times.len() + 2);
        for (idx, u) in times.iter().enumerate() {
            let next = times.get(idx + 1);
            let value = self.value_at(u).min(other.value_at(u));
            let (rf, sf) = self.right_at(u);
            let (rg, sg) = other.right_at(u);
            let (lo_v, lo_s, hi_v, hi_s) = match (rf, rg) {
                (DataAmount::Infinite, DataAmount::Infinite) => {
                    out.push(Segment::new(
                        u.clone(),
                        value,
                        DataAmount::Infinite,
                        Rational::zero(),
                    ));
                    continue;
                }
                (DataAmount::Finite(a), DataAmount::Infinite) => {
                    out.push(Segment::new(u.clone(), value, DataAmount::Finite(a), sf));
                    continue;
                }
                (DataAmount::Infinite, DataAmount::Finite(b)) => {
                    out.push(Segment::new(u.clone(), value, DataAmount::Finite(b), sg));
                    continue;
                }
                (DataAmount::Finite(a), DataAmount::Finite(b)) => match a.cmp(&b) {
                    Ordering::Less => (a, sf, b, sg),
                    Ordering::Greater => (b, sg, a, sf),
                    Ordering::Equal => {
                        out.push(Segment::new(
                            u.clone(),
                            value,
                            DataAmount::Finite(a),
                            sf.min(sg),
                        ));
                        continue;
                    }
                },
            };
            if lo_s <= hi_s {
                out.push(Segment::new(
                    u.clone(),
                    value,
                    DataAmount::Finite(lo_v),
                    lo_s,
                ));
                continue;
            }
            // the lower line is steeper: it may cross the other one inside the interval
            let cross = u + (&hi_v - &lo_v) / (&lo_s - &hi_s);
            let crosses = next.is_none_or(|w| &cross < w);
            let at_cross = &lo_v + &lo_s * (&cross - u);
            out.push(Segment::new(
                u.clone(),
                value,
                DataAmount::Finite(lo_v),
                lo_s,
            ));
            if crosses {
                out.push(Segment::affine(cross, at_cross, hi_s));
            }
        }
        Curve::from_raw(out)
    }

    /// `self <= other` at every `t >= 0`.
    pub fn is_below(&self, other: &Curve) -> bool {
        self.pointwise_min(other) == *self
    }

    /// Exact min-plus convolution `(f * g)(t) = inf_{0 <= s <= t} f(s) + g(t - s)`.
    pub fn convolve(&self, other: &Curve) -> Curve {
        if let Some(d) = other.as_delay_impulse() {
            return self.shift(&d).expect("impulse delays are non-negative");
        }
        if let Some(d) = self.as_delay_impulse() {
            return other.shift(&d).expect("impulse delays are non-negative");
        }
        convolve_pieces(self, other)
    }
}

/// Convolution of a non-empty list of curves.
pub fn convolve_all<'a>(curves: impl IntoIterator<Item = &'a Curve>) -> Option<Curve> {
    curves
        .into_iter()
        .fold(None, |acc: Option<Curve>, c| match acc {
            None => Some(c.clone()),
            Some(acc) => Some(acc.convolve(c)),
        })
}

fn merged_breakpoints(f: &Curve, g: &Curve) -> Vec<Rational> {
    let mut times: Vec<Rational> = f.breakpoints().chain(g.breakpoints()).cloned().collect();
    times.sort();
    times.dedup();
    times
}

/// Elementary pieces of a curve: isolated points and open affine runs.
/// Infinite pieces never contribute to an infimum and are dropped.
struct Point {
    at: Rational,
    value: Rational,
    /// The value equals a one-sided limit, so open runs already cover it.
    redundant: bool,
}

struct Run {
    start: Rational,
    len: Option<Rational>,
    right: Rational,
    slope: Rational,
}

fn decompose(c: &Curve) -> (Vec<Point>, Vec<Run>) {
    let mut points = Vec::new();
    let mut runs = Vec::new();
    for (i, seg) in c.segments.iter().enumerate() {
        let next = c.segments.get(i + 1).map(|n| &n.start);
        if let DataAmount::Finite(v) = &seg.value {
            let left = (i > 0).then(|| c.segments[i - 1].value_after(&seg.start));
            let redundant = seg.value == seg.right || left.as_ref() == Some(&seg.value);
            points.push(Point {
                at: seg.start.clone(),
                value: v.clone(),
                redundant,
            });
        }
        if let DataAmount::Finite(r) = &seg.right {
            runs.push(Run {
                start: seg.start.clone(),
                len: next.map(|n| n - &seg.start),
                right: r.clone(),
                slope: seg.slope.clone(),
            });
        }
    }
    (points, runs)
}

/// A function that is `+inf` outside one point.
fn partial_point(at: Rational, value: Rational) -> Curve {
    let mut segments = Vec::with_capacity(2);
    if at.is_positive() {
        segments.push(Segment::new(
            Rational::zero(),
            DataAmount::Infinite,
            DataAmount::Infinite,
            Rational::zero(),
        ));
    }
    segments.push(Segment::new(
        at,
        DataAmount::Finite(value),
        DataAmount::Infinite,
        Rational::zero(),
    ));
    Curve::from_raw(segments)
}

/// A function that is `+inf` outside the open interval starting at `start`,
/// where it follows consecutive `(length, slope)` pieces from right limit `value`.
fn partial_chain(
    start: Rational,
    value: Rational,
    chain: &[(Option<Rational>, Rational)],
) -> Curve {
    let mut segments = Vec::with_capacity(chain.len() + 2);
    if start.is_positive() {
        segments.push(Segment::new(
            Rational::zero(),
            DataAmount::Infinite,
            DataAmount::Infinite,
            Rational::zero(),
        ));
    }
    segments.push(Segment::new(
        start.clone(),
        DataAmount::Infinite,
        DataAmount::Finite(value.clone()),
        chain[0].1.clone(),
    ));
    let (mut t, mut v) = (start, value);
    for (i, (len, slope)) in chain.iter().enumerate() {
        let Some(len) = len else { break };
        t += len;
        v += slope * len;
        match chain.get(i + 1) {
            Some((_, next_slope)) => {
                segments.push(Segment::affine(t.clone(), v.clone(), next_slope.clone()))
            }
            None => segments.push(Segment::new(
                t.clone(),
                DataAmount::Infinite,
                DataAmount::Infinite,
                Rational::zero(),
            )),
        }
    }
    Curve::from_raw(segments)
}

/// Each elementary piece extended by `+inf` is convex, so pairwise
/// convolutions are slope merges; the result is the lower envelope of all of them.
fn convolve_pieces(f: &Curve, g: &Curve) -> Curve {
    let (f_points, f_runs) = decompose(f);
    let (g_points, g_runs) = decompose(g);
    let mut partials = Vec::new();

    for p in &f_points {
        for q in &g_points {
            partials.push(partial_point(&p.at + &q.at, &p.value + &q.value));
        }
        if !p.redundant {
            for r in &g_runs {
                partials.push(partial_chain(
                    &p.at + &r.start,
                    &p.value + &r.right,
                    &[(r.len.clone(), r.slope.clone())],
                ));
            }
        }
    }
    for q in g_points.iter().filter(|q| !q.redundant) {
        for r in &f_runs {
            partials.push(partial_chain(
                &q.at + &r.start,
                &q.value + &r.right,
                &[(r.len.clone(), r.slope.clone())],
            ));
        }
    }
    for a in &f_runs {
        for b in &g_runs {
            let (low, high) = if a.slope <= b.slope { (a, b) } else { (b, a) };
            let chain = match &low.len {
                None => vec![(None, low.slope.clone())],
                Some(len) => vec![
                    (Some(len.clone()), low.slope.clone()),
                    (high.len.clone(), high.slope.clone()),
                ],
            };
            partials.push(partial_chain(
                &a.start + &b.start,
                &a.right + &b.right,
                &chain,
            ));
        }
    }

    while partials.len() > 1 {
        partials = partials
            .chunks(2)
            .map(|pair| match pair {
                [x, y] => x.pointwise_min(y),
                [x] => x.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    partials
        .pop()
        .expect("f(0) + g(0) is always a finite point")
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "t={}: {}", to_exact_string(&s.start), s.value)?;
            if s.right != s.value {
                write!(f, " -> {}", s.right)?;
            }
            if s.right.is_finite() && !s.slope.is_zero() {
                write!(f, " +{}/s", to_exact_string(&s.slope))?;
            }
        }
        f.write_str("]")
    }
}
