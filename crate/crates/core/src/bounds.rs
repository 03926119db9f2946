//! Worst-case bounds derived from an arrival envelope and a service curve.
//!
//! All sups and infs are evaluated exactly. Between consecutive candidate
//! breakpoints every quantity below is affine in `t`, so the supremum is the
//! largest of the breakpoint values and the one-sided limits at the ends of
//! each interval. Nothing is sampled.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::rational::{int, to_exact_string, Bound, DataAmount, Rational};

/// Extended reals for intermediate suprema.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Ext {
    NegInf,
    Fin(Rational),
    PosInf,
}

impl Ext {
    fn rank(&self) -> u8 {
        match self {
            Ext::NegInf => 0,
            Ext::Fin(_) => 1,
            Ext::PosInf => 2,
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

/// Supremum over `t >= 0` of a function that is affine on every open interval
/// between the sorted `candidates` (which must start at 0) and on the tail
/// after the last one. Interval limits are extrapolated from two interior
/// samples.
fn sup_piecewise_affine(candidates: &[Rational], f: impl Fn(&Rational) -> Ext) -> Ext {
    let mut best = Ext::NegInf;
    let third = Rational::new(1.into(), 3.into());
    for (i, c) in candidates.iter().enumerate() {
        best = best.max(f(c));
        let next = candidates.get(i + 1);
        let width = next.map_or_else(|| int(3), |n| n - c);
        let m1 = c + &width * &third;
        let m2 = c + &width * &third * int(2);
        match (f(&m1), f(&m2)) {
            (Ext::PosInf, _) | (_, Ext::PosInf) => return Ext::PosInf,
            (Ext::Fin(a), Ext::Fin(b)) => {
                let slope = (&b - &a) / (&m2 - &m1);
                best = best.max(Ext::Fin(&a - &slope * (&m1 - c)));
                match next {
                    Some(n) => best = best.max(Ext::Fin(&a + &slope * (n - &m1))),
                    None if slope.is_positive() => return Ext::PosInf,
                    None => {}
                }
            }
            (Ext::Fin(a), Ext::NegInf) | (Ext::NegInf, Ext::Fin(a)) => best = best.max(Ext::Fin(a)),
            (Ext::NegInf, Ext::NegInf) => {}
        }
    }
    best
}

/// `inf { u >= 0 : service(u) >= level }`, or `None` if never reached.
pub(crate) fn first_reach(service: &Curve, level: &Rational) -> Option<Rational> {
    let target = DataAmount::Finite(level.clone());
    let segments = service.segments();
    for (i, seg) in segments.iter().enumerate() {
        if seg.value() >= &target {
            return Some(seg.start().clone());
        }
        let DataAmount::Finite(r) = seg.right_limit() else {
            return Some(seg.start().clone());
        };
        if r >= level {
            return Some(seg.start().clone());
        }
        if seg.slope().is_positive() {
            let u = seg.start() + (level - r) / seg.slope();
            if segments.get(i + 1).is_none_or(|n| &u < n.start()) {
                return Some(u);
            }
        }
    }
    None
}

fn sorted(set: BTreeSet<Rational>) -> Vec<Rational> {
    set.into_iter().collect()
}

fn clamp_at_zero(sup: Ext) -> Bound {
    match sup {
        Ext::PosInf => Bound::Unbounded,
        Ext::Fin(v) if v.is_positive() => Bound::Finite(v),
        _ => Bound::Finite(Rational::zero()),
    }
}

/// Worst-case delay: the smallest `d >= 0` with `envelope(t) <= service(t + d)`
/// for every `t >= 0`.
pub fn horizontal_deviation(envelope: &Curve, service: &Curve) -> Bound {
    if !envelope.is_finite() {
        return Bound::Unbounded;
    }
    let mut levels = BTreeSet::new();
    let segs = service.segments();
    for (i, seg) in segs.iter().enumerate() {
        levels.extend(seg.value().finite().cloned());
        levels.extend(seg.right_limit().finite().cloned());
        if let Some(next) = segs.get(i + 1) {
            levels.extend(service.left_limit(next.start()).finite().cloned());
        }
    }

    let mut candidates: BTreeSet<Rational> = envelope.breakpoints().cloned().collect();
    let esegs = envelope.segments();
    for (i, seg) in esegs.iter().enumerate() {
        let (DataAmount::Finite(r), true) = (seg.right_limit(), seg.slope().is_positive()) else {
            continue;
        };
        let next = esegs.get(i + 1).map(|n| n.start());
        for y in &levels {
            let t = seg.start() + (y - r) / seg.slope();
            if &t > seg.start() && next.is_none_or(|n| &t < n) {
                candidates.insert(t);
            }
        }
    }

    let sup = sup_piecewise_affine(&sorted(candidates), |t| {
        let level = envelope.value_at(t);
        match first_reach(service, level.finite().expect("envelope is finite")) {
            Some(u) => Ext::Fin(u - t),
            None => Ext::PosInf,
        }
    });
    clamp_at_zero(sup)
}

/// Worst-case backlog: `sup_{t >= 0} envelope(t) - service(t)`, floored at 0.
pub fn vertical_deviation(envelope: &Curve, service: &Curve) -> Bound {
    let mut candidates: BTreeSet<Rational> = envelope.breakpoints().cloned().collect();
    candidates.extend(service.breakpoints().cloned());
    let sup = sup_piecewise_affine(&sorted(candidates), |t| {
        match (envelope.value_at(t), service.value_at(t)) {
            (_, DataAmount::Infinite) => Ext::NegInf,
            (DataAmount::Infinite, _) => Ext::PosInf,
            (DataAmount::Finite(e), DataAmount::Finite(s)) => Ext::Fin(e - s),
        }
    });
    clamp_at_zero(sup)
}

/// `sup { t : upper(t) = 0 }`: no bit can leave before this much time.
/// Unbounded when the upper service curve never leaves zero.
pub fn min_delay(upper: &Curve) -> Bound {
    let zero = DataAmount::zero();
    for seg in upper.segments() {
        if seg.value() != &zero || seg.right_limit() != &zero || seg.slope().is_positive() {
            return Bound::Finite(seg.start().clone());
        }
    }
    Bound::Unbounded
}

/// Least constant rate `C` such that a `C t` link delays the envelope by at
/// most `target`: `sup_{t >= 0} envelope(t) / (target + t)`.
pub fn min_capacity(envelope: &Curve, target: &Rational) -> Result<Bound> {
    if target.is_negative() {
        return Err(Error::ParameterDomain {
            name: "target_delay",
            value: to_exact_string(target),
            reason: "must be >= 0",
        });
    }
    if !envelope.is_finite() {
        return Ok(Bound::Unbounded);
    }
    // On an affine piece a + e t the ratio (a + e t) / (T + t) is monotone,
    // so its sup is attained at an end of the piece or at t -> inf (slope e).
    let mut best = Rational::zero();
    let segs = envelope.segments();
    for (i, seg) in segs.iter().enumerate() {
        let start = seg.start();
        let denom = target + start;
        let value = seg.value().finite().expect("envelope is finite");
        let right = seg.right_limit().finite().expect("envelope is finite");
        if denom.is_zero() {
            if value.is_positive() || right.is_positive() {
                return Ok(Bound::Unbounded);
            }
            // ratio tends to the slope as t -> 0+
            best = best.max(seg.slope().clone());
        } else {
            best = best.max(value / &denom).max(right / &denom);
        }
        match segs.get(i + 1) {
            Some(next) => {
                let end = next.start();
                let left = right + seg.slope() * (end - start);
                best = best.max(left / (target + end));
            }
            None => best = best.max(seg.slope().clone()),
        }
    }
    Ok(Bound::Finite(best))
}

fn check_closed_form_args(
    sigma: &Rational,
    rho: &Rational,
    peak: &Rational,
    capacity: &Rational,
) -> Result<()> {
    for (name, v) in [("sigma", sigma), ("rho", rho), ("peak", peak)] {
        if v.is_negative() {
            return Err(Error::ParameterDomain {
                name,
                value: to_exact_string(v),
                reason: "must be >= 0",
            });
        }
    }
    if !capacity.is_positive() {
        return Err(Error::ParameterDomain {
            name: "capacity",
            value: to_exact_string(capacity),
            reason: "must be > 0",
        });
    }
    Ok(())
}

/// Delay of a peak-rate-limited token bucket `min(r t, sigma + rho t)` on a
/// link of capacity `C`: `sigma (r - C) / (C (r - rho))` when `r > C >= rho`.
pub fn closed_form_link_delay(
    sigma: &Rational,
    rho: &Rational,
    peak: &Rational,
    capacity: &Rational,
) -> Result<Bound> {
    check_closed_form_args(sigma, rho, peak, capacity)?;
    if capacity >= peak {
        return Ok(Bound::Finite(Rational::zero()));
    }
    if capacity < rho {
        return Ok(Bound::Unbounded);
    }
    Ok(Bound::Finite(
        sigma * (peak - capacity) / (capacity * (peak - rho)),
    ))
}

/// Backlog of the same pair: `sigma (r - C) / (r - rho)`.
pub fn closed_form_link_backlog(
    sigma: &Rational,
    rho: &Rational,
    peak: &Rational,
    capacity: &Rational,
) -> Result<Bound> {
    check_closed_form_args(sigma, rho, peak, capacity)?;
    if capacity >= peak {
        return Ok(Bound::Finite(Rational::zero()));
    }
    if capacity < rho {
        return Ok(Bound::Unbounded);
    }
    Ok(Bound::Finite(sigma * (peak - capacity) / (peak - rho)))
}

/// Delay and buffer bounds for one envelope against one server.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub d_min: Bound,
    pub d_max: Bound,
    pub b_max: Bound,
    /// Least link rate meeting the target delay, when one was requested.
    pub c_min: Option<Bound>,
}

impl BoundsReport {
    pub fn compute(
        envelope: &Curve,
        lower: &Curve,
        upper: &Curve,
        target_delay: Option<&Rational>,
    ) -> Result<Self> {
        let d_max = horizontal_deviation(envelope, lower);
        let b_max = vertical_deviation(envelope, lower);
        // no traffic, no delay
        let d_min = if envelope.is_zero() {
            Bound::Finite(Rational::zero())
        } else {
            min_delay(upper).min(d_max.clone())
        };
        let c_min = target_delay
            .map(|t| min_capacity(envelope, t))
            .transpose()?;
        Ok(BoundsReport {
            d_min,
            d_max,
            b_max,
            c_min,
        })
    }

    /// Same report with `d_max` multiplied by `factor` (negative-control tests).
    pub fn with_scaled_d_max(&self, factor: &Rational) -> Self {
        let mut out = self.clone();
        if let Bound::Finite(d) = &self.d_max {
            out.d_max = Bound::Finite(d * factor);
        }
        out
    }
}
