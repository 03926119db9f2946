//! Physical network components and their lower/upper service curves.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::curve::{convolve_all, Curve};
use crate::error::{Error, Result};
use crate::rational::{to_exact_string, Rational};

/// One component of a wired-cum-wireless path. Rates in bits/s, delays in
/// seconds, sizes in bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetworkElement {
    SourceEnvelope {
        sigma: Rational,
        rho: Rational,
        peak_rate: Option<Rational>,
    },
    WirelessLink {
        capacity: Rational,
    },
    PropagationDelay {
        delay: Rational,
    },
    AccessRouter {
        service_rate: Rational,
        processing_delay: Rational,
    },
    Multiplexer {
        min_source_rate: Rational,
        max_packet: Rational,
    },
    WiredLink {
        capacity: Rational,
    },
}

fn positive(name: &'static str, v: &Rational) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::ParameterDomain {
            name,
            value: to_exact_string(v),
            reason: "must be > 0",
        })
    }
}

fn non_negative(name: &'static str, v: &Rational) -> Result<()> {
    if v.is_negative() {
        Err(Error::ParameterDomain {
            name,
            value: to_exact_string(v),
            reason: "must be >= 0",
        })
    } else {
        Ok(())
    }
}

impl NetworkElement {
    pub fn source(sigma: Rational, rho: Rational, peak_rate: Option<Rational>) -> Result<Self> {
        NetworkElement::SourceEnvelope {
            sigma,
            rho,
            peak_rate,
        }
        .validated()
    }

    pub fn wireless_link(capacity: Rational) -> Result<Self> {
        NetworkElement::WirelessLink { capacity }.validated()
    }

    pub fn propagation_delay(delay: Rational) -> Result<Self> {
        NetworkElement::PropagationDelay { delay }.validated()
    }

    pub fn access_router(service_rate: Rational, processing_delay: Rational) -> Result<Self> {
        NetworkElement::AccessRouter {
            service_rate,
            processing_delay,
        }
        .validated()
    }

    pub fn multiplexer(min_source_rate: Rational, max_packet: Rational) -> Result<Self> {
        NetworkElement::Multiplexer {
            min_source_rate,
            max_packet,
        }
        .validated()
    }

    pub fn wired_link(capacity: Rational) -> Result<Self> {
        NetworkElement::WiredLink { capacity }.validated()
    }

    /// Checks the domain invariants, returning the element unchanged.
    pub fn validated(self) -> Result<Self> {
        match &self {
            NetworkElement::SourceEnvelope {
                sigma,
                rho,
                peak_rate,
            } => {
                non_negative("sigma", sigma)?;
                non_negative("rho", rho)?;
                if let Some(peak) = peak_rate {
                    positive("peak_rate", peak)?;
                }
            }
            NetworkElement::WirelessLink { capacity } | NetworkElement::WiredLink { capacity } => {
                positive("capacity", capacity)?
            }
            NetworkElement::PropagationDelay { delay } => non_negative("delay", delay)?,
            NetworkElement::AccessRouter {
                service_rate,
                processing_delay,
            } => {
                positive("service_rate", service_rate)?;
                non_negative("processing_delay", processing_delay)?;
            }
            NetworkElement::Multiplexer {
                min_source_rate,
                max_packet,
            } => {
                positive("min_source_rate", min_source_rate)?;
                positive("max_packet", max_packet)?;
            }
        }
        Ok(self)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NetworkElement::SourceEnvelope { .. } => "source_envelope",
            NetworkElement::WirelessLink { .. } => "wireless_link",
            NetworkElement::PropagationDelay { .. } => "propagation_delay",
            NetworkElement::AccessRouter { .. } => "access_router",
            NetworkElement::Multiplexer { .. } => "multiplexer",
            NetworkElement::WiredLink { .. } => "wired_link",
        }
    }

    pub fn is_server(&self) -> bool {
        !matches!(self, NetworkElement::SourceEnvelope { .. })
    }

    /// The arrival envelope of a source element.
    pub fn envelope(&self) -> Result<Curve> {
        match self {
            NetworkElement::SourceEnvelope {
                sigma,
                rho,
                peak_rate: Some(peak),
            } => Curve::peak_rate_envelope(peak, sigma, rho),
            NetworkElement::SourceEnvelope {
                sigma,
                rho,
                peak_rate: None,
            } => Curve::token_bucket(sigma, rho),
            other => Err(Error::ElementKind(format!(
                "{} has no arrival envelope",
                other.kind()
            ))),
        }
    }
}

impl fmt::Display for NetworkElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = to_exact_string;
        match self {
            NetworkElement::SourceEnvelope {
                sigma,
                rho,
                peak_rate,
            } => {
                write!(f, "source(sigma={} b, rho={} b/s", x(sigma), x(rho))?;
                if let Some(p) = peak_rate {
                    write!(f, ", peak={} b/s", x(p))?;
                }
                f.write_str(")")
            }
            NetworkElement::WirelessLink { capacity } => {
                write!(f, "wireless_link({} b/s)", x(capacity))
            }
            NetworkElement::PropagationDelay { delay } => {
                write!(f, "propagation_delay({} s)", x(delay))
            }
            NetworkElement::AccessRouter {
                service_rate,
                processing_delay,
            } => {
                write!(
                    f,
                    "access_router({} b/s, {} s)",
                    x(service_rate),
                    x(processing_delay)
                )
            }
            NetworkElement::Multiplexer {
                min_source_rate,
                max_packet,
            } => {
                write!(
                    f,
                    "multiplexer({} b/s, {} b)",
                    x(min_source_rate),
                    x(max_packet)
                )
            }
            NetworkElement::WiredLink { capacity } => write!(f, "wired_link({} b/s)", x(capacity)),
        }
    }
}

/// Lower and upper service curves of one server or tandem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServiceCurvePair {
    lower: Curve,
    upper: Curve,
}

impl ServiceCurvePair {
    pub fn new(lower: Curve, upper: Curve) -> Result<Self> {
        if !lower.is_below(&upper) {
            return Err(Error::InvalidCurve(
                "lower service curve exceeds the upper one".into(),
            ));
        }
        Ok(ServiceCurvePair { lower, upper })
    }

    pub fn lower(&self) -> &Curve {
        &self.lower
    }

    pub fn upper(&self) -> &Curve {
        &self.upper
    }
}

pub fn element_curves(element: &NetworkElement) -> Result<ServiceCurvePair> {
    let (lower, upper) = match element {
        NetworkElement::SourceEnvelope { .. } => {
            return Err(Error::ElementKind(
                "a source envelope is not a server".into(),
            ));
        }
        NetworkElement::WirelessLink { capacity } | NetworkElement::WiredLink { capacity } => {
            let c = Curve::link_rate(capacity)?;
            (c.clone(), c)
        }
        NetworkElement::PropagationDelay { delay } => {
            let d = Curve::delay_impulse(delay)?;
            (d.clone(), d)
        }
        NetworkElement::AccessRouter {
            service_rate,
            processing_delay,
        } => (
            Curve::rate_latency(service_rate, processing_delay)?,
            Curve::link_rate(service_rate)?,
        ),
        NetworkElement::Multiplexer {
            min_source_rate,
            max_packet,
        } => (
            Curve::delay_impulse(&(max_packet / min_source_rate))?,
            Curve::delay_impulse(&Rational::zero())?,
        ),
    };
    ServiceCurvePair::new(lower, upper)
}

fn tandem(elements: &[NetworkElement], pick: fn(&ServiceCurvePair) -> &Curve) -> Result<Curve> {
    let pairs = elements
        .iter()
        .map(element_curves)
        .collect::<Result<Vec<_>>>()?;
    convolve_all(pairs.iter().map(pick)).ok_or(Error::EmptyTandem)
}

/// End-to-end lower service curve of elements in series.
pub fn tandem_lower(elements: &[NetworkElement]) -> Result<Curve> {
    tandem(elements, ServiceCurvePair::lower)
}

/// End-to-end upper service curve of elements in series.
pub fn tandem_upper(elements: &[NetworkElement]) -> Result<Curve> {
    tandem(elements, ServiceCurvePair::upper)
}

pub fn tandem_curves(elements: &[NetworkElement]) -> Result<ServiceCurvePair> {
    ServiceCurvePair::new(tandem_lower(elements)?, tandem_upper(elements)?)
}
