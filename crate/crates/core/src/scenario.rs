//! The wired-cum-wireless tandem: per-segment curves and bounds, capacity
//! planning, and the reference tables with their discrepancy entries.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::bounds::BoundsReport;
use crate::curve::Curve;
use crate::elements::{tandem_curves, NetworkElement, ServiceCurvePair};
use crate::error::{Error, Result};
use crate::rational::{int, ratio, to_exact_string, Bound, Rational};

/// A constant-bit-rate session such as a voice coder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionSpec {
    rate: Rational,
    frame_interval: Rational,
    frame_size: Rational,
    acceptable_delay: Rational,
}

impl SessionSpec {
    /// Session emitting `frame_size` bits every `frame_interval` seconds.
    pub fn new(
        frame_size: Rational,
        frame_interval: Rational,
        acceptable_delay: Rational,
    ) -> Result<Self> {
        for (name, v) in [
            ("frame_size", &frame_size),
            ("frame_interval", &frame_interval),
            ("acceptable_delay", &acceptable_delay),
        ] {
            if !v.is_positive() {
                return Err(Error::ParameterDomain {
                    name,
                    value: to_exact_string(v),
                    reason: "must be > 0",
                });
            }
        }
        let rate = &frame_size / &frame_interval;
        Ok(SessionSpec {
            rate,
            frame_interval,
            frame_size,
            acceptable_delay,
        })
    }

    /// Like [`SessionSpec::new`] but also checks a separately stated rate.
    pub fn with_rate(
        rate: Rational,
        frame_size: Rational,
        frame_interval: Rational,
        acceptable_delay: Rational,
    ) -> Result<Self> {
        let spec = SessionSpec::new(frame_size, frame_interval, acceptable_delay)?;
        if spec.rate != rate {
            return Err(Error::Scenario(format!(
                "session rate {} b/s does not match frame_size / frame_interval = {} b/s",
                to_exact_string(&rate),
                to_exact_string(&spec.rate)
            )));
        }
        Ok(spec)
    }

    pub fn rate(&self) -> &Rational {
        &self.rate
    }

    pub fn frame_interval(&self) -> &Rational {
        &self.frame_interval
    }

    pub fn frame_size(&self) -> &Rational {
        &self.frame_size
    }

    pub fn acceptable_delay(&self) -> &Rational {
        &self.acceptable_delay
    }

    /// Token bucket allowing one frame of burst at the session rate.
    pub fn envelope(&self) -> Curve {
        Curve::token_bucket(&self.frame_size, &self.rate).expect("validated session")
    }
}

/// Whether the source envelope is analyzed as one aggregate or as one of the
/// sessions sharing the wireless link.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AnalysisMode {
    #[default]
    Aggregate,
    PerSession,
}

impl fmt::Display for AnalysisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnalysisMode::Aggregate => "aggregate",
            AnalysisMode::PerSession => "per-session",
        })
    }
}

impl FromStr for AnalysisMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aggregate" => Ok(AnalysisMode::Aggregate),
            "per-session" | "per_session" => Ok(AnalysisMode::PerSession),
            other => Err(Error::Parse(format!(
                "unknown analysis mode {other:?} (expected aggregate or per-session)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    source: NetworkElement,
    wireless: Vec<NetworkElement>,
    wired: Vec<NetworkElement>,
    session: Option<SessionSpec>,
    mode: AnalysisMode,
    target_delay: Option<Rational>,
}

impl Scenario {
    pub fn new(
        source: Option<NetworkElement>,
        wireless: Vec<NetworkElement>,
        wired: Vec<NetworkElement>,
    ) -> Result<Self> {
        let source = match source {
            Some(s @ NetworkElement::SourceEnvelope { .. }) => s.validated()?,
            Some(other) => {
                return Err(Error::Scenario(format!(
                    "the envelope must be a source, got {}",
                    other.kind()
                )));
            }
            None => return Err(Error::Scenario("envelope missing".into())),
        };
        for (name, segment) in [("wireless", &wireless), ("wired", &wired)] {
            if segment.is_empty() {
                return Err(Error::Scenario(format!("{name} segment has no elements")));
            }
            if let Some(e) = segment.iter().find(|e| !e.is_server()) {
                return Err(Error::Scenario(format!(
                    "{name} segment contains a {}",
                    e.kind()
                )));
            }
            for e in segment {
                e.clone().validated()?;
            }
        }
        Ok(Scenario {
            source,
            wireless,
            wired,
            session: None,
            mode: AnalysisMode::default(),
            target_delay: None,
        })
    }

    pub fn with_session(mut self, session: SessionSpec) -> Self {
        self.session = Some(session);
        self
    }

    pub fn with_mode(mut self, mode: AnalysisMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_target_delay(mut self, target: Option<Rational>) -> Result<Self> {
        if let Some(t) = &target {
            if t.is_negative() {
                return Err(Error::ParameterDomain {
                    name: "target_delay",
                    value: to_exact_string(t),
                    reason: "must be >= 0",
                });
            }
        }
        self.target_delay = target;
        Ok(self)
    }

    pub fn source(&self) -> &NetworkElement {
        &self.source
    }

    pub fn wireless(&self) -> &[NetworkElement] {
        &self.wireless
    }

    pub fn wired(&self) -> &[NetworkElement] {
        &self.wired
    }

    pub fn session(&self) -> Option<&SessionSpec> {
        self.session.as_ref()
    }

    pub fn mode(&self) -> AnalysisMode {
        self.mode
    }

    pub fn target_delay(&self) -> Option<&Rational> {
        self.target_delay.as_ref()
    }

    /// Wireless then wired elements, in path order.
    pub fn elements(&self) -> impl Iterator<Item = &NetworkElement> {
        self.wireless.iter().chain(&self.wired)
    }

    pub fn analyze(&self) -> Result<AnalysisReport> {
        analyze(self)
    }
}

/// Aggregate parameters of one segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentSummary {
    /// θ: sum of propagation delays.
    pub propagation: Rational,
    /// φ: sum of router processing and multiplexing delays.
    pub processing: Rational,
    /// r: smallest link capacity, if the segment has a link.
    pub min_rate: Option<Rational>,
    /// p: smallest router service rate, if the segment has a router.
    pub router_rate: Option<Rational>,
}

impl SegmentSummary {
    pub fn of(elements: &[NetworkElement]) -> Self {
        fn min_opt(a: Option<Rational>, b: &Rational) -> Option<Rational> {
            Some(a.map_or_else(|| b.clone(), |a| a.min(b.clone())))
        }
        let mut s = SegmentSummary {
            propagation: Rational::zero(),
            processing: Rational::zero(),
            min_rate: None,
            router_rate: None,
        };
        for e in elements {
            match e {
                NetworkElement::WirelessLink { capacity }
                | NetworkElement::WiredLink { capacity } => {
                    s.min_rate = min_opt(s.min_rate.take(), capacity);
                }
                NetworkElement::PropagationDelay { delay } => s.propagation += delay,
                NetworkElement::AccessRouter {
                    service_rate,
                    processing_delay,
                } => {
                    s.processing += processing_delay;
                    s.router_rate = min_opt(s.router_rate.take(), service_rate);
                }
                NetworkElement::Multiplexer {
                    min_source_rate,
                    max_packet,
                } => {
                    s.processing += max_packet / min_source_rate;
                }
                NetworkElement::SourceEnvelope { .. } => {}
            }
        }
        s
    }

    /// Rate the shortcut delay formula divides by: p, or r without a router.
    pub fn shortcut_rate(&self) -> Option<&Rational> {
        self.router_rate.as_ref().or(self.min_rate.as_ref())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentReport {
    /// Curves the bounds were computed from (lower curve already shared out
    /// among sessions in per-session mode).
    pub curves: ServiceCurvePair,
    pub summary: SegmentSummary,
    pub bounds: BoundsReport,
}

/// The three closed-form rules of thumb evaluated on the wireless segment:
/// `θ`, `θ + σ/p` and `σ + ρθ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortcutBounds {
    pub min_delay: Rational,
    pub max_delay: Bound,
    pub max_buffer: Rational,
}

impl ShortcutBounds {
    pub fn new(sigma: &Rational, rho: &Rational, summary: &SegmentSummary) -> Self {
        let theta = &summary.propagation;
        let max_delay = match summary.shortcut_rate() {
            Some(p) => Bound::Finite(theta + sigma / p),
            None => Bound::Unbounded,
        };
        ShortcutBounds {
            min_delay: theta.clone(),
            max_delay,
            max_buffer: sigma + rho * theta,
        }
    }

    /// The rate-latency curve `(p, θ)` whose exact bounds these formulas give.
    pub fn equivalent_service(summary: &SegmentSummary) -> Option<Curve> {
        summary
            .shortcut_rate()
            .map(|p| Curve::rate_latency(p, &summary.propagation).expect("validated"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unit {
    Seconds,
    Bits,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Seconds => "s",
            Unit::Bits => "b",
        })
    }
}

/// A brute-force experiment whose outcome should equal a discrepancy's
/// computed value (see `oracle::run_check`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleCheck {
    /// Largest virtual delay of a greedy source through the slowest server.
    MaxDelay { envelope: Curve, service: Curve },
    /// Smallest virtual delay of a greedy source through the fastest server.
    MinDelay { envelope: Curve, upper: Curve },
    /// Largest backlog through the slowest server, times `multiplier` sessions.
    MaxBacklog {
        envelope: Curve,
        service: Curve,
        multiplier: u64,
    },
    /// Intercept of the tail line of the grid convolution of `factors`.
    TailIntercept { factors: Vec<Curve> },
}

/// A value the reference material states that disagrees with what its own
/// inputs give.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub id: String,
    pub quantity: String,
    pub computed: Bound,
    pub paper_value: Bound,
    pub unit: Unit,
    pub citation: String,
    pub check: Option<OracleCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub mode: AnalysisMode,
    /// Envelope the bounds are computed for: the source, or one session.
    pub envelope: Curve,
    pub wireless: SegmentReport,
    pub wired: SegmentReport,
    pub end_to_end: SegmentReport,
    pub shortcut: ShortcutBounds,
    /// Sessions of the configured rate fitting on the slowest wireless link.
    pub sessions_supported: Option<u64>,
    /// Mobile nodes whose wireless links fit on the slowest wired link.
    pub mns_supported: Option<u64>,
    /// Buffer for all sessions together (per-session mode only).
    pub total_buffer: Option<Bound>,
    pub discrepancies: Vec<Discrepancy>,
}

fn floor_ratio(a: &Rational, b: &Rational) -> Result<u64> {
    for (name, v) in [("numerator", a), ("denominator", b)] {
        if !v.is_positive() {
            return Err(Error::ParameterDomain {
                name,
                value: to_exact_string(v),
                reason: "must be > 0",
            });
        }
    }
    Ok((a / b).floor().to_integer().to_u64().unwrap_or(u64::MAX))
}

/// `floor(link_capacity / session_rate)`.
pub fn sessions_supported(link_capacity: &Rational, session_rate: &Rational) -> Result<u64> {
    floor_ratio(link_capacity, session_rate)
}

/// `floor(wired_capacity / wireless_capacity)`.
pub fn mns_supported(wired_capacity: &Rational, wireless_capacity: &Rational) -> Result<u64> {
    floor_ratio(wired_capacity, wireless_capacity)
}

/// Time to clock `packet` bits onto a link of `capacity` bits/s.
pub fn transmission_delay(packet: &Rational, capacity: &Rational) -> Result<Rational> {
    if packet.is_negative() {
        return Err(Error::ParameterDomain {
            name: "packet",
            value: to_exact_string(packet),
            reason: "must be >= 0",
        });
    }
    if !capacity.is_positive() {
        return Err(Error::ParameterDomain {
            name: "capacity",
            value: to_exact_string(capacity),
            reason: "must be > 0",
        });
    }
    Ok(packet / capacity)
}

fn share(curve: &Curve, sessions: Option<u64>) -> Curve {
    match sessions {
        None => curve.clone(),
        Some(0) => Curve::zero(),
        Some(n) => curve.scale(&ratio(1, n as i64)).expect("positive factor"),
    }
}

fn segment_report(
    pair: ServiceCurvePair,
    summary: SegmentSummary,
    envelope: &Curve,
    sessions: Option<u64>,
    target: Option<&Rational>,
) -> Result<SegmentReport> {
    let lower = share(pair.lower(), sessions);
    let curves = ServiceCurvePair::new(lower, pair.upper().clone())?;
    let bounds = BoundsReport::compute(envelope, curves.lower(), curves.upper(), target)?;
    Ok(SegmentReport {
        curves,
        summary,
        bounds,
    })
}

fn envelope_parameters(source: &NetworkElement) -> (Rational, Rational) {
    match source {
        NetworkElement::SourceEnvelope { sigma, rho, .. } => (sigma.clone(), rho.clone()),
        _ => unreachable!("scenario source is always an envelope"),
    }
}

pub fn analyze(scenario: &Scenario) -> Result<AnalysisReport> {
    let wireless_summary = SegmentSummary::of(&scenario.wireless);
    let wired_summary = SegmentSummary::of(&scenario.wired);

    let sessions_supported = match (&scenario.session, &wireless_summary.min_rate) {
        (Some(s), Some(r)) => Some(sessions_supported(r, s.rate())?),
        _ => None,
    };
    let mns_supported = match (&wired_summary.min_rate, &wireless_summary.min_rate) {
        (Some(wired), Some(wireless)) => Some(mns_supported(wired, wireless)?),
        _ => None,
    };

    let (envelope, (sigma, rho), sharing) = match scenario.mode {
        AnalysisMode::Aggregate => (
            scenario.source.envelope()?,
            envelope_parameters(&scenario.source),
            None,
        ),
        AnalysisMode::PerSession => {
            let session = scenario
                .session
                .as_ref()
                .ok_or_else(|| Error::Scenario("per-session analysis needs a session".into()))?;
            if wireless_summary.min_rate.is_none() {
                return Err(Error::Scenario(
                    "per-session analysis needs a wireless link".into(),
                ));
            }
            let params = (session.frame_size().clone(), session.rate().clone());
            (session.envelope(), params, sessions_supported)
        }
    };

    let target = scenario.target_delay.as_ref();
    let wireless_pair = tandem_curves(&scenario.wireless)?;
    let wired_pair = tandem_curves(&scenario.wired)?;
    let e2e_pair = ServiceCurvePair::new(
        wireless_pair.lower().convolve(wired_pair.lower()),
        wireless_pair.upper().convolve(wired_pair.upper()),
    )?;
    let e2e_summary = SegmentSummary::of(&scenario.elements().cloned().collect::<Vec<_>>());

    let wireless = segment_report(wireless_pair, wireless_summary, &envelope, sharing, target)?;
    let wired = segment_report(wired_pair, wired_summary, &envelope, sharing, target)?;
    let end_to_end = segment_report(e2e_pair, e2e_summary, &envelope, sharing, target)?;

    let shortcut = ShortcutBounds::new(&sigma, &rho, &wireless.summary);
    let total_buffer = sharing.map(|n| match &end_to_end.bounds.b_max {
        Bound::Finite(b) => Bound::Finite(b * int(n as i64)),
        Bound::Unbounded => Bound::Unbounded,
    });

    let discrepancies = shortcut_discrepancies(&shortcut, &wireless, &envelope);
    Ok(AnalysisReport {
        mode: scenario.mode,
        envelope,
        wireless,
        wired,
        end_to_end,
        shortcut,
        sessions_supported,
        mns_supported,
        total_buffer,
        discrepancies,
    })
}

/// Shortcut formulas vs the exact bounds of the wireless segment.
fn shortcut_discrepancies(
    shortcut: &ShortcutBounds,
    wireless: &SegmentReport,
    envelope: &Curve,
) -> Vec<Discrepancy> {
    let exact = &wireless.bounds;
    let lower = wireless.curves.lower();
    let upper = wireless.curves.upper();
    let rows = [
        (
            "shortcut.min_delay",
            "minimum delay (theta)",
            &exact.d_min,
            Bound::Finite(shortcut.min_delay.clone()),
            Unit::Seconds,
            "Sec. VI, Minimum delay = theta",
            OracleCheck::MinDelay {
                envelope: envelope.clone(),
                upper: upper.clone(),
            },
        ),
        (
            "shortcut.max_delay",
            "maximum delay (theta + sigma/p)",
            &exact.d_max,
            shortcut.max_delay.clone(),
            Unit::Seconds,
            "Sec. VI, Maximum delay = theta + sigma/r",
            OracleCheck::MaxDelay {
                envelope: envelope.clone(),
                service: lower.clone(),
            },
        ),
        (
            "shortcut.max_buffer",
            "maximum buffer (sigma + rho theta)",
            &exact.b_max,
            Bound::Finite(shortcut.max_buffer.clone()),
            Unit::Bits,
            "Sec. VI, Maximum buffer size = sigma + rho theta",
            OracleCheck::MaxBacklog {
                envelope: envelope.clone(),
                service: lower.clone(),
                multiplier: 1,
            },
        ),
    ];
    rows.into_iter()
        .filter(|row| row.2 != &row.3)
        .map(
            |(id, quantity, computed, paper_value, unit, citation, check)| Discrepancy {
                id: id.into(),
                quantity: quantity.into(),
                computed: computed.clone(),
                paper_value,
                unit,
                citation: citation.into(),
                check: (!computed.is_unbounded()).then_some(check),
            },
        )
        .collect()
}

/// Inputs of the reference wired-cum-wireless example.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaperParameters {
    pub sigma: Rational,
    pub rho: Rational,
    pub wireless_capacities: Vec<Rational>,
    pub wireless_propagation: Rational,
    pub router_rate: Rational,
    pub router_processing: Rational,
    pub wired_capacity: Rational,
    pub wired_propagation: Rational,
    pub max_packet: Rational,
    pub session: SessionSpec,
}

impl Default for PaperParameters {
    fn default() -> Self {
        PaperParameters {
            sigma: int(5_000),
            rho: int(200_000),
            wireless_capacities: vec![int(64_000), int(128_000), int(256_000)],
            wireless_propagation: ratio(20, 1000),
            router_rate: int(400_000),
            router_processing: ratio(10, 1000),
            wired_capacity: int(1_200_000),
            wired_propagation: ratio(25, 1000),
            max_packet: int(8_000),
            session: SessionSpec::new(int(80), ratio(10, 1000), ratio(35, 1000)).expect("valid"),
        }
    }
}

impl PaperParameters {
    pub fn scenario(&self, wireless_capacity: &Rational) -> Result<Scenario> {
        let source = NetworkElement::source(self.sigma.clone(), self.rho.clone(), None)?;
        let wireless = vec![
            NetworkElement::wireless_link(wireless_capacity.clone())?,
            NetworkElement::propagation_delay(self.wireless_propagation.clone())?,
            NetworkElement::access_router(
                self.router_rate.clone(),
                self.router_processing.clone(),
            )?,
        ];
        let wired = vec![
            NetworkElement::wired_link(self.wired_capacity.clone())?,
            NetworkElement::propagation_delay(self.wired_propagation.clone())?,
        ];
        Ok(Scenario::new(Some(source), wireless, wired)?.with_session(self.session.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableIRow {
    pub wireless_capacity: Rational,
    /// θ
    pub min_delay: Rational,
    /// θ + σ/p
    pub max_delay: Bound,
    /// σ + ρθ
    pub buffer: Rational,
    /// Exact aggregate bound of the wireless segment, for comparison.
    pub exact_max_delay: Bound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableIIRow {
    pub wireless_capacity: Rational,
    /// Per-session worst-case delay on the wireless segment.
    pub delay: Bound,
    pub per_session_buffer: Bound,
    /// `sessions × per_session_buffer`.
    pub buffer: Bound,
    pub sessions: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableIIIRow {
    pub wireless_capacity: Rational,
    pub mns: u64,
    pub sessions: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaperTables {
    pub table1: Vec<TableIRow>,
    pub table2: Vec<TableIIRow>,
    pub table3: Vec<TableIIIRow>,
    /// `L_max / C` on the wired link.
    pub transmission_delay: Rational,
    pub discrepancies: Vec<Discrepancy>,
}

struct Stated {
    kbps: i64,
    table1: (&'static str, &'static str, &'static str),
    table2: (&'static str, &'static str),
}

/// Published cells (ms, ms, kb) for Table I and (ms, kb) for Table II.
const STATED: [Stated; 3] = [
    Stated {
        kbps: 64,
        table1: ("20", "32.5078125", "14"),
        table2: ("35.078125", "130"),
    },
    Stated {
        kbps: 128,
        table1: ("14", "38.039062", "56"),
        table2: ("35.039062", "250"),
    },
    Stated {
        kbps: 256,
        table1: ("12", "35.019531", "100"),
        table2: ("35.019531", "500"),
    },
];

fn stated_ms(s: &str) -> Rational {
    crate::rational::parse_rational(s).expect("constant") / int(1000)
}

fn stated_kb(s: &str) -> Rational {
    crate::rational::parse_rational(s).expect("constant") * int(1000)
}

fn tail_intercept(curve: &Curve) -> Option<Rational> {
    let last = curve.segments().last()?;
    let right = last.right_limit().finite()?;
    Some(right - last.slope() * last.start())
}

struct Ledger(Vec<Discrepancy>);

impl Ledger {
    #[allow(clippy::too_many_arguments)]
    fn note(
        &mut self,
        id: String,
        quantity: &str,
        computed: Bound,
        paper: Rational,
        unit: Unit,
        citation: String,
        check: OracleCheck,
    ) {
        let paper_value = Bound::Finite(paper);
        if computed != paper_value {
            self.0.push(Discrepancy {
                id,
                quantity: quantity.into(),
                computed,
                paper_value,
                unit,
                citation,
                check: Some(check),
            });
        }
    }
}

/// Recomputes Tables I–III of the reference example from `params`, with a
/// discrepancy entry for every published cell the inputs do not reproduce.
pub fn reproduce_paper_tables(params: &PaperParameters) -> Result<PaperTables> {
    let mut ledger = Ledger(Vec::new());
    let mut table1 = Vec::new();
    let mut table2 = Vec::new();
    let mut table3 = Vec::new();
    let source = NetworkElement::source(params.sigma.clone(), params.rho.clone(), None)?;
    let envelope = source.envelope()?;

    for capacity in &params.wireless_capacities {
        let scenario = params.scenario(capacity)?;
        let aggregate = scenario.analyze()?;
        let per_session = scenario
            .clone()
            .with_mode(AnalysisMode::PerSession)
            .analyze()?;
        let stated = STATED.iter().find(|s| int(s.kbps * 1000) == *capacity);
        let kbps = to_exact_string(&(capacity / int(1000)));

        let shortcut = &aggregate.shortcut;
        let summary = &aggregate.wireless.summary;
        table1.push(TableIRow {
            wireless_capacity: capacity.clone(),
            min_delay: shortcut.min_delay.clone(),
            max_delay: shortcut.max_delay.clone(),
            buffer: shortcut.max_buffer.clone(),
            exact_max_delay: aggregate.wireless.bounds.d_max.clone(),
        });

        let sessions = per_session.sessions_supported.unwrap_or(0);
        let session_report = &per_session.wireless;
        let per_session_buffer = session_report.bounds.b_max.clone();
        let buffer = match &per_session_buffer {
            Bound::Finite(b) => Bound::Finite(b * int(sessions as i64)),
            Bound::Unbounded => Bound::Unbounded,
        };
        table2.push(TableIIRow {
            wireless_capacity: capacity.clone(),
            delay: session_report.bounds.d_max.clone(),
            per_session_buffer,
            buffer: buffer.clone(),
            sessions,
        });

        table3.push(TableIIIRow {
            wireless_capacity: capacity.clone(),
            mns: mns_supported(&params.wired_capacity, capacity)?,
            sessions,
        });

        let Some(stated) = stated else { continue };
        let equivalent = ShortcutBounds::equivalent_service(summary);
        let upper = aggregate.wireless.curves.upper().clone();
        ledger.note(
            format!("table1.min_delay[{kbps}]"),
            "minimum delay",
            aggregate.wireless.bounds.d_min.clone(),
            stated_ms(stated.table1.0),
            Unit::Seconds,
            format!("Table I, {kbps} kbps row, Minimum Delay"),
            OracleCheck::MinDelay {
                envelope: envelope.clone(),
                upper,
            },
        );
        if let Some(service) = &equivalent {
            ledger.note(
                format!("table1.max_delay[{kbps}]"),
                "maximum delay (theta + sigma/p)",
                shortcut.max_delay.clone(),
                stated_ms(stated.table1.1),
                Unit::Seconds,
                format!("Table I, {kbps} kbps row, Maximum Delay"),
                OracleCheck::MaxDelay {
                    envelope: envelope.clone(),
                    service: service.clone(),
                },
            );
            ledger.note(
                format!("table1.buffer[{kbps}]"),
                "buffer size (sigma + rho theta)",
                Bound::Finite(shortcut.max_buffer.clone()),
                stated_kb(stated.table1.2),
                Unit::Bits,
                format!("Table I, {kbps} kbps row, Buffer Size"),
                OracleCheck::MaxBacklog {
                    envelope: envelope.clone(),
                    service: service.clone(),
                    multiplier: 1,
                },
            );
        }
        let session_envelope = per_session.envelope.clone();
        let session_service = session_report.curves.lower().clone();
        ledger.note(
            format!("table2.delay[{kbps}]"),
            "per-session maximum delay",
            session_report.bounds.d_max.clone(),
            stated_ms(stated.table2.0),
            Unit::Seconds,
            format!("Table II, {kbps} kbps row, Acceptable Delay"),
            OracleCheck::MaxDelay {
                envelope: session_envelope.clone(),
                service: session_service.clone(),
            },
        );
        ledger.note(
            format!("table2.buffer[{kbps}]"),
            "buffer for all sessions (sessions x per-session backlog)",
            buffer,
            stated_kb(stated.table2.1),
            Unit::Bits,
            format!("Table II, {kbps} kbps row, Buffer Space Required"),
            OracleCheck::MaxBacklog {
                envelope: session_envelope,
                service: session_service,
                multiplier: sessions,
            },
        );
    }

    // Worked example of the first wireless capacity: the closed-form buffer
    // and the published curve constants.
    if let Some(first) = params
        .wireless_capacities
        .first()
        .filter(|c| **c == int(64_000))
    {
        let s1 = Curve::link_rate(first)?;
        let s2 = Curve::delay_impulse(&params.wireless_propagation)?;
        let s3 = Curve::rate_latency(&params.router_rate, &params.router_processing)?;
        let summary = SegmentSummary::of(params.scenario(first)?.wireless());
        let shortcut = ShortcutBounds::new(&params.sigma, &params.rho, &summary);
        if let Some(service) = ShortcutBounds::equivalent_service(&summary) {
            ledger.note(
                "sec6.max_buffer".into(),
                "maximum buffer size (sigma + rho theta)",
                Bound::Finite(shortcut.max_buffer.clone()),
                int(14_000),
                Unit::Bits,
                "Sec. VI, Maximum buffer size = sigma + rho theta = 5kb + 9kb = 14kb".into(),
                OracleCheck::MaxBacklog {
                    envelope: envelope.clone(),
                    service,
                    multiplier: 1,
                },
            );
        }
        let constants = [
            (
                "eq20.intercept",
                "access router service curve intercept",
                vec![s3.clone()],
                -400,
                "Eq. (20), s3(t) = -0.4kb + 400kbps.t",
            ),
            (
                "eq24.intercept",
                "wireless upper service curve intercept",
                vec![s1.clone(), s2.clone()],
                -72_800,
                "Eq. (24), -72.8kb + 64kb/s.t",
            ),
            (
                "eq26.intercept",
                "wireless lower service curve intercept",
                vec![s1, s2, s3],
                -26_400,
                "Eq. (26), -26.4kb + 64kb/s.t",
            ),
        ];
        for (id, quantity, factors, stated, citation) in constants {
            let product = crate::curve::convolve_all(&factors).expect("non-empty");
            let Some(intercept) = tail_intercept(&product) else {
                continue;
            };
            ledger.note(
                id.into(),
                quantity,
                Bound::Finite(intercept),
                int(stated),
                Unit::Bits,
                citation.into(),
                OracleCheck::TailIntercept { factors },
            );
        }
    }

    Ok(PaperTables {
        table1,
        table2,
        table3,
        transmission_delay: transmission_delay(&params.max_packet, &params.wired_capacity)?,
        discrepancies: ledger.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kbps(x: i64) -> Rational {
        int(x * 1000)
    }
    fn ms(x: i64) -> Rational {
        ratio(x, 1000)
    }

    fn paper(capacity: i64) -> Scenario {
        PaperParameters::default()
            .scenario(&kbps(capacity))
            .unwrap()
    }

    #[test]
    fn counting_examples() {
        assert_eq!(sessions_supported(&kbps(64), &kbps(8)).unwrap(), 8);
        assert_eq!(sessions_supported(&kbps(128), &kbps(8)).unwrap(), 16);
        assert_eq!(sessions_supported(&kbps(256), &kbps(8)).unwrap(), 32);
        assert_eq!(sessions_supported(&kbps(64), &kbps(65)).unwrap(), 0);
        assert_eq!(mns_supported(&int(1_200_000), &kbps(64)).unwrap(), 18);
        assert_eq!(mns_supported(&int(1_200_000), &kbps(128)).unwrap(), 9);
        assert_eq!(mns_supported(&int(1_200_000), &kbps(256)).unwrap(), 4);
        assert_eq!(mns_supported(&kbps(7), &kbps(7)).unwrap(), 1);
        assert!(mns_supported(&int(0), &kbps(7)).is_err());
    }

    #[test]
    fn transmission_delay_examples() {
        assert_eq!(
            transmission_delay(&int(8000), &int(1_200_000)).unwrap(),
            ratio(1, 150)
        );
        assert_eq!(transmission_delay(&int(0), &kbps(5)).unwrap(), int(0));
        assert_eq!(transmission_delay(&int(80), &kbps(8)).unwrap(), ms(10));
    }

    #[test]
    fn session_spec_checks_rate() {
        let s = SessionSpec::with_rate(kbps(8), int(80), ms(10), ms(35)).unwrap();
        assert_eq!(s.rate(), &kbps(8));
        assert!(SessionSpec::with_rate(kbps(9), int(80), ms(10), ms(35)).is_err());
        assert!(SessionSpec::new(int(0), ms(10), ms(35)).is_err());
    }

    #[test]
    fn scenario_requires_envelope_and_segments() {
        let wl = vec![NetworkElement::wireless_link(kbps(64)).unwrap()];
        let wd = vec![NetworkElement::wired_link(kbps(64)).unwrap()];
        assert!(matches!(
            Scenario::new(None, wl.clone(), wd.clone()),
            Err(Error::Scenario(_))
        ));
        let src = NetworkElement::source(int(1), int(1), None).unwrap();
        assert!(Scenario::new(Some(src.clone()), vec![], wd.clone()).is_err());
        assert!(Scenario::new(Some(wl[0].clone()), wl.clone(), wd.clone()).is_err());
        assert!(Scenario::new(Some(src.clone()), vec![src.clone()], wd).is_err());
    }

    #[test]
    fn paper_scenario_aggregate() {
        let report = paper(64).analyze().unwrap();
        assert_eq!(report.shortcut.max_delay, Bound::Finite(ratio(325, 10_000)));
        assert_eq!(report.shortcut.min_delay, ms(20));
        assert_eq!(report.shortcut.max_buffer, int(9000));
        assert_eq!(report.wireless.summary.propagation, ms(20));
        assert_eq!(report.wireless.summary.processing, ms(10));
        assert_eq!(report.wireless.summary.min_rate, Some(kbps(64)));
        assert_eq!(report.wireless.summary.router_rate, Some(kbps(400)));
        assert_eq!(
            report.wireless.curves.lower(),
            &Curve::rate_latency(&kbps(64), &ms(30)).unwrap()
        );
        assert_eq!(report.wireless.bounds.d_max, Bound::Unbounded);
        assert_eq!(report.end_to_end.bounds.d_max, Bound::Unbounded);
        assert_eq!(report.wireless.bounds.d_min, Bound::Finite(ms(20)));
        // upper end to end: rate_latency(64k, 20ms) * rate_latency(1.2M, 25ms)
        assert_eq!(report.end_to_end.bounds.d_min, Bound::Finite(ms(45)));
        assert_eq!(report.end_to_end.summary.propagation, ms(45));
        assert_eq!(report.mns_supported, Some(18));
        assert_eq!(report.sessions_supported, Some(8));
        assert!(report.total_buffer.is_none());
        let ids: Vec<_> = report.discrepancies.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["shortcut.max_delay", "shortcut.max_buffer"]);
        assert!(report.discrepancies.iter().all(|d| !d.citation.is_empty()));
    }

    #[test]
    fn paper_scenario_per_session() {
        let report = paper(64)
            .with_mode(AnalysisMode::PerSession)
            .analyze()
            .unwrap();
        assert_eq!(
            report.envelope,
            Curve::token_bucket(&int(80), &kbps(8)).unwrap()
        );
        assert_eq!(
            report.wireless.curves.lower(),
            &Curve::rate_latency(&kbps(8), &ms(30)).unwrap()
        );
        assert_eq!(report.wireless.bounds.d_max, Bound::Finite(ms(40)));
        assert_eq!(report.wireless.bounds.b_max, Bound::Finite(int(320)));
        assert_eq!(
            report.shortcut.max_delay,
            Bound::Finite(ms(20) + ratio(80, 400_000))
        );
        let e2e = Curve::rate_latency(&kbps(8), &ms(55)).unwrap();
        assert_eq!(report.end_to_end.curves.lower(), &e2e);
        assert_eq!(report.end_to_end.bounds.d_max, Bound::Finite(ms(65)));
        assert_eq!(
            report.total_buffer,
            Some(Bound::Finite(int(8 * (80 + 440))))
        );
    }

    #[test]
    fn per_session_needs_session() {
        let src = NetworkElement::source(int(1), int(1), None).unwrap();
        let s = Scenario::new(
            Some(src),
            vec![NetworkElement::wireless_link(kbps(64)).unwrap()],
            vec![NetworkElement::wired_link(kbps(64)).unwrap()],
        )
        .unwrap()
        .with_mode(AnalysisMode::PerSession);
        assert!(matches!(s.analyze(), Err(Error::Scenario(_))));
    }

    #[test]
    fn degenerate_chain_has_zero_delay() {
        let src = NetworkElement::source(int(0), kbps(10), None).unwrap();
        let s = Scenario::new(
            Some(src),
            vec![NetworkElement::wireless_link(kbps(64)).unwrap()],
            vec![NetworkElement::wired_link(kbps(100)).unwrap()],
        )
        .unwrap();
        let r = s.analyze().unwrap();
        assert_eq!(r.end_to_end.bounds.d_min, Bound::Finite(int(0)));
        assert_eq!(r.end_to_end.bounds.d_max, Bound::Finite(int(0)));
        assert_eq!(r.end_to_end.bounds.b_max, Bound::Finite(int(0)));
    }

    #[test]
    fn target_delay_gives_capacity() {
        let s = paper(64).with_target_delay(Some(ms(10))).unwrap();
        let r = s.analyze().unwrap();
        assert_eq!(r.end_to_end.bounds.c_min, Some(Bound::Finite(kbps(500))));
        assert!(paper(64).with_target_delay(Some(ms(-1))).is_err());
    }

    #[test]
    fn tables_reproduce_published_counts() {
        let t = reproduce_paper_tables(&PaperParameters::default()).unwrap();
        let mns: Vec<_> = t.table3.iter().map(|r| r.mns).collect();
        assert_eq!(mns, [18, 9, 4]);
        let sessions: Vec<_> = t.table2.iter().map(|r| r.sessions).collect();
        assert_eq!(sessions, [8, 16, 32]);
        assert_eq!(t.table1[0].min_delay, ms(20));
        assert_eq!(t.table1[0].max_delay, Bound::Finite(ratio(325, 10_000)));
        assert_eq!(t.transmission_delay, ratio(1, 150));
        assert_eq!(
            t.table1[2].exact_max_delay,
            Bound::Finite(ms(30) + ratio(5000, 256_000))
        );
        for row in &t.table2 {
            assert_eq!(row.delay, Bound::Finite(ms(40)));
            assert_eq!(row.per_session_buffer, Bound::Finite(int(320)));
            assert_eq!(row.buffer, Bound::Finite(int(320 * row.sessions as i64)));
        }
    }

    #[test]
    fn tables_ledger_entries() {
        let t = reproduce_paper_tables(&PaperParameters::default()).unwrap();
        let get = |id: &str| {
            t.discrepancies
                .iter()
                .find(|d| d.id == id)
                .unwrap_or_else(|| panic!("missing {id}"))
        };
        assert!(t
            .discrepancies
            .iter()
            .all(|d| !d.citation.is_empty() && d.check.is_some()));
        assert!(!t
            .discrepancies
            .iter()
            .any(|d| d.id == "table1.min_delay[64]"));
        assert_eq!(get("table1.min_delay[128]").computed, Bound::Finite(ms(20)));
        assert_eq!(
            get("table1.min_delay[128]").paper_value,
            Bound::Finite(ms(14))
        );
        assert_eq!(
            get("table1.min_delay[256]").paper_value,
            Bound::Finite(ms(12))
        );
        for kbps in [64, 128, 256] {
            assert_eq!(
                get(&format!("table1.buffer[{kbps}]")).computed,
                Bound::Finite(int(9000))
            );
            assert!(t
                .discrepancies
                .iter()
                .any(|d| d.id == format!("table2.buffer[{kbps}]")));
        }
        assert_eq!(
            get("table1.max_delay[64]").paper_value,
            Bound::Finite(ratio(325_078_125, 10_000_000_000))
        );
        assert_eq!(get("sec6.max_buffer").computed, Bound::Finite(int(9000)));
        assert_eq!(get("eq24.intercept").computed, Bound::Finite(int(-1280)));
        assert_eq!(
            get("eq24.intercept").paper_value,
            Bound::Finite(int(-72_800))
        );
        assert_eq!(get("eq26.intercept").computed, Bound::Finite(int(-1920)));
        assert_eq!(get("eq20.intercept").computed, Bound::Finite(int(-4000)));
        assert!(!t.discrepancies.iter().any(|d| d.id.starts_with("table3")));
    }

    proptest! {
        #[test]
        fn floor_definition(a in 1i64..10_000_000, b in 1i64..100_000) {
            let (a, b) = (int(a), int(b));
            let n = int(mns_supported(&a, &b).unwrap() as i64);
            prop_assert!(&n * &b <= a);
            prop_assert!(a < (n + int(1)) * b);
        }

        #[test]
        fn sessions_monotone(link in 1i64..1_000_000, extra in 0i64..1_000_000, rate in 1i64..100_000, more in 0i64..100_000) {
            let base = sessions_supported(&int(link), &int(rate)).unwrap();
            prop_assert!(sessions_supported(&int(link + extra), &int(rate)).unwrap() >= base);
            prop_assert!(sessions_supported(&int(link), &int(rate + more)).unwrap() <= base);
        }

        #[test]
        fn d_min_is_total_latency_of_rate_latency_uppers(
            wireless in prop::collection::vec((1i64..1000, 0i64..50), 1..4),
            wired in prop::collection::vec((1i64..1000, 0i64..50), 1..4),
        ) {
            let build = |pairs: &[(i64, i64)], wired: bool| -> Vec<NetworkElement> {
                pairs.iter().flat_map(|&(c, d)| {
                    let link = if wired { NetworkElement::wired_link(kbps(c)) } else { NetworkElement::wireless_link(kbps(c)) };
                    [link.unwrap(), NetworkElement::propagation_delay(ms(d)).unwrap()]
                }).collect()
            };
            let src = NetworkElement::source(int(1000), int(1), None).unwrap();
            let s = Scenario::new(Some(src), build(&wireless, false), build(&wired, true)).unwrap();
            let r = s.analyze().unwrap();
            let total: i64 = wireless.iter().chain(&wired).map(|p| p.1).sum();
            prop_assert_eq!(r.end_to_end.bounds.d_min, Bound::Finite(ms(total)));
        }
    }
}
