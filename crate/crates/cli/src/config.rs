//! TOML scenario files.
//!
//! Every quantity carries its unit in the key name (`sigma_kb`,
//! `rho_kbps`, `delay_ms`) and the file must declare `[units] kilo = 1000`.
//! Numbers may be integers, floats, or strings holding an exact decimal or
//! fraction (`"12.5"`, `"1/3"`). Unknown keys are rejected.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use svcurve::rational::{int, parse_rational};
use svcurve::scenario::AnalysisMode;
use svcurve::{NetworkElement, Rational, Scenario, SessionSpec};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn exact(&self, key: &str) -> Result<Rational> {
        match self {
            Number::Int(i) => Ok(int(*i)),
            // shortest round-trip text of the float is what the user wrote
            Number::Float(f) if f.is_finite() => Ok(parse_rational(&f.to_string())?),
            Number::Float(f) => bail!("`{key}` must be finite, got {f}"),
            Number::Text(s) => parse_rational(s).with_context(|| format!("`{key}`")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub units: Units,
    pub envelope: Envelope,
    #[serde(default)]
    pub wireless_elements: Vec<ElementConfig>,
    #[serde(default)]
    pub wired_elements: Vec<ElementConfig>,
    pub session: Option<Session>,
    #[serde(default)]
    pub analysis: Analysis,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub kilo: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub sigma_kb: Number,
    pub rho_kbps: Number,
    pub peak_kbps: Option<Number>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementConfig {
    WirelessLink {
        capacity_kbps: Number,
    },
    WiredLink {
        capacity_kbps: Number,
    },
    PropagationDelay {
        delay_ms: Number,
    },
    AccessRouter {
        service_rate_kbps: Number,
        processing_delay_ms: Number,
    },
    Multiplexer {
        min_source_rate_kbps: Number,
        max_packet_bits: Number,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Session {
    pub rate_kbps: Number,
    pub frame_bytes: Number,
    pub frame_interval_ms: Number,
    pub acceptable_delay_ms: Number,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    pub mode: Option<String>,
    pub target_delay_ms: Option<Number>,
}

fn kilo(n: &Number, key: &str) -> Result<Rational> {
    Ok(n.exact(key)? * int(1000))
}

fn milli(n: &Number, key: &str) -> Result<Rational> {
    Ok(n.exact(key)? / int(1000))
}

impl ElementConfig {
    fn build(&self) -> Result<NetworkElement> {
        Ok(match self {
            ElementConfig::WirelessLink { capacity_kbps } => {
                NetworkElement::wireless_link(kilo(capacity_kbps, "capacity_kbps")?)?
            }
            ElementConfig::WiredLink { capacity_kbps } => {
                NetworkElement::wired_link(kilo(capacity_kbps, "capacity_kbps")?)?
            }
            ElementConfig::PropagationDelay { delay_ms } => {
                NetworkElement::propagation_delay(milli(delay_ms, "delay_ms")?)?
            }
            ElementConfig::AccessRouter {
                service_rate_kbps,
                processing_delay_ms,
            } => NetworkElement::access_router(
                kilo(service_rate_kbps, "service_rate_kbps")?,
                milli(processing_delay_ms, "processing_delay_ms")?,
            )?,
            ElementConfig::Multiplexer {
                min_source_rate_kbps,
                max_packet_bits,
            } => NetworkElement::multiplexer(
                kilo(min_source_rate_kbps, "min_source_rate_kbps")?,
                max_packet_bits.exact("max_packet_bits")?,
            )?,
        })
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid scenario file {}", path.display()))
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        if self.units.kilo != 1000 {
            bail!(
                "[units] kilo must be 1000 (decimal prefixes), got {}",
                self.units.kilo
            );
        }
        let e = &self.envelope;
        let source = NetworkElement::source(
            kilo(&e.sigma_kb, "sigma_kb")?,
            kilo(&e.rho_kbps, "rho_kbps")?,
            e.peak_kbps
                .as_ref()
                .map(|p| kilo(p, "peak_kbps"))
                .transpose()?,
        )?;
        let build = |list: &[ElementConfig], name: &str| -> Result<Vec<NetworkElement>> {
            if list.is_empty() {
                bail!("`{name}` must list at least one element");
            }
            list.iter().map(ElementConfig::build).collect()
        };
        let wireless = build(&self.wireless_elements, "wireless_elements")?;
        let wired = build(&self.wired_elements, "wired_elements")?;

        let mut scenario = Scenario::new(Some(source), wireless, wired)?;
        if let Some(s) = &self.session {
            scenario = scenario.with_session(SessionSpec::with_rate(
                kilo(&s.rate_kbps, "rate_kbps")?,
                s.frame_bytes.exact("frame_bytes")? * int(8),
                milli(&s.frame_interval_ms, "frame_interval_ms")?,
                milli(&s.acceptable_delay_ms, "acceptable_delay_ms")?,
            )?);
        }
        if let Some(mode) = &self.analysis.mode {
            scenario = scenario.with_mode(mode.parse::<AnalysisMode>()?);
        }
        let target = self
            .analysis
            .target_delay_ms
            .as_ref()
            .map(|t| milli(t, "target_delay_ms"))
            .transpose()?;
        Ok(scenario.with_target_delay(target)?)
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    ScenarioConfig::load(path)?
        .to_scenario()
        .with_context(|| format!("invalid scenario in {}", path.display()))
}
