use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A constructor or operation received a value outside its domain.
    #[error("parameter `{name}` out of domain: {reason} (got {value})")]
    ParameterDomain {
        name: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("curves are defined on t >= 0 only (got t = {0})")]
    NegativeTime(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("element kind error: {0}")]
    ElementKind(String),
    #[error("a tandem needs at least one server element")]
    EmptyTandem,
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
