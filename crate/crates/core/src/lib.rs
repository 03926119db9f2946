//! Deterministic network calculus over exact piecewise-linear curves.
//!
//! The crate computes worst-case delay, backlog and minimum-capacity bounds
//! for a session crossing a tandem of network elements (wireless link,
//! propagation delay, access router, wired link, ...), and checks every bound
//! against a brute-force grid simulation.
//!
//! * [`curve`]: exact min-plus algebra on [`Curve`]s.
//! * [`elements`]: lower/upper service curves of the individual elements.
//! * [`bounds`]: horizontal/vertical deviations, minimum capacity, closed forms.
//! * [`scenario`]: the wired-cum-wireless tandem, capacity planning, table reproduction.
//! * [`oracle`]: grid convolution and greedy-source simulation.

pub mod bounds;
pub mod curve;
pub mod elements;
pub mod error;
pub mod oracle;
pub mod rational;
pub mod scenario;

pub use bounds::BoundsReport;
pub use curve::{Curve, Segment};
pub use elements::{NetworkElement, ServiceCurvePair};
pub use error::{Error, Result};
pub use rational::{Bound, DataAmount, Rational};
pub use scenario::{AnalysisMode, AnalysisReport, Scenario, SessionSpec};
