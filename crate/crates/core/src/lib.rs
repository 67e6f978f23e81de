//! Venue-level social resilience analytics.
//!
//! The pipeline turns CBG-aggregated venue visitation counts for a pre-shock
//! and an in-shock period into:
//!
//! * per-venue experienced income segregation and visitation change ([`metrics`]),
//! * a revealed-preference sector network with eigenvector centrality ([`sectornet`]),
//! * nested OLS models relating sector centrality to resilience ([`stats`]),
//! * core vs peripheral spatial and visitation comparisons ([`spatiotemporal`]).
//!
//! [`synth`] generates seeded synthetic cities with planted structure and holds
//! the brute-force oracles used by the test suites. [`pipeline`] wires the
//! stages together and writes the report artifacts.

pub mod error;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod sectornet;
pub mod spatiotemporal;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use ingest::{Cbg, Dataset, Period, RawVisit, Venue, VisitEdge};

/// Version string stamped into every artifact header.
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
