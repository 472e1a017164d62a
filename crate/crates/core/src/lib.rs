//! Covering-congruence obstructions for the forms `k·m + j·a^i + l`.
//!
//! The pipeline mines anchor/covering prime pairs `(p, q)` with
//! `ord_q(a) = p`, distributes them over the target triples `(j, k, l)`,
//! assembles a residue class `b (mod W)` by CRT, and then searches prime
//! windows for `m ≡ b (mod W)` whose forms are all composite. The
//! [`analytics`] module evaluates the supporting prime sums numerically.

pub mod analytics;
pub mod cover;
pub mod error;
pub mod natural;
pub mod ntcore;
pub mod search;

pub use error::{Error, Result};
pub use natural::Natural;

pub use cover::{
    CoverEntry, CoveringSystem, FormTriple, PrimePair, TargetConfig, VerificationReport,
};
pub use search::{FormOutcome, OutcomeStatus, SearchReport, SearchWindow};

/// Version string written into every persisted document.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
