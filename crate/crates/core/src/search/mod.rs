//! Window search for primes `m ≡ b (mod W)` whose forms are all composite,
//! plus the brute-force oracle it is checked against.

pub mod experiment;
pub mod forms;
pub mod oracle;
pub mod window;

pub use experiment::{
    parse_report, run_experiment, CandidateRecord, OutcomeCounts, ReportRecord, SearchReport, SlotTally,
};
pub use forms::{find_candidate_primes, verify_forms, FormOutcome, OutcomeStatus};
pub use oracle::{brute_oracle, ORACLE_MAX_WIDTH};
pub use window::SearchWindow;
