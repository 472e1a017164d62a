//! Covering-system construction: pair mining, partitioning, CRT assembly
//! and verification.

pub mod config;
pub mod density;
pub mod pairs;
pub mod partition;
pub mod pipeline;
pub mod system;

pub use config::{least_prime_above, ExponentBound, FormTriple, OffsetPreset, ReciprocalBand, TargetConfig};
pub use density::{coverage_density, density_f64, verify_cover, CoverCheck};
pub use pairs::{admissible_anchor, find_prime_pairs, AnchorReport, AnchorStatus, PairMining, PrimePair};
pub use partition::{partition_pairs, Partition, PartitionClass};
pub use pipeline::{build_from_pairs, construct, mine_all, Construction};
pub use system::{
    assemble, build_covering_system, compute_i, system_from_json, system_to_json, verify_covering_system,
    CoverEntry, CoveringSystem, SystemDocument, VerificationFailure, VerificationReport, VerifyOptions,
};
