//! Mining, partitioning and assembly in one call.

use serde::{Deserialize, Serialize};

use super::config::TargetConfig;
use super::pairs::{find_prime_pairs, PairMining, PrimePair};
use super::partition::{partition_pairs, Partition};
use super::system::{build_covering_system, CoveringSystem};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub mining: Vec<PairMining>,
    pub partition: Partition,
    pub system: CoveringSystem,
}

/// Mines pairs for every base of `config`.
pub fn mine_all(config: &TargetConfig) -> Result<Vec<PairMining>> {
    config.validate()?;
    config
        .bases()
        .into_iter()
        .map(|a| find_prime_pairs(a, config.m_bound, config.p_max, config.k, &config.factor_budget))
        .collect()
}

/// Partitions already-mined pairs and solves the CRT system.
pub fn build_from_pairs(config: &TargetConfig, pairs: &[PrimePair]) -> Result<(Partition, CoveringSystem)> {
    config.validate()?;
    let partition = partition_pairs(
        pairs,
        &config.bases(),
        &config.triples(),
        &config.band,
        config.min_pairs_per_class,
    )?;
    let system = build_covering_system(&partition, config)?;
    Ok((partition, system))
}

pub fn construct(config: &TargetConfig) -> Result<Construction> {
    let mining = mine_all(config)?;
    let pairs: Vec<PrimePair> = mining.iter().flat_map(|m| m.pairs.iter().cloned()).collect();
    let (partition, system) = build_from_pairs(config, &pairs)?;
    Ok(Construction {
        mining,
        partition,
        system,
    })
}
