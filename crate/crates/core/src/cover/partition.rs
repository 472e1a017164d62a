//! Distribution of mined pairs over the classes `(a, j, k, l)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::config::{FormTriple, ReciprocalBand};
use super::pairs::PrimePair;
use crate::error::{Error, Result, Shortfall};
use crate::natural::Natural;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionClass {
    pub a: u64,
    pub triple: FormTriple,
    pub pairs: Vec<PrimePair>,
    /// Achieved `Σ 1/p` over the class.
    pub reciprocal_sum: f64,
    pub in_band: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub band: ReciprocalBand,
    /// Sorted by `(a, triple)`.
    pub classes: Vec<PartitionClass>,
    /// Pairs left out by deduplication (smaller `q` for a repeated anchor, or
    /// a `q` already claimed by a smaller base).
    pub unused: Vec<PrimePair>,
}

impl Partition {
    /// Whether every class landed inside the reciprocal band.
    pub fn band_feasible(&self) -> bool {
        self.classes.iter().all(|c| c.in_band)
    }

    pub fn class(&self, a: u64, triple: &FormTriple) -> Option<&PartitionClass> {
        self.classes.iter().find(|c| c.a == a && &c.triple == triple)
    }
}

/// Splits the pairs of each base across `triples`.
///
/// Pairs are dealt in decreasing `1/p`, cycling through the classes. Each
/// pair goes to the next class (from the cursor) that still lacks
/// `min_pairs` pairs; failing that, the next one below the band floor;
/// failing that, the next one it fits in under the band ceiling; otherwise
/// the class under the cursor. Every pair is used, so the classes of one
/// base are disjoint and cover the deduplicated input.
pub fn partition_pairs(
    pairs: &[PrimePair],
    bases: &[u64],
    triples: &[FormTriple],
    band: &ReciprocalBand,
    min_pairs: usize,
) -> Result<Partition> {
    let mut seen_per_base: BTreeSet<(u64, &Natural)> = BTreeSet::new();
    for pair in pairs {
        if !seen_per_base.insert((pair.a, &pair.q)) {
            return Err(Error::DuplicateCoveringPrime { q: pair.q.to_string() });
        }
    }

    let mut sorted = pairs.to_vec();
    sorted.sort_by(|x, y| (x.a, x.p, &y.q).cmp(&(y.a, y.p, &x.q)));
    let mut unused = Vec::new();
    let mut claimed: BTreeSet<Natural> = BTreeSet::new();
    let mut by_base: BTreeMap<u64, Vec<PrimePair>> = bases.iter().map(|&a| (a, Vec::new())).collect();
    for pair in sorted {
        let Some(bucket) = by_base.get_mut(&pair.a) else {
            unused.push(pair);
            continue;
        };
        let repeat_anchor = bucket.last().is_some_and(|x| x.p == pair.p);
        if repeat_anchor || claimed.contains(&pair.q) {
            unused.push(pair);
            continue;
        }
        claimed.insert(pair.q.clone());
        bucket.push(pair);
    }

    let needed = triples.len() * min_pairs;
    let shortfall: Vec<Shortfall> = by_base
        .iter()
        .filter(|(_, v)| v.len() < needed)
        .map(|(&a, v)| Shortfall {
            a,
            needed,
            available: v.len(),
        })
        .collect();
    if !shortfall.is_empty() {
        return Err(Error::Insufficient(shortfall));
    }

    let (low, high) = (band.low_f64(), band.high_f64());
    let mut ordered_triples = triples.to_vec();
    ordered_triples.sort();
    let mut classes = Vec::new();
    for (&a, bucket) in &by_base {
        let n = ordered_triples.len();
        let mut assigned: Vec<Vec<PrimePair>> = vec![Vec::new(); n];
        let mut sums = vec![0.0f64; n];
        let mut cursor = 0usize;
        for pair in bucket {
            let w = pair.reciprocal();
            let from_cursor = |pred: &dyn Fn(usize) -> bool| (0..n).map(|s| (cursor + s) % n).find(|&c| pred(c));
            let chosen = from_cursor(&|c| assigned[c].len() < min_pairs)
                .or_else(|| from_cursor(&|c| sums[c] < low))
                .or_else(|| from_cursor(&|c| sums[c] + w <= high))
                .unwrap_or(cursor);
            assigned[chosen].push(pair.clone());
            sums[chosen] += w;
            cursor = (chosen + 1) % n;
        }
        for ((triple, pairs), sum) in ordered_triples.iter().zip(assigned).zip(sums) {
            classes.push(PartitionClass {
                a,
                triple: *triple,
                pairs,
                reciprocal_sum: sum,
                in_band: band.contains(sum),
            });
        }
    }

    Ok(Partition {
        band: *band,
        classes,
        unused,
    })
}
