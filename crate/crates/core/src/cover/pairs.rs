//! Mining anchor/covering prime pairs `(p, q)` with `ord_q(a) = p`.
//!
//! The scan factors `a^p - 1` for every prime `p <= p_max` and keeps each
//! prime factor `q` whose order is exactly `p` and which clears the size
//! bounds `q >= M·p` and `q > K^2`. Anchors whose factorization blows the
//! budget are listed in [`PairMining::skipped`].

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::natural::Natural;
use crate::ntcore::{factor_with, is_prime, is_prime_u128, primes_up_to, FactorBudget, Factorization};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrimePair {
    pub a: u64,
    /// Anchor prime: the order of `a` modulo `q`.
    pub p: u64,
    /// Covering prime.
    pub q: Natural,
}

impl PrimePair {
    pub fn new(a: u64, p: u64, q: impl Into<Natural>) -> Self {
        PrimePair { a, p, q: q.into() }
    }

    /// Lists every violated pair invariant for bounds `M` and `K`.
    pub fn check(&self, m_bound: u64, k: u64) -> Vec<String> {
        let mut bad = Vec::new();
        let q = self.q.as_biguint();
        if self.a < 2 {
            bad.push(format!("base {} is below 2", self.a));
        }
        if !is_prime_u128(self.p as u128) {
            bad.push(format!("anchor {} is not prime", self.p));
        }
        if !is_prime(q) {
            bad.push(format!("covering modulus {q} is not prime"));
        } else if !order_is_anchor(self.a, self.p, q) {
            bad.push(format!("ord_{q}({}) != {}", self.a, self.p));
        }
        if q < &(BigUint::from(m_bound) * self.p) {
            bad.push(format!("q = {q} < M·p = {}", m_bound as u128 * self.p as u128));
        }
        if q <= &BigUint::from(k * k) {
            bad.push(format!("q = {q} <= K^2 = {}", k * k));
        }
        bad
    }
}

/// `ord_q(a) = p` for a prime `p`: `a^p ≡ 1` and `a ≢ 1 (mod q)`.
pub fn order_is_anchor(a: u64, p: u64, q: &BigUint) -> bool {
    let base = BigUint::from(a) % q;
    !base.is_one() && base != BigUint::ZERO && base.modpow(&BigUint::from(p), q).is_one()
}

/// `m·p + 1` is composite for every `1 <= m <= M`.
///
/// When this holds, every prime `q ≡ 1 (mod p)` exceeds `M·p`.
pub fn admissible_anchor(p: u64, m_bound: u64) -> bool {
    (1..=m_bound).all(|m| !is_prime_u128(m as u128 * p as u128 + 1))
}

/// Order check for one prime factor of `a^p - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCheck {
    pub q: Natural,
    /// `a mod q`; the order is `p` exactly when this is not 1.
    pub base_residue: Natural,
    pub order_is_p: bool,
    pub meets_m_bound: bool,
    pub exceeds_k_squared: bool,
    pub admitted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorStatus {
    Factored,
    BudgetExceeded,
}

/// Everything learned about one anchor prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorReport {
    pub p: u64,
    pub admissible: bool,
    pub status: AnchorStatus,
    pub factorization: Option<Factorization>,
    pub checks: Vec<FactorCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMining {
    pub a: u64,
    #[serde(rename = "M")]
    pub m_bound: u64,
    pub p_max: u64,
    #[serde(rename = "K")]
    pub k: u64,
    pub anchors: Vec<AnchorReport>,
    /// Admitted pairs sorted by `(p, q)`.
    pub pairs: Vec<PrimePair>,
}

impl PairMining {
    /// Anchors whose factorization was abandoned.
    pub fn skipped(&self) -> Vec<u64> {
        self.anchors
            .iter()
            .filter(|r| r.status == AnchorStatus::BudgetExceeded)
            .map(|r| r.p)
            .collect()
    }
}

/// Scans primes `p <= p_max` for covering primes of base `a`.
pub fn find_prime_pairs(
    a: u64,
    m_bound: u64,
    p_max: u64,
    k: u64,
    budget: &FactorBudget,
) -> Result<PairMining> {
    if a < 2 {
        return Err(domain(format!("base a = {a} must be >= 2")));
    }
    if a > k {
        return Err(domain(format!("base a = {a} exceeds K = {k}")));
    }
    if p_max < 2 {
        return Err(domain(format!("p_max = {p_max} must be >= 2")));
    }
    let anchors: Vec<AnchorReport> = primes_up_to(p_max)
        .into_par_iter()
        .map(|p| mine_anchor(a, p, m_bound, k, budget))
        .collect::<Result<_>>()?;
    let mut pairs: Vec<PrimePair> = anchors
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .filter(|c| c.admitted)
                .map(move |c| PrimePair::new(a, r.p, c.q.clone()))
        })
        .collect();
    pairs.sort_by(|x, y| (x.p, &x.q).cmp(&(y.p, &y.q)));
    Ok(PairMining {
        a,
        m_bound,
        p_max,
        k,
        anchors,
        pairs,
    })
}

fn mine_anchor(a: u64, p: u64, m_bound: u64, k: u64, budget: &FactorBudget) -> Result<AnchorReport> {
    let n = BigUint::from(a).pow(p as u32) - 1u32;
    let admissible = admissible_anchor(p, m_bound);
    let factorization = match factor_with(&n, budget) {
        Ok(f) => f,
        Err(Error::BudgetExceeded { .. }) => {
            return Ok(AnchorReport {
                p,
                admissible,
                status: AnchorStatus::BudgetExceeded,
                factorization: None,
                checks: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let lower = BigUint::from(m_bound) * p;
    let k_sq = BigUint::from(k * k);
    let checks = factorization
        .primes()
        .map(|q| {
            let qb = q.as_biguint();
            let residue = BigUint::from(a) % qb;
            let order_is_p = order_is_anchor(a, p, qb);
            let meets_m_bound = qb >= &lower;
            let exceeds_k_squared = qb > &k_sq;
            FactorCheck {
                q: q.clone(),
                base_residue: residue.into(),
                order_is_p,
                meets_m_bound,
                exceeds_k_squared,
                admitted: order_is_p && meets_m_bound && exceeds_k_squared,
            }
        })
        .collect();
    Ok(AnchorReport {
        p,
        admissible,
        status: AnchorStatus::Factored,
        factorization: Some(factorization),
        checks,
    })
}

/// Keeps the largest covering prime per anchor, preserving order by `p`.
pub fn largest_per_anchor(pairs: &[PrimePair]) -> Vec<PrimePair> {
    let mut out: Vec<PrimePair> = Vec::new();
    for pair in pairs {
        match out.iter_mut().find(|x| x.a == pair.a && x.p == pair.p) {
            Some(existing) if existing.q < pair.q => *existing = pair.clone(),
            Some(_) => {}
            None => out.push(pair.clone()),
        }
    }
    out
}

impl PrimePair {
    pub fn q_u64(&self) -> Option<u64> {
        self.q.to_u64()
    }

    pub fn reciprocal(&self) -> f64 {
        1.0 / self.p as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mine(a: u64, m: u64, p_max: u64, k: u64) -> Vec<(u64, u64)> {
        find_prime_pairs(a, m, p_max, k, &FactorBudget::default())
            .unwrap()
            .pairs
            .iter()
            .map(|x| (x.p, x.q.to_u64().unwrap()))
            .collect()
    }

    #[test]
    fn admissible_anchor_examples() {
        assert!(admissible_anchor(2, 0));
        assert!(admissible_anchor(5, 1));
        assert!(!admissible_anchor(2, 1));
        // 7·1+1 = 8, 7·2+1 = 15, 7·3+1 = 22, 7·4+1 = 29
        assert!(admissible_anchor(7, 3));
        assert!(!admissible_anchor(7, 4));
    }

    #[test]
    fn base_two_small() {
        assert_eq!(mine(2, 2, 4, 2), vec![(3, 7)]);
        let got = mine(2, 2, 13, 2);
        assert_eq!(got, vec![(3, 7), (5, 31), (7, 127), (11, 23), (11, 89), (13, 8191)]);
    }

    #[test]
    fn base_three() {
        let got = mine(3, 1, 5, 3);
        assert!(got.contains(&(5, 11)));
        assert!(got.contains(&(3, 13)));
        // 3^2 - 1 = 8 only contributes q = 2 with ord 1
        assert!(got.iter().all(|&(p, _)| p != 2));
    }

    #[test]
    fn rejects_bad_base() {
        assert!(find_prime_pairs(1, 2, 10, 2, &FactorBudget::default()).is_err());
        assert!(find_prime_pairs(3, 2, 10, 2, &FactorBudget::default()).is_err());
    }

    #[test]
    fn skipped_anchors_are_reported() {
        let tight = FactorBudget {
            cofactor_bits: 40,
            ..FactorBudget::default()
        };
        // 2^67 - 1 = 193707721 · 761838257287 is a 67-bit composite after trial division
        let mining = find_prime_pairs(2, 2, 67, 2, &tight).unwrap();
        assert!(mining.skipped().contains(&67));
        assert!(mining.pairs.iter().all(|x| x.p != 67));
    }

    #[test]
    fn pair_check_lists_violations() {
        assert!(PrimePair::new(2, 5, 31u32).check(2, 2).is_empty());
        let bad = PrimePair::new(2, 5, 7u32).check(2, 2);
        assert_eq!(bad.len(), 2, "{bad:?}");
        let small = PrimePair::new(2, 2, 3u32).check(2, 2);
        assert_eq!(small.len(), 2, "{small:?}");
    }

    #[test]
    fn dedup_keeps_largest() {
        let pairs = vec![
            PrimePair::new(2, 11, 23u32),
            PrimePair::new(2, 11, 89u32),
            PrimePair::new(2, 13, 8191u32),
        ];
        let kept = largest_per_anchor(&pairs);
        assert_eq!(kept, vec![PrimePair::new(2, 11, 89u32), PrimePair::new(2, 13, 8191u32)]);
    }
}
