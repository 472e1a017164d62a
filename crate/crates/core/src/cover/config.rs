use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ntcore::{is_prime_u64, FactorBudget};

/// One target form `k·m + j·a^i + l`, minus the base and exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FormTriple {
    pub j: i64,
    pub k: u64,
    pub l: i64,
}

impl FormTriple {
    pub fn new(j: i64, k: u64, l: i64) -> Self {
        FormTriple { j, k, l }
    }
}

impl fmt::Display for FormTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(j={}, k={}, l={})", self.j, self.k, self.l)
    }
}

/// How the exponent range `1 <= i <= K ln N` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentBound {
    /// `1 <= i <= ceil(K ln N)`.
    #[default]
    Inclusive,
    /// `1 <= i < K ln N`.
    Exclusive,
}

impl ExponentBound {
    /// Largest admissible exponent for a window starting at `n` (natural log).
    pub fn max_exponent(self, k: u64, n: u64) -> u64 {
        let x = k as f64 * (n as f64).ln();
        let top = match self {
            ExponentBound::Inclusive => x.ceil(),
            ExponentBound::Exclusive => x.ceil() - 1.0,
        };
        top.max(1.0) as u64
    }
}

/// Target range for the reciprocal sum `Σ 1/p` of each class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReciprocalBand {
    pub low: Ratio<u64>,
    pub high: Ratio<u64>,
}

impl ReciprocalBand {
    /// `[M / 4K^3, M / 3K^3]`.
    pub fn standard(m_bound: u64, k: u64) -> Self {
        let k3 = k.pow(3);
        ReciprocalBand {
            low: Ratio::new(m_bound, 4 * k3),
            high: Ratio::new(m_bound, 3 * k3),
        }
    }

    pub fn low_f64(&self) -> f64 {
        *self.low.numer() as f64 / *self.low.denom() as f64
    }

    pub fn high_f64(&self) -> f64 {
        *self.high.numer() as f64 / *self.high.denom() as f64
    }

    pub fn contains(&self, sum: f64) -> bool {
        sum >= self.low_f64() && sum <= self.high_f64()
    }
}

/// Named generators for the offset set `L_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffsetPreset {
    /// `{p, 2p, ..., Kp}` for a prime `p > K` (the least one when `None`).
    Multiples(Option<u64>),
    /// `{K! + 1, (K+1)! + 1, ..., (2K-1)! + 1}`.
    Factorials,
}

impl OffsetPreset {
    pub fn generate(self, k: u64) -> Result<Vec<i64>> {
        match self {
            OffsetPreset::Multiples(choice) => {
                let p = match choice {
                    Some(p) => {
                        if p <= k || !is_prime_u64(p) {
                            return Err(Error::Config(vec![format!(
                                "offset prime {p} must be a prime greater than K = {k}"
                            )]));
                        }
                        p
                    }
                    None => least_prime_above(k),
                };
                (1..=k)
                    .map(|t| {
                        t.checked_mul(p)
                            .and_then(|v| i64::try_from(v).ok())
                            .ok_or_else(|| Error::Config(vec!["offset overflows i64".into()]))
                    })
                    .collect()
            }
            OffsetPreset::Factorials => {
                let mut out = Vec::new();
                let mut fact: i64 = 1;
                for t in 1..=(2 * k - 1) {
                    fact = fact
                        .checked_mul(t as i64)
                        .ok_or_else(|| Error::Config(vec![format!("{t}! overflows i64")]))?;
                    if t >= k {
                        out.push(fact + 1);
                    }
                }
                Ok(out)
            }
        }
    }
}

pub fn least_prime_above(k: u64) -> u64 {
    (k + 1..).find(|&n| is_prime_u64(n)).expect("primes are unbounded")
}

/// Parameters shared by mining, partitioning and search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetConfig {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "L_N")]
    pub offsets: Vec<i64>,
    #[serde(rename = "M")]
    pub m_bound: u64,
    pub p_max: u64,
    pub factor_budget: FactorBudget,
    pub band: ReciprocalBand,
    pub min_pairs_per_class: usize,
    pub exponent_bound: ExponentBound,
}

impl TargetConfig {
    /// Config with the default mining bounds and the standard band.
    pub fn new(k: u64, offsets: Vec<i64>, m_bound: u64) -> Self {
        TargetConfig {
            k,
            offsets,
            m_bound,
            p_max: 1000,
            factor_budget: FactorBudget::default(),
            band: ReciprocalBand::standard(m_bound, k.max(1)),
            min_pairs_per_class: 1,
            exponent_bound: ExponentBound::Inclusive,
        }
    }

    /// Checks every cross-field constraint, reporting all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.k < 2 {
            problems.push(format!("K must be >= 2 (got {})", self.k));
        }
        if self.offsets.len() as u64 != self.k {
            problems.push(format!(
                "L_N must have exactly K = {} elements (got {})",
                self.k,
                self.offsets.len()
            ));
        }
        let mut sorted = self.offsets.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.offsets.len() {
            problems.push("L_N contains repeated offsets".into());
        }
        if self.m_bound < 1 {
            problems.push("M must be >= 1".into());
        }
        if self.p_max < 2 {
            problems.push(format!("p_max must be >= 2 (got {})", self.p_max));
        }
        if self.band.low > self.band.high {
            problems.push("band low exceeds band high".into());
        }
        if self.min_pairs_per_class < 1 {
            problems.push("min_pairs_per_class must be >= 1".into());
        }
        if self.factor_budget.cofactor_bits == 0 {
            problems.push("factor budget must be positive".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Offsets must satisfy `|l| <= K·N` for a window starting at `n`.
    pub fn check_window(&self, n: u64) -> Result<()> {
        let limit = self.k as i128 * n as i128;
        let bad: Vec<String> = self
            .offsets
            .iter()
            .filter(|&&l| (l as i128).abs() > limit)
            .map(|l| format!("|{l}| exceeds K·N = {limit}"))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }

    /// Bases `2..=K` that receive covering primes.
    pub fn bases(&self) -> Vec<u64> {
        (2..=self.k).collect()
    }

    /// All triples with `1 <= |j|, k <= K` and `l` in `L_N`, sorted.
    pub fn triples(&self) -> Vec<FormTriple> {
        let kk = self.k as i64;
        let mut offsets = self.offsets.clone();
        offsets.sort_unstable();
        let mut out = Vec::new();
        for j in (-kk..=kk).filter(|&j| j != 0) {
            for k in 1..=self.k {
                for &l in &offsets {
                    out.push(FormTriple { j, k, l });
                }
            }
        }
        out
    }

    pub fn contains_triple(&self, t: &FormTriple) -> bool {
        t.j != 0
            && t.j.unsigned_abs() <= self.k
            && (1..=self.k).contains(&t.k)
            && self.offsets.contains(&t.l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_set_size() {
        let cfg = TargetConfig::new(2, vec![7, 5], 2);
        let r = cfg.triples();
        assert_eq!(r.len(), 16);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
        assert!(r.iter().all(|t| cfg.contains_triple(t)));
        assert!(!cfg.contains_triple(&FormTriple::new(3, 1, 5)));
        assert!(!cfg.contains_triple(&FormTriple::new(1, 1, 6)));
    }

    #[test]
    fn offset_presets() {
        assert_eq!(OffsetPreset::Multiples(None).generate(2).unwrap(), vec![3, 6]);
        assert_eq!(OffsetPreset::Multiples(None).generate(4).unwrap(), vec![5, 10, 15, 20]);
        assert_eq!(OffsetPreset::Multiples(Some(7)).generate(3).unwrap(), vec![7, 14, 21]);
        assert!(OffsetPreset::Multiples(Some(3)).generate(3).is_err());
        assert!(OffsetPreset::Multiples(Some(9)).generate(3).is_err());
        assert_eq!(OffsetPreset::Factorials.generate(2).unwrap(), vec![3, 7]);
        assert_eq!(OffsetPreset::Factorials.generate(3).unwrap(), vec![7, 25, 121]);
        assert!(OffsetPreset::Factorials.generate(12).is_err());
    }

    #[test]
    fn validation_lists_every_problem() {
        let mut cfg = TargetConfig::new(1, vec![5, 5, 7], 0);
        cfg.p_max = 1;
        match cfg.validate() {
            Err(Error::Config(items)) => assert_eq!(items.len(), 5, "{items:?}"),
            other => panic!("{other:?}"),
        }
        assert!(TargetConfig::new(2, vec![5, 7], 2).validate().is_ok());
    }

    #[test]
    fn window_offset_limit() {
        let cfg = TargetConfig::new(2, vec![5, -9], 2);
        assert!(cfg.check_window(5).is_ok());
        assert!(cfg.check_window(4).is_err());
    }

    #[test]
    fn exponent_bounds() {
        assert_eq!(ExponentBound::Inclusive.max_exponent(2, 200), 11);
        assert_eq!(ExponentBound::Exclusive.max_exponent(2, 200), 10);
        assert_eq!(ExponentBound::Inclusive.max_exponent(2, 5000), 18);
        assert_eq!(ExponentBound::Inclusive.max_exponent(2, 2), 2);
    }

    #[test]
    fn standard_band() {
        let band = ReciprocalBand::standard(96, 2);
        assert_eq!(band.low, Ratio::new(3, 1));
        assert_eq!(band.high, Ratio::new(4, 1));
        assert!(band.contains(3.5));
    }
}
