//! Per-candidate classification of every form `k·m + j·a^i + l`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::window::SearchWindow;
use crate::cover::{CoverEntry, CoveringSystem, FormTriple, TargetConfig};
use crate::error::{domain, Error, Result};
use crate::natural::Natural;
use crate::ntcore::{is_prime, is_prime_u128, is_prime_u64, primes_in_range_u64};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OutcomeStatus {
    /// A covering prime `q` divides the value and `|v| > q`.
    CompositeWitnessed { q: Natural },
    /// Not covered; `|v|` tested composite directly.
    CompositeChecked,
    /// `|v|` is prime (including `|v| = q` on a covered slot).
    PrimeException,
    /// `|v|` is 0 or 1.
    UnitOrZeroException,
    /// `j·a^i + l = 0`; outside the statement.
    SkippedZeroOffset,
}

impl OutcomeStatus {
    /// Whether this outcome disqualifies the candidate.
    pub fn is_exception(&self) -> bool {
        matches!(self, OutcomeStatus::PrimeException | OutcomeStatus::UnitOrZeroException)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormOutcome {
    pub a: u64,
    pub i: u64,
    pub triple: FormTriple,
    #[serde(with = "signed_decimal")]
    pub value: BigInt,
    #[serde(flatten)]
    pub status: OutcomeStatus,
}

pub(crate) mod signed_decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Exponents examined for base `a`: only `i = 1` when `a = 1`, since the
/// form is then constant in `i`.
pub fn exponents_for(a: u64, i_max: u64) -> std::ops::RangeInclusive<u64> {
    if a == 1 {
        1..=1
    } else {
        1..=i_max
    }
}

/// Entries grouped by class for fast lookup during search.
pub struct CoverIndex<'a> {
    by_class: HashMap<(u64, FormTriple), Vec<&'a CoverEntry>>,
}

impl<'a> CoverIndex<'a> {
    pub fn new(system: &'a CoveringSystem) -> Self {
        let mut by_class: HashMap<(u64, FormTriple), Vec<&CoverEntry>> = HashMap::new();
        for e in &system.entries {
            by_class.entry((e.a, e.triple)).or_default().push(e);
        }
        CoverIndex { by_class }
    }

    /// First entry of the class whose residue class contains `i`.
    pub fn covering(&self, a: u64, triple: &FormTriple, i: u64) -> Option<&'a CoverEntry> {
        self.by_class
            .get(&(a, *triple))
            .and_then(|v| v.iter().copied().find(|e| e.covers(i)))
    }
}

/// Primes `m` in the window with `m ≡ b (mod W)`, ascending.
pub fn find_candidate_primes(window: &SearchWindow, system: &CoveringSystem) -> Vec<u64> {
    let w = system.w.as_biguint();
    let b = system.b.as_biguint() % w;
    let n = BigUint::from(window.n);
    // least m >= N in the class is N + r
    let r = ((&b + w) - (&n % w)) % w;
    let span = window.width();
    let Some(r) = r.to_u64().filter(|&r| r <= span) else {
        return Vec::new();
    };
    match w.to_u64() {
        Some(step) if step < 32 => {
            let b = b.to_u64().expect("b < W");
            primes_in_range_u64(window.n, window.upper)
                .into_iter()
                .filter(|m| m % step == b)
                .collect()
        }
        Some(step) => (window.n + r..=window.upper)
            .step_by(step as usize)
            .filter(|&m| is_prime_u64(m))
            .collect(),
        None => {
            let m = window.n + r;
            if is_prime_u64(m) {
                vec![m]
            } else {
                Vec::new()
            }
        }
    }
}

/// `j·a^i + l` and `k·m + j·a^i + l`, in i128 when they fit.
enum FormValue {
    Small { offset: i128, value: i128 },
    Big { offset: BigInt, value: BigInt },
}

fn evaluate(m: u64, a: u64, i: u64, t: &FormTriple) -> FormValue {
    let small = u32::try_from(i)
        .ok()
        .and_then(|i| (a as i128).checked_pow(i))
        .and_then(|pw| pw.checked_mul(t.j as i128))
        .and_then(|x| x.checked_add(t.l as i128))
        .and_then(|offset| {
            (t.k as i128)
                .checked_mul(m as i128)
                .and_then(|km| km.checked_add(offset))
                .map(|value| (offset, value))
        });
    match small {
        Some((offset, value)) => FormValue::Small { offset, value },
        None => {
            let offset = BigInt::from(t.j) * BigInt::from(a).pow(i as u32) + t.l;
            let value = BigInt::from(t.k) * m + &offset;
            FormValue::Big { offset, value }
        }
    }
}

/// Classifies every in-scope form for candidate `m`.
///
/// Outcomes are ordered by `(a, i, triple)`. A covered slot whose covering
/// prime fails to divide the value is an invariant violation and aborts.
pub fn verify_forms(
    m: u64,
    config: &TargetConfig,
    window: &SearchWindow,
    system: &CoveringSystem,
) -> Result<Vec<FormOutcome>> {
    let index = CoverIndex::new(system);
    verify_forms_indexed(m, config, window, system, &index)
}

pub(crate) fn verify_forms_indexed(
    m: u64,
    config: &TargetConfig,
    window: &SearchWindow,
    system: &CoveringSystem,
    index: &CoverIndex<'_>,
) -> Result<Vec<FormOutcome>> {
    let w = system.w.as_biguint();
    if BigUint::from(m) % w != system.b.as_biguint() % w {
        return Err(domain(format!("m = {m} is not ≡ b (mod W)")));
    }
    let triples = config.triples();
    let mut out = Vec::new();
    for a in 1..=config.k {
        for i in exponents_for(a, window.i_max) {
            for t in &triples {
                let (value, status) = classify(m, a, i, t, index)?;
                out.push(FormOutcome {
                    a,
                    i,
                    triple: *t,
                    value,
                    status,
                });
            }
        }
    }
    Ok(out)
}

fn classify(m: u64, a: u64, i: u64, t: &FormTriple, index: &CoverIndex<'_>) -> Result<(BigInt, OutcomeStatus)> {
    let covering = if a >= 2 { index.covering(a, t, i) } else { None };
    match evaluate(m, a, i, t) {
        FormValue::Small { offset, value } => {
            let big = BigInt::from(value);
            if offset == 0 {
                return Ok((big, OutcomeStatus::SkippedZeroOffset));
            }
            let abs = value.unsigned_abs();
            if abs <= 1 {
                return Ok((big, OutcomeStatus::UnitOrZeroException));
            }
            if let Some(entry) = covering {
                let status = witness(&big, entry, m, i)?;
                return Ok((big, status));
            }
            let status = if is_prime_u128(abs) {
                OutcomeStatus::PrimeException
            } else {
                OutcomeStatus::CompositeChecked
            };
            Ok((big, status))
        }
        FormValue::Big { offset, value } => {
            if offset.is_zero() {
                return Ok((value, OutcomeStatus::SkippedZeroOffset));
            }
            let abs = value.abs().to_biguint().expect("absolute value");
            if abs <= BigUint::from(1u32) {
                return Ok((value, OutcomeStatus::UnitOrZeroException));
            }
            if let Some(entry) = covering {
                let status = witness(&value, entry, m, i)?;
                return Ok((value, status));
            }
            let status = if is_prime(&abs) {
                OutcomeStatus::PrimeException
            } else {
                OutcomeStatus::CompositeChecked
            };
            Ok((value, status))
        }
    }
}

fn witness(value: &BigInt, entry: &CoverEntry, m: u64, i: u64) -> Result<OutcomeStatus> {
    let q = BigInt::from(entry.pair.q.as_biguint().clone());
    if !value.mod_floor(&q).is_zero() {
        return Err(Error::Invariant(format!(
            "covering prime {q} does not divide the form at m = {m}, a = {}, i = {i}, {}",
            entry.a, entry.triple
        )));
    }
    if value.abs() == q {
        Ok(OutcomeStatus::PrimeException)
    } else {
        Ok(OutcomeStatus::CompositeWitnessed {
            q: entry.pair.q.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{assemble, compute_i, PrimePair};

    fn toy() -> (TargetConfig, CoveringSystem) {
        let cfg = TargetConfig::new(2, vec![5, 7], 2);
        let q = BigUint::from(31u32);
        let entry = CoverEntry {
            a: 2,
            triple: FormTriple::new(1, 1, 5),
            pair: PrimePair::new(2, 5, 31u32),
            residue_i: compute_i(2, 1, 5, &q).unwrap(),
        };
        let sys = assemble(cfg.clone(), vec![entry]).unwrap();
        (cfg, sys)
    }

    fn trivial(cfg: &TargetConfig) -> CoveringSystem {
        assemble(cfg.clone(), Vec::new()).unwrap()
    }

    #[test]
    fn candidate_examples() {
        let cfg = TargetConfig::new(2, vec![5, 7], 2);
        let w = SearchWindow::new(14, 16, 3).unwrap();
        assert!(find_candidate_primes(&w, &trivial(&cfg)).is_empty());
        let w = SearchWindow::new(2, 10, 3).unwrap();
        assert_eq!(find_candidate_primes(&w, &trivial(&cfg)), vec![2, 3, 5, 7]);
        let (_, sys) = toy();
        let w = SearchWindow::new(100, 150, 3).unwrap();
        assert_eq!(find_candidate_primes(&w, &sys), vec![149]);
    }

    #[test]
    fn sparse_class_has_at_most_one_candidate() {
        let (_, sys) = toy();
        let w = SearchWindow::new(100, 110, 3).unwrap();
        assert!(find_candidate_primes(&w, &sys).len() <= 1);
    }

    #[test]
    fn outcome_examples() {
        let (cfg, sys) = toy();
        let window = SearchWindow::new(100, 150, 11).unwrap();
        let out = verify_forms(149, &cfg, &window, &sys).unwrap();
        let find = |a: u64, i: u64, t: FormTriple| out.iter().find(|o| o.a == a && o.i == i && o.triple == t).unwrap();
        let t = FormTriple::new(1, 1, 5);
        let covered = find(2, 5, t);
        assert_eq!(covered.value, BigInt::from(186));
        assert_eq!(
            covered.status,
            OutcomeStatus::CompositeWitnessed {
                q: Natural::from(31u32)
            }
        );
        let plain = find(2, 1, t);
        assert_eq!(plain.value, BigInt::from(156));
        assert_eq!(plain.status, OutcomeStatus::CompositeChecked);
        // a = 1 collapses to i = 1 only
        assert!(out.iter().filter(|o| o.a == 1).all(|o| o.i == 1));
        assert_eq!(out.len(), 16 + 16 * 11);
    }

    #[test]
    fn zero_offset_is_skipped() {
        let cfg = TargetConfig::new(2, vec![-4, 7], 2);
        let sys = trivial(&cfg);
        let window = SearchWindow::new(100, 150, 3).unwrap();
        let out = verify_forms(101, &cfg, &window, &sys).unwrap();
        let skipped: Vec<_> = out
            .iter()
            .filter(|o| o.status == OutcomeStatus::SkippedZeroOffset)
            .map(|o| (o.a, o.i, o.triple.j))
            .collect();
        // 1·2^2 - 4 = 0 and 2·2^1 - 4 = 0, for k = 1 and k = 2
        assert_eq!(skipped, vec![(2, 1, 2), (2, 1, 2), (2, 2, 1), (2, 2, 1)]);
    }

    #[test]
    fn unit_and_prime_exceptions() {
        let cfg = TargetConfig::new(2, vec![-5, 3], 2);
        let sys = trivial(&cfg);
        let window = SearchWindow::new(2, 5, 1).unwrap();
        let out = verify_forms(2, &cfg, &window, &sys).unwrap();
        // a=1, j=2, k=1, l=-5: 2 + 2 - 5 = -1
        let unit = out
            .iter()
            .find(|o| o.a == 1 && o.triple == FormTriple::new(2, 1, -5))
            .unwrap();
        assert_eq!(unit.value, BigInt::from(-1));
        assert_eq!(unit.status, OutcomeStatus::UnitOrZeroException);
        // a=1, j=1, k=1, l=-5: 2 + 1 - 5 = -2, prime in absolute value
        let neg = out
            .iter()
            .find(|o| o.a == 1 && o.triple == FormTriple::new(1, 1, -5))
            .unwrap();
        assert_eq!(neg.status, OutcomeStatus::PrimeException);
    }

    #[test]
    fn covered_value_equal_to_q_is_prime_exception() {
        // entry (a=2, j=1, k=1, l=-34, q=31) forces b = 2; at m = 33, i = 5
        // the form is 33 + 32 - 34 = 31 = q itself
        let cfg = TargetConfig::new(2, vec![-34, 7], 2);
        let q = BigUint::from(31u32);
        let entry = CoverEntry {
            a: 2,
            triple: FormTriple::new(1, 1, -34),
            pair: PrimePair::new(2, 5, 31u32),
            residue_i: compute_i(2, 1, -34, &q).unwrap(),
        };
        let sys = assemble(cfg, vec![entry]).unwrap();
        assert_eq!(sys.b.to_u64(), Some(2));
        let index = CoverIndex::new(&sys);
        let (value, status) = classify(33, 2, 5, &FormTriple::new(1, 1, -34), &index).unwrap();
        assert_eq!(value, BigInt::from(31));
        assert_eq!(status, OutcomeStatus::PrimeException);
    }

    #[test]
    fn wrong_class_is_rejected() {
        let (cfg, sys) = toy();
        let window = SearchWindow::new(100, 150, 3).unwrap();
        assert!(verify_forms(151, &cfg, &window, &sys).is_err());
    }

    #[test]
    fn big_values_match_small_path() {
        let t = FormTriple::new(-2, 2, 7);
        for i in [1u64, 10, 60, 126, 127, 200] {
            let want = BigInt::from(2u32) * 1_000_003u64 + BigInt::from(-2) * BigInt::from(3u32).pow(i as u32) + 7;
            let got = match evaluate(1_000_003, 3, i, &t) {
                FormValue::Small { value, .. } => BigInt::from(value),
                FormValue::Big { value, .. } => value,
            };
            assert_eq!(got, want, "i = {i}");
        }
    }
}
