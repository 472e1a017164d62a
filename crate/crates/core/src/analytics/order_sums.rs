//! Sums over squarefree `d` weighted by the least exponent `e(d)` with
//! `d | j·a^e + l`.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::exact::exact_sum;
use super::CompensatedSum;
use crate::error::{domain, Error, Result};
use crate::ntcore::modular::{crt_pair_general, prime_power_coset};

/// Largest truncation point `D` accepted by the order sums.
pub const MAX_ORDER_SUM_BOUND: u64 = 10_000_000;

/// A squarefree `d >= 2`, all of whose primes exceed `K`, for which the form
/// has a least exponent `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderTerm {
    pub d: u64,
    pub omega: u32,
    pub e: u64,
}

impl OrderTerm {
    fn weight(&self) -> u64 {
        1u64 << self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderSum {
    pub x: u64,
    pub d_max: u64,
    pub value: f64,
    /// `value / ln^2 x`.
    pub ratio: f64,
    pub terms: usize,
}

/// Every qualifying `d` in `[2, D]`, in increasing order.
///
/// Each prime contributes its solution class `i ≡ r (mod ord_p a)`; the
/// class for `d` is the intersection over its primes, and `e(d)` is its
/// least positive member. Primes dividing `a` never qualify.
pub fn order_terms(k: u64, a: u64, j: i64, l: i64, d_max: u64) -> Result<Vec<OrderTerm>> {
    if d_max < 2 {
        return Err(domain(format!("order sums need D >= 2 (got {d_max})")));
    }
    if d_max > MAX_ORDER_SUM_BOUND {
        return Err(Error::Guard(format!(
            "order sums are limited to D <= {MAX_ORDER_SUM_BOUND} (got {d_max})"
        )));
    }
    if a < 2 {
        return Err(domain(format!("order sums need a >= 2 (got {a})")));
    }
    let n = d_max as usize;
    let mut spf = vec![0u32; n + 1];
    for p in 2..=n {
        if spf[p] != 0 {
            continue;
        }
        for m in (p..=n).step_by(p) {
            if spf[m] == 0 {
                spf[m] = p as u32;
            }
        }
    }

    let mut classes: HashMap<u64, Option<(u64, u64)>> = HashMap::new();
    for p in (2..=n).filter(|&p| spf[p] as usize == p) {
        let p = p as u64;
        let class = if p <= k || a.is_multiple_of(p) {
            None
        } else {
            prime_power_coset(a, j, l, p, 1)?
        };
        classes.insert(p, class);
    }

    let mut terms = Vec::new();
    'd: for d in 2..=d_max {
        let mut rest = d;
        let mut acc = (0u64, 1u64);
        let mut omega = 0u32;
        while rest > 1 {
            let p = spf[rest as usize] as u64;
            rest /= p;
            if rest % p == 0 {
                continue 'd;
            }
            let Some((r, m)) = classes[&p] else {
                continue 'd;
            };
            let Some(next) = crt_pair_general(acc.0, acc.1, r, m) else {
                continue 'd;
            };
            acc = next;
            omega += 1;
        }
        let (r, period) = acc;
        terms.push(OrderTerm {
            d,
            omega,
            e: if r == 0 { period } else { r },
        });
    }
    Ok(terms)
}

pub(crate) fn e_from_terms(terms: &[OrderTerm], x: u64, d_max: u64) -> OrderSum {
    let mut acc = CompensatedSum::default();
    let mut used = 0;
    for t in terms.iter().filter(|t| t.e <= x) {
        acc.add(t.weight() as f64 / t.d as f64);
        used += 1;
    }
    let value = acc.value();
    let ln = (x as f64).ln();
    OrderSum {
        x,
        d_max,
        value,
        ratio: value / (ln * ln),
        terms: used,
    }
}

fn check_x(x: u64) -> Result<()> {
    if x < 2 {
        return Err(domain(format!("E(x) needs x >= 2 (got {x})")));
    }
    Ok(())
}

/// `E(x)` truncated at `D`: `Σ 2^ω(d) / d` over qualifying `d <= D` with
/// `e(d) <= x`.
pub fn e_truncated(x: u64, k: u64, a: u64, j: i64, l: i64, d_max: u64) -> Result<OrderSum> {
    check_x(x)?;
    Ok(e_from_terms(&order_terms(k, a, j, l, d_max)?, x, d_max))
}

/// `Σ 2^ω(d) / (d·e(d))` over qualifying `d <= D`.
pub fn weighted_order_sum(k: u64, a: u64, j: i64, l: i64, d_max: u64) -> Result<f64> {
    let mut acc = CompensatedSum::default();
    for t in order_terms(k, a, j, l, d_max)? {
        acc.add(t.weight() as f64 / (t.d as f64 * t.e as f64));
    }
    Ok(acc.value())
}

/// `E(x)` as an exact rational, summed term by term over `d`.
pub fn e_truncated_exact(terms: &[OrderTerm], x: u64) -> Result<BigRational> {
    let pieces: Vec<(u64, u64)> = terms.iter().filter(|t| t.e <= x).map(|t| (t.weight(), t.d)).collect();
    exact_sum(&pieces)
}

/// `Σ_{e <= x} Σ_{d : e(d) = e} 2^ω(d) / d`, each inner sum taken exactly.
pub fn e_grouped_exact(terms: &[OrderTerm], x: u64) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for (e, inner) in grouped_by_e(terms)? {
        if e <= x {
            total += inner;
        }
    }
    Ok(total)
}

/// The weighted sum as an exact rational, term by term over `d`.
pub fn weighted_order_sum_exact(terms: &[OrderTerm]) -> Result<BigRational> {
    let pieces = terms
        .iter()
        .map(|t| {
            t.d.checked_mul(t.e)
                .map(|den| (t.weight(), den))
                .ok_or_else(|| Error::Guard(format!("d·e overflows u64 at d = {}", t.d)))
        })
        .collect::<Result<Vec<_>>>()?;
    exact_sum(&pieces)
}

/// `Σ_e (1/e) · Σ_{d : e(d) = e} 2^ω(d) / d`.
pub fn weighted_order_grouped_exact(terms: &[OrderTerm]) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for (e, inner) in grouped_by_e(terms)? {
        total += inner / BigRational::from_integer(e.into());
    }
    Ok(total)
}

fn grouped_by_e(terms: &[OrderTerm]) -> Result<BTreeMap<u64, BigRational>> {
    let mut groups: BTreeMap<u64, Vec<(u64, u64)>> = BTreeMap::new();
    for t in terms {
        groups.entry(t.e).or_default().push((t.weight(), t.d));
    }
    groups.into_iter().map(|(e, pieces)| Ok((e, exact_sum(&pieces)?))).collect()
}
