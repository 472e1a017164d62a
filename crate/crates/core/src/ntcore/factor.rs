//! Integer factorization: trial division below a cutoff, then Brent's
//! variant of Pollard rho on the remaining cofactors.
//!
//! Every result is checked before it is returned: the prime powers must
//! multiply back to the input and each prime must pass [`is_prime`].

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::arith::Mont128;
use super::primality::is_prime;
use super::sieve::primes_up_to;
use crate::error::{domain, Error, Result};
use crate::natural::Natural;

/// Limits on how much work [`factor_with`] may spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorBudget {
    /// Largest composite cofactor (in bits) handed to rho.
    pub cofactor_bits: u32,
    /// Trial division covers primes below this bound.
    pub trial_cutoff: u64,
    /// Total rho iterations allowed per cofactor across restarts.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            cofactor_bits: 96,
            trial_cutoff: 1 << 16,
            rho_iterations: 1 << 28,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: Natural,
    pub exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    pub base: Natural,
    /// Strictly increasing primes.
    pub factors: Vec<PrimePower>,
}

impl Factorization {
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, pp| acc * pp.prime.pow(pp.exponent))
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u64 {
        self.factors.iter().map(|pp| pp.exponent as u64).sum()
    }

    pub fn primes(&self) -> impl Iterator<Item = &Natural> {
        self.factors.iter().map(|pp| &pp.prime)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|pp| pp.exponent == 1)
    }

    /// Re-checks every invariant: product, ordering, primality.
    pub fn check(&self) -> Result<()> {
        if self.product() != *self.base.as_biguint() {
            return Err(Error::Invariant(format!(
                "factorization of {} does not multiply back",
                self.base
            )));
        }
        for w in self.factors.windows(2) {
            if w[0].prime >= w[1].prime {
                return Err(Error::Invariant("primes not strictly increasing".into()));
            }
        }
        for pp in &self.factors {
            if pp.exponent == 0 || !is_prime(&pp.prime) {
                return Err(Error::Invariant(format!("{} is not a prime power factor", pp.prime)));
            }
        }
        Ok(())
    }
}

fn small_primes(cutoff: u64) -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    const TABLE_LIMIT: u64 = 1 << 20;
    let table = TABLE.get_or_init(|| primes_up_to(TABLE_LIMIT));
    let end = table.partition_point(|&p| p < cutoff.min(TABLE_LIMIT));
    &table[..end]
}

pub fn factor(n: &BigUint) -> Result<Factorization> {
    factor_with(n, &FactorBudget::default())
}

pub fn factor_u64(n: u64) -> Result<Factorization> {
    factor(&BigUint::from(n))
}

pub fn factor_with(n: &BigUint, budget: &FactorBudget) -> Result<Factorization> {
    if n < &BigUint::from(2u32) {
        return Err(domain(format!("cannot factor {n}: need n >= 2")));
    }
    let mut found: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut rest = n.clone();
    let primes = small_primes(budget.trial_cutoff);
    let mut settled = false;
    for &p in primes {
        if BigUint::from(p) * p > rest {
            settled = true;
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            found.insert(BigUint::from(p), e);
        }
    }
    let mut stack = Vec::new();
    if !rest.is_one() {
        if settled {
            // no factor <= sqrt(rest) remains
            *found.entry(rest).or_insert(0) += 1;
        } else {
            stack.push(rest);
        }
    }
    let mut seed = 1u64;
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_prime(&c) {
            *found.entry(c).or_insert(0) += 1;
            continue;
        }
        if c.bits() > budget.cofactor_bits as u64 {
            return Err(Error::BudgetExceeded {
                n: n.to_string(),
                budget_bits: budget.cofactor_bits,
            });
        }
        if let Some((root, k)) = perfect_power(&c) {
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        let d = split(&c, &mut seed, budget.rho_iterations).ok_or_else(|| Error::BudgetExceeded {
            n: n.to_string(),
            budget_bits: budget.cofactor_bits,
        })?;
        let other = &c / &d;
        stack.push(d);
        stack.push(other);
    }
    let result = Factorization {
        base: Natural::from(n.clone()),
        factors: found
            .into_iter()
            .map(|(prime, exponent)| PrimePower {
                prime: prime.into(),
                exponent,
            })
            .collect(),
    };
    result.check()?;
    Ok(result)
}

fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    for k in 2..=(n.bits() as u32) {
        let r = n.nth_root(k);
        if r < BigUint::from(2u32) {
            break;
        }
        if r.pow(k) == *n {
            return Some((r, k));
        }
    }
    None
}

/// Finds a nontrivial divisor of the odd composite `n`.
fn split(n: &BigUint, seed: &mut u64, mut iterations: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    while iterations > 0 {
        let c = *seed;
        *seed += 1;
        let (found, used) = match n.to_u128().and_then(Mont128::new) {
            Some(ctx) => {
                let (d, used) = brent_u128(&ctx, c as u128, iterations);
                (d.map(BigUint::from), used)
            }
            None => brent_big(n, &BigUint::from(c), iterations),
        };
        iterations = iterations.saturating_sub(used.max(1));
        if let Some(d) = found {
            return Some(d);
        }
    }
    None
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

const BATCH: u64 = 128;

fn brent_u128(ctx: &Mont128, c: u128, cap: u64) -> (Option<u128>, u64) {
    let n = ctx.modulus();
    let c = ctx.to_mont(c);
    let f = |y: u128| ctx.add(ctx.mul(y, y), c);
    let diff = |a: u128, b: u128| a.abs_diff(b);
    let mut y = ctx.to_mont(2);
    let mut x = y;
    let mut ys = y;
    let mut q = ctx.one();
    let mut g = 1u128;
    let mut r = 1u64;
    let mut used = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = ctx.mul(q, diff(x, y));
            }
            g = gcd_u128(q, n);
            k += BATCH;
        }
        used += 2 * r;
        r *= 2;
        if used > cap {
            return (None, used);
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u128(diff(x, ys), n);
            if g > 1 {
                break;
            }
        }
    }
    ((g != n).then_some(g), used)
}

fn brent_big(n: &BigUint, c: &BigUint, cap: u64) -> (Option<BigUint>, u64) {
    let f = |y: &BigUint| (y * y + c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut r = 1u64;
    let mut used = 0u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..BATCH.min(r - k) {
                y = f(&y);
                q = q * diff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += BATCH;
        }
        used += 2 * r;
        r *= 2;
        if used > cap {
            return (None, used);
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    ((&g != n).then_some(g), used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(f: &Factorization) -> Vec<(u128, u32)> {
        f.factors
            .iter()
            .map(|pp| (pp.prime.to_u128().unwrap(), pp.exponent))
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(pairs(&factor_u64(12).unwrap()), vec![(2, 2), (3, 1)]);
        assert_eq!(pairs(&factor_u64(2047).unwrap()), vec![(23, 1), (89, 1)]);
        assert_eq!(pairs(&factor_u64(8191).unwrap()), vec![(8191, 1)]);
        assert!(matches!(factor_u64(1), Err(Error::Domain(_))));
        assert!(matches!(factor_u64(0), Err(Error::Domain(_))));
    }

    #[test]
    fn mersenne_composites() {
        let m = |p: u32| (BigUint::one() << p) - 1u32;
        assert_eq!(
            pairs(&factor(&m(67)).unwrap()),
            vec![(193_707_721, 1), (761_838_257_287, 1)]
        );
        assert_eq!(
            pairs(&factor(&m(79)).unwrap()),
            vec![(2687, 1), (202_029_703, 1), (1_113_491_139_767, 1)]
        );
        assert_eq!(
            pairs(&factor(&m(113)).unwrap()),
            vec![
                (3391, 1),
                (23279, 1),
                (65993, 1),
                (1_868_569, 1),
                (1_066_818_132_868_207, 1)
            ]
        );
    }

    #[test]
    fn semiprime_beyond_trial_range() {
        let p = 4_294_967_311u128; // smallest prime above 2^32
        let q = 1_000_000_000_039u128;
        let f = factor(&BigUint::from(p * q)).unwrap();
        assert_eq!(pairs(&f), vec![(p, 1), (q, 1)]);
        let sq = factor(&BigUint::from(q * q)).unwrap();
        assert_eq!(pairs(&sq), vec![(q, 2)]);
    }

    #[test]
    fn budget_is_enforced() {
        // 2^101 - 1 = 7432339208719 * 341117531003194129, a 101-bit composite
        let n = (BigUint::one() << 101u32) - 1u32;
        match factor(&n) {
            Err(Error::BudgetExceeded { n: named, budget_bits }) => {
                assert_eq!(named, n.to_string());
                assert_eq!(budget_bits, 96);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        let wide = FactorBudget {
            cofactor_bits: 128,
            ..FactorBudget::default()
        };
        let f = factor_with(&n, &wide).unwrap();
        assert_eq!(
            pairs(&f),
            vec![(7_432_339_208_719, 1), (341_117_531_003_194_129, 1)]
        );
    }

    #[test]
    fn large_prime_cofactor_is_accepted() {
        // 2^83 - 1 = 167 * 57912614113275649087721
        let n = (BigUint::one() << 83u32) - 1u32;
        let f = factor(&n).unwrap();
        assert_eq!(pairs(&f), vec![(167, 1), (57_912_614_113_275_649_087_721, 1)]);
    }

    #[test]
    fn big_omega_and_omega() {
        let f = factor_u64(720).unwrap();
        assert_eq!(f.omega(), 3);
        assert_eq!(f.big_omega(), 7);
        assert!(!f.is_squarefree());
    }
}
