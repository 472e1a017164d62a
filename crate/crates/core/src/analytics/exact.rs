//! Exact rational sums with a shared denominator.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{domain, Result};
use crate::ntcore::factor_u64;

/// `Σ num/den` as a reduced rational.
///
/// The terms are brought over the least common denominator built from the
/// prime factorizations of the denominators, so the only big gcd is the
/// final reduction.
pub fn exact_sum(terms: &[(u64, u64)]) -> Result<BigRational> {
    if terms.iter().any(|&(_, den)| den == 0) {
        return Err(domain("exact_sum: zero denominator"));
    }
    let mut exponents: BTreeMap<u64, u32> = BTreeMap::new();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    for &(_, den) in terms {
        if den == 1 || !seen.insert(den) {
            continue;
        }
        for pp in factor_u64(den)?.factors {
            let p = pp.prime.to_u64().expect("factor of a u64");
            let e = exponents.entry(p).or_insert(0);
            *e = (*e).max(pp.exponent);
        }
    }
    let mut lcm = BigUint::from(1u32);
    for (&p, &e) in &exponents {
        lcm *= BigUint::from(p).pow(e);
    }
    let mut numerator = BigUint::zero();
    for &(num, den) in terms {
        if num != 0 {
            numerator += (&lcm / den) * num;
        }
    }
    Ok(BigRational::new(numerator.into(), lcm.into()))
}
