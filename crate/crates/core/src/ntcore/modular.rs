//! Modular arithmetic: powers, inverses, multiplicative orders, CRT, and
//! the exponent cosets `{i : j·a^i + l ≡ 0 (mod d)}`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::arith::{mul_mod_u64, pow_mod_u64};
use super::factor::{factor, factor_u64};
use super::primality::is_prime;
use crate::error::{domain, Error, Result};
use crate::natural::Natural;

pub fn mod_pow(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus.is_zero() {
        return Err(domain("mod_pow with modulus 0"));
    }
    Ok(base.modpow(exponent, modulus))
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(a % m);
    let m_signed = BigInt::from(m.clone());
    let ext = a.extended_gcd(&m_signed);
    if !ext.gcd.is_one() {
        return None;
    }
    ext.x.mod_floor(&m_signed).to_biguint()
}

pub fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let ext = (a as i128 % m as i128).extended_gcd(&(m as i128));
    (ext.gcd == 1).then(|| ext.x.rem_euclid(m as i128) as u64)
}

/// Least `e >= 1` with `a^e ≡ 1 (mod q)` for a prime `q` not dividing `a`.
///
/// Factors `q - 1` and strips prime factors from it while the power stays 1.
pub fn multiplicative_order(a: &BigUint, q: &BigUint) -> Result<Natural> {
    if !is_prime(q) {
        return Err(domain(format!("multiplicative_order: modulus {q} is not prime")));
    }
    let a = a % q;
    if a.is_zero() {
        return Err(domain(format!("multiplicative_order: {q} divides the base")));
    }
    let q_minus_one = q - 1u32;
    if q_minus_one.is_one() {
        return Ok(Natural::from(1u32));
    }
    let group = factor(&q_minus_one)?;
    let mut e = q_minus_one;
    for r in group.primes() {
        let r = r.as_biguint();
        while (&e % r).is_zero() {
            let candidate = &e / r;
            if a.modpow(&candidate, q).is_one() {
                e = candidate;
            } else {
                break;
            }
        }
    }
    Ok(Natural::from(e))
}

/// Order of `a` modulo any `n >= 2` with `gcd(a, n) = 1`.
pub fn order_mod(a: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(domain(format!("order modulo {n}")));
    }
    if a.gcd(&n) != 1 {
        return Err(domain(format!("{a} is not a unit modulo {n}")));
    }
    let fac = factor_u64(n)?;
    // Carmichael-style exponent: lcm over prime powers of phi(p^k)
    let mut exponent = 1u64;
    let mut group_primes: Vec<u64> = Vec::new();
    for pp in &fac.factors {
        let p = pp.prime.to_u64().expect("factor of a u64");
        let phi = (p - 1) * p.pow(pp.exponent - 1);
        exponent = exponent.lcm(&phi);
        if pp.exponent > 1 {
            group_primes.push(p);
        }
        if p > 2 {
            for r in factor_u64(p - 1)?.primes() {
                group_primes.push(r.to_u64().expect("factor of a u64"));
            }
        }
    }
    group_primes.sort_unstable();
    group_primes.dedup();
    let mut e = exponent;
    for r in group_primes {
        while e.is_multiple_of(r) && pow_mod_u64(a, e / r, n) == 1 {
            e /= r;
        }
    }
    Ok(e)
}

/// Combines `x ≡ r_t (mod m_t)` for pairwise coprime moduli.
///
/// Returns `(b, W)` with `W = Π m_t` and `0 <= b < W`; the empty system is
/// `(0, 1)`.
pub fn crt_combine(congruences: &[(BigUint, BigUint)]) -> Result<(BigUint, BigUint)> {
    for (r, m) in congruences {
        if m < &BigUint::from(2u32) {
            return Err(domain(format!("CRT modulus {m} must be >= 2")));
        }
        if r >= m {
            return Err(domain(format!("CRT residue {r} not reduced modulo {m}")));
        }
    }
    for (i, (_, mi)) in congruences.iter().enumerate() {
        for (_, mj) in &congruences[i + 1..] {
            if !mi.gcd(mj).is_one() {
                return Err(Error::CrtConflict {
                    first: mi.to_string(),
                    second: mj.to_string(),
                });
            }
        }
    }
    let mut b = BigUint::zero();
    let mut w = BigUint::one();
    for (r, m) in congruences {
        // b + w*t ≡ r (mod m)
        let inv = mod_inverse(&w, m).expect("coprimality checked above");
        let delta = (BigInt::from(r.clone()) - BigInt::from(&b % m)).mod_floor(&BigInt::from(m.clone()));
        let t = delta.to_biguint().expect("non-negative") * inv % m;
        b += &w * t;
        w *= m;
    }
    Ok((b, w))
}

/// Merges two residue classes with possibly non-coprime moduli.
pub fn crt_pair_general(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    let g = m1.gcd(&m2);
    if (r1 as i128 - r2 as i128).rem_euclid(g as i128) != 0 {
        return None;
    }
    let lcm = (m1 / g) as u128 * m2 as u128;
    let lcm = u64::try_from(lcm).ok()?;
    let m1g = m1 / g;
    let m2g = m2 / g;
    let inv = mod_inverse_u64(m1g % m2g.max(1), m2g.max(1))?;
    let diff = ((r2 as i128 - r1 as i128) / g as i128).rem_euclid(m2g.max(1) as i128) as u64;
    let t = mul_mod_u64(diff, inv, m2g.max(1));
    let x = (r1 as u128 + m1 as u128 * t as u128) % lcm as u128;
    Some((x as u64, lcm))
}

/// Exponents `i >= 1` solving `j·a^i + l ≡ 0 (mod d)`: exactly the `i` with
/// `i ≡ first (mod period)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentCoset {
    /// Least positive solution.
    pub first: u64,
    /// Period of the solution set; equals `ord_d(a)` whenever `gcd(j, d) = 1`.
    pub period: u64,
}

impl ExponentCoset {
    pub fn contains(&self, i: u64) -> bool {
        i >= 1 && i % self.period == self.first % self.period
    }
}

/// Largest order for which a discrete-log table is built.
const DLOG_ORDER_LIMIT: u64 = 1 << 44;

/// Least positive `e` with `j·a^e + l ≡ 0 (mod d)`, together with the period
/// of the full solution set, or `None` if no exponent works.
pub fn form_exponent_order(a: u64, j: i64, l: i64, d: u64) -> Result<Option<ExponentCoset>> {
    if d < 2 {
        return Err(domain(format!("form_exponent_order: modulus {d} must be >= 2")));
    }
    if a.gcd(&d) != 1 {
        return Err(domain(format!("form_exponent_order: gcd({a}, {d}) > 1")));
    }
    let fac = factor_u64(d)?;
    let mut acc = (0u64, 1u64);
    for pp in &fac.factors {
        let p = pp.prime.to_u64().expect("factor of a u64");
        let Some((r, m)) = prime_power_coset(a, j, l, p, pp.exponent)? else {
            return Ok(None);
        };
        match crt_pair_general(acc.0, acc.1, r, m) {
            Some(next) => acc = next,
            None => return Ok(None),
        }
    }
    let (r, period) = acc;
    let first = if r == 0 { period } else { r };
    Ok(Some(ExponentCoset { first, period }))
}

/// Solutions of `j·a^i + l ≡ 0 (mod p^k)` as a class `i ≡ r (mod m)`.
pub(crate) fn prime_power_coset(a: u64, j: i64, l: i64, p: u64, k: u32) -> Result<Option<(u64, u64)>> {
    let n = p.checked_pow(k).ok_or_else(|| domain("prime power overflows u64"))?;
    let reduce = |v: i64, m: u64| (v as i128).rem_euclid(m as i128) as u64;
    if j == 0 {
        return Ok((reduce(l, n) == 0).then_some((0, 1)));
    }
    let mut s = 0u32;
    let mut jj = j as i128;
    while s < k && jj % p as i128 == 0 {
        jj /= p as i128;
        s += 1;
    }
    if s == k {
        return Ok((reduce(l, n) == 0).then_some((0, 1)));
    }
    let ps = p.pow(s);
    if (l as i128) % ps as i128 != 0 {
        return Ok(None);
    }
    let reduced = p.pow(k - s);
    let j_unit = jj.rem_euclid(reduced as i128) as u64;
    let l_red = ((l as i128) / ps as i128).rem_euclid(reduced as i128) as u64;
    let j_inv = mod_inverse_u64(j_unit, reduced).expect("j reduced to a unit");
    let target = mul_mod_u64((reduced - l_red) % reduced, j_inv, reduced);
    if target.gcd(&reduced) != 1 {
        return Ok(None);
    }
    if reduced == 1 {
        return Ok(Some((0, 1)));
    }
    let ord = order_mod(a % reduced, reduced)?;
    Ok(discrete_log(a % reduced, target, reduced, ord)?.map(|x| (x, ord)))
}

/// Least `x` in `[0, ord)` with `base^x ≡ target (mod n)` where `ord` is the
/// order of `base`.
pub fn discrete_log(base: u64, target: u64, n: u64, ord: u64) -> Result<Option<u64>> {
    if ord > DLOG_ORDER_LIMIT {
        return Err(Error::Guard(format!("discrete log with order {ord} modulo {n}")));
    }
    let target = target % n;
    if ord <= 4096 {
        let mut x = 1 % n;
        for e in 0..ord {
            if x == target {
                return Ok(Some(e));
            }
            x = mul_mod_u64(x, base, n);
        }
        return Ok(None);
    }
    let step = (ord as f64).sqrt().ceil() as u64;
    let mut baby: HashMap<u64, u64> = HashMap::with_capacity(step as usize);
    let mut x = 1 % n;
    for e in 0..step {
        baby.entry(x).or_insert(e);
        x = mul_mod_u64(x, base, n);
    }
    let giant = mod_inverse_u64(pow_mod_u64(base, step, n), n).expect("base is a unit");
    let mut gamma = target;
    for i in 0..step {
        if let Some(&e) = baby.get(&gamma) {
            let x = i * step + e;
            if x < ord {
                return Ok(Some(x));
            }
        }
        gamma = mul_mod_u64(gamma, giant, n);
    }
    Ok(None)
}

/// `j·a^i + l` reduced modulo `m`.
pub fn form_residue(a: u64, i: u64, j: i64, l: i64, m: u64) -> u64 {
    let mm = m as i128;
    let ai = pow_mod_u64(a, i, m) as i128;
    ((j as i128).rem_euclid(mm) * ai % mm + (l as i128).rem_euclid(mm)).rem_euclid(mm) as u64
}

/// `|v|` for a signed big integer, as a natural.
pub fn abs_natural(v: &BigInt) -> BigUint {
    v.abs().to_biguint().expect("absolute value")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&big(7), &big(0), &big(13)).unwrap(), big(1));
        assert_eq!(mod_pow(&big(2), &big(5), &big(31)).unwrap(), big(1));
        assert_eq!(mod_pow(&big(2), &big(10), &big(1000)).unwrap(), big(24));
        assert!(mod_pow(&big(2), &big(10), &big(0)).is_err());
        assert_eq!(mod_pow(&big(2), &big(10), &big(1)).unwrap(), big(0));
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(&big(32), &big(31)).unwrap(), Natural::from(1u32));
        assert_eq!(multiplicative_order(&big(2), &big(31)).unwrap(), Natural::from(5u32));
        assert_eq!(multiplicative_order(&big(2), &big(23)).unwrap(), Natural::from(11u32));
        assert!(multiplicative_order(&big(2), &big(21)).is_err());
        assert!(multiplicative_order(&big(62), &big(31)).is_err());
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert_eq!(multiplicative_order(&big(2), &m127).unwrap(), Natural::from(127u32));
    }

    #[test]
    fn order_mod_composite() {
        assert_eq!(order_mod(2, 15).unwrap(), 4);
        assert_eq!(order_mod(3, 25).unwrap(), 20);
        assert_eq!(order_mod(2, 31 * 89).unwrap(), 55);
        assert!(order_mod(2, 12).is_err());
    }

    #[test]
    fn crt_examples() {
        let c = |v: &[(u64, u64)]| {
            crt_combine(&v.iter().map(|&(r, m)| (big(r), big(m))).collect::<Vec<_>>())
        };
        assert_eq!(c(&[]).unwrap(), (big(0), big(1)));
        assert_eq!(c(&[(3, 7)]).unwrap(), (big(3), big(7)));
        assert_eq!(c(&[(0, 3), (1, 5)]).unwrap(), (big(6), big(15)));
        assert_eq!(c(&[(25, 31), (85, 89)]).unwrap(), (big(1420), big(2759)));
        match c(&[(1, 6), (1, 5), (2, 9)]) {
            Err(Error::CrtConflict { first, second }) => {
                assert_eq!((first.as_str(), second.as_str()), ("6", "9"));
            }
            other => panic!("{other:?}"),
        }
        assert!(c(&[(7, 7)]).is_err());
        assert!(c(&[(0, 1)]).is_err());
    }

    #[test]
    fn general_crt() {
        assert_eq!(crt_pair_general(2, 4, 0, 6), Some((6, 12)));
        assert_eq!(crt_pair_general(1, 4, 0, 6), None);
        assert_eq!(crt_pair_general(0, 1, 3, 5), Some((3, 5)));
    }

    #[test]
    fn exponent_order_examples() {
        assert_eq!(
            form_exponent_order(2, 1, -1, 31).unwrap(),
            Some(ExponentCoset { first: 5, period: 5 })
        );
        assert_eq!(
            form_exponent_order(2, 1, 1, 5).unwrap(),
            Some(ExponentCoset { first: 2, period: 4 })
        );
        assert_eq!(form_exponent_order(2, 1, -3, 7).unwrap(), None);
        assert!(form_exponent_order(2, 1, 1, 10).is_err());
        assert!(form_exponent_order(2, 1, 1, 1).is_err());
    }

    #[test]
    fn exponent_order_is_not_a_divisibility_rule() {
        // solutions are 2, 6, 10, ...; 4 is a multiple of 2 but not a solution
        let coset = form_exponent_order(2, 1, 1, 5).unwrap().unwrap();
        assert!(coset.contains(6));
        assert!(!coset.contains(4));
        assert_eq!(form_residue(2, 4, 1, 1, 5), 2);
    }

    #[test]
    fn degenerate_coefficient_cases() {
        // 5 | j and 5 | l: every exponent works
        assert_eq!(
            form_exponent_order(2, 5, 10, 5).unwrap(),
            Some(ExponentCoset { first: 1, period: 1 })
        );
        // 5 | j but not l: nothing works
        assert_eq!(form_exponent_order(2, 5, 3, 5).unwrap(), None);
        // 25 = 5^2 with 5 || j: reduce to 2^i ≡ -3 (mod 5), so i ≡ 1 (mod 4)
        assert_eq!(
            form_exponent_order(2, 5, 15, 25).unwrap(),
            Some(ExponentCoset { first: 1, period: 4 })
        );
    }

    #[test]
    fn discrete_log_large_order() {
        let n = 1_000_003u64; // prime, 2 is a primitive root? check via order
        let ord = order_mod(2, n).unwrap();
        let target = pow_mod_u64(2, 777_777 % ord, n);
        assert_eq!(discrete_log(2, target, n, ord).unwrap(), Some(777_777 % ord));
    }
}
