//! Segmented sieve of Eratosthenes over odd numbers.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::ToPrimitive;

use super::primality::is_prime;
use crate::error::{domain, Result};
use crate::natural::Natural;

/// Segment length (in integers) used when none is given.
pub const DEFAULT_SEGMENT: u64 = 1 << 18;

/// Ranges whose upper end exceeds this are tested one candidate at a time.
const SIEVE_CEILING: u64 = 1 << 48;

/// Simple sieve returning all primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime_segmented(0, n, DEFAULT_SEGMENT, |p| out.push(p));
    out
}

fn base_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Calls `f` on every prime in `[lo, hi]` in ascending order.
///
/// `segment` is the window length processed per pass; results do not depend
/// on it.
pub fn for_each_prime_segmented(lo: u64, hi: u64, segment: u64, mut f: impl FnMut(u64)) {
    if hi < 2 || lo > hi {
        return;
    }
    let lo = lo.max(2);
    if lo <= 2 {
        f(2);
    }
    let segment = segment.max(64);
    let base = base_primes(hi.sqrt());
    // odd numbers only; index i stands for start + 2i
    let mut start = if lo.is_multiple_of(2) { lo + 1 } else { lo }.max(3);
    let mut marks: Vec<bool> = Vec::new();
    while start <= hi {
        let end = hi.min(start.saturating_add(segment - 1));
        let len = ((end - start) / 2 + 1) as usize;
        marks.clear();
        marks.resize(len, true);
        for &p in base.iter().skip(1) {
            let sq = p * p;
            if sq > end {
                break;
            }
            let mut first = if sq >= start {
                sq
            } else {
                start.div_ceil(p) * p
            };
            if first % 2 == 0 {
                first += p;
            }
            let mut idx = ((first - start) / 2) as usize;
            while idx < len {
                marks[idx] = false;
                idx += p as usize;
            }
        }
        for (i, &m) in marks.iter().enumerate() {
            if m {
                f(start + 2 * i as u64);
            }
        }
        if end >= hi {
            break;
        }
        start = if end % 2 == 0 { end + 1 } else { end + 2 };
    }
}

pub fn primes_in_range_u64(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if hi <= SIEVE_CEILING {
        for_each_prime_segmented(lo, hi, DEFAULT_SEGMENT, |p| out.push(p));
    } else {
        let mut n = lo;
        loop {
            if super::primality::is_prime_u64(n) {
                out.push(n);
            }
            if n == hi {
                break;
            }
            n += 1;
        }
    }
    out
}

/// All primes `p` with `lo <= p <= hi`, ascending.
pub fn primes_in_range(lo: &BigUint, hi: &BigUint) -> Result<Vec<Natural>> {
    if lo > hi {
        return Err(domain(format!("empty range: lo {lo} > hi {hi}")));
    }
    if let (Some(l), Some(h)) = (lo.to_u64(), hi.to_u64()) {
        return Ok(primes_in_range_u64(l, h).into_iter().map(Natural::from).collect());
    }
    let mut out = Vec::new();
    let mut n = lo.clone();
    while &n <= hi {
        if is_prime(&n) {
            out.push(Natural::from(n.clone()));
        }
        n += 1u32;
    }
    Ok(out)
}

/// π(x) by segmented sieve.
pub fn prime_count(x: u64) -> u64 {
    prime_count_with_segment(x, DEFAULT_SEGMENT)
}

pub fn prime_count_with_segment(x: u64, segment: u64) -> u64 {
    let mut count = 0;
    for_each_prime_segmented(0, x, segment, |_| count += 1);
    count
}
