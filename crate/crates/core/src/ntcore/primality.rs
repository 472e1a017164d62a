//! Primality testing.
//!
//! Below 2^64 the Miller-Rabin test with the first twelve prime bases is
//! exact. Above that the test runs [`PROBABLE_ROUNDS`] rounds with bases drawn
//! from a ChaCha stream seeded by `n`, so a composite survives with
//! probability at most 4^-65 < 2^-128 and the verdict is reproducible.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arith::{mul_mod_u64, pow_mod_u64, Mont128};

/// Rounds of Miller-Rabin above 2^64.
pub const PROBABLE_ROUNDS: usize = 65;

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Outcome of a primality test, distinguishing exact from probabilistic "prime".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Primality {
    Composite,
    /// Proven prime (deterministic regime, n < 2^64).
    Prime,
    /// Passed the probabilistic test (n >= 2^64); error below 2^-128.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }

    pub fn is_probabilistic(self) -> bool {
        matches!(self, Primality::ProbablePrime)
    }
}

pub fn is_prime(n: &BigUint) -> bool {
    primality(n).is_prime()
}

pub fn primality(n: &BigUint) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    let composite = match n.to_u128() {
        Some(v) => !probable_prime_u128(v),
        None => !probable_prime_big(n),
    };
    if composite {
        Primality::Composite
    } else {
        Primality::ProbablePrime
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    SMALL_PRIMES.iter().all(|&a| strong_probable_prime_u64(n, d, s, a))
}

fn strong_probable_prime_u64(n: u64, d: u64, s: u32, a: u64) -> bool {
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Primality for any u128: exact below 2^64, probabilistic above.
pub fn is_prime_u128(n: u128) -> bool {
    match u64::try_from(n) {
        Ok(small) => is_prime_u64(small),
        Err(_) => probable_prime_u128(n),
    }
}

fn trial_composite(n: &BigUint) -> Option<bool> {
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return Some(n != &BigUint::from(p));
        }
    }
    None
}

fn seeded_rng(n: &BigUint) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    for (i, byte) in n.to_bytes_le().iter().enumerate() {
        seed[i % 32] ^= byte.rotate_left((i / 32) as u32 % 8);
    }
    ChaCha8Rng::from_seed(seed)
}

fn probable_prime_u128(n: u128) -> bool {
    let big = BigUint::from(n);
    if let Some(c) = trial_composite(&big) {
        return !c;
    }
    let Some(ctx) = Mont128::new(n) else {
        return probable_prime_big(&big);
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let one = ctx.one();
    let minus_one = ctx.to_mont(n - 1);
    let witness_ok = |a: u128| {
        let mut x = ctx.pow(ctx.to_mont(a), d);
        if x == one || x == minus_one {
            return true;
        }
        for _ in 1..s {
            x = ctx.mul(x, x);
            if x == minus_one {
                return true;
            }
        }
        false
    };
    if !witness_ok(2) {
        return false;
    }
    let mut rng = seeded_rng(&big);
    (1..PROBABLE_ROUNDS).all(|_| {
        let r = ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128;
        witness_ok(2 + r % (n - 3))
    })
}

fn probable_prime_big(n: &BigUint) -> bool {
    if let Some(c) = trial_composite(n) {
        return !c;
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    let witness_ok = |a: &BigUint| {
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            return true;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_one {
                return true;
            }
        }
        false
    };
    if !witness_ok(&BigUint::from(2u32)) {
        return false;
    }
    let span = n - 3u32;
    let mut rng = seeded_rng(n);
    let nbytes = (n.bits() as usize).div_ceil(8) + 8;
    (1..PROBABLE_ROUNDS).all(|_| {
        let mut buf = vec![0u8; nbytes];
        rng.fill_bytes(&mut buf);
        let a = BigUint::from_bytes_le(&buf) % &span + 2u32;
        witness_ok(&a)
    })
}
