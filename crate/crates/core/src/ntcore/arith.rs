//! Fixed-width modular kernels: u64 with u128 intermediates, and a
//! Montgomery context for odd moduli below 2^127.

#[inline]
pub fn mul_mod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, n);
        }
        base = mul_mod_u64(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Full 128x128 -> 256 bit product as (hi, lo).
#[inline]
fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let lo = (ll & MASK) | (mid << 64);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

/// Montgomery arithmetic with R = 2^128 for an odd modulus n < 2^127.
#[derive(Debug, Clone, Copy)]
pub struct Mont128 {
    n: u128,
    neg_inv: u128,
    r2: u128,
    one: u128,
}

impl Mont128 {
    pub fn new(n: u128) -> Option<Self> {
        if n < 3 || n & 1 == 0 || n >> 127 != 0 {
            return None;
        }
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        debug_assert_eq!(n.wrapping_mul(inv), 1);
        let one = (u128::MAX % n + 1) % n;
        let mut r2 = one;
        for _ in 0..128 {
            r2 <<= 1;
            if r2 >= n {
                r2 -= n;
            }
        }
        Some(Mont128 {
            n,
            neg_inv: inv.wrapping_neg(),
            r2,
            one,
        })
    }

    #[inline]
    pub fn modulus(&self) -> u128 {
        self.n
    }

    #[inline]
    pub fn one(&self) -> u128 {
        self.one
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = widening_mul(a, b);
        let m = lo.wrapping_mul(self.neg_inv);
        let (mh, ml) = widening_mul(m, self.n);
        let (_, carry) = lo.overflowing_add(ml);
        let t = hi + mh + carry as u128;
        if t >= self.n {
            t - self.n
        } else {
            t
        }
    }

    #[inline]
    pub fn to_mont(&self, x: u128) -> u128 {
        self.mul(x % self.n, self.r2)
    }

    #[inline]
    pub fn from_mont(&self, x: u128) -> u128 {
        self.mul(x, 1)
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.n - b
        }
    }

    /// `base^exp` with both input and output in Montgomery form.
    pub fn pow(&self, base: u128, mut exp: u128) -> u128 {
        let mut acc = self.one;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }
}
