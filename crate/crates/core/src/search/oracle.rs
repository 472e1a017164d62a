//! Brute-force ground truth: every prime in the window, every form tested
//! directly, no covering system involved.

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;
use rayon::prelude::*;

use super::window::SearchWindow;
use crate::cover::TargetConfig;
use crate::error::{Error, Result};
use crate::ntcore::{is_prime, primes_in_range};

/// Widest window the oracle accepts.
pub const ORACLE_MAX_WIDTH: u64 = 1_000_000;

/// Primes `m` in `[N, upper]` for which every in-scope `|k·m + j·a^i + l|`
/// with `j·a^i + l ≠ 0` is composite.
pub fn brute_oracle(window: &SearchWindow, config: &TargetConfig) -> Result<Vec<u64>> {
    if window.width() > ORACLE_MAX_WIDTH {
        return Err(Error::Guard(format!(
            "oracle window width {} exceeds {ORACLE_MAX_WIDTH}",
            window.width()
        )));
    }
    let primes = primes_in_range(&BigUint::from(window.n), &BigUint::from(window.upper))?;
    let triples = config.triples();
    let survivors = primes
        .par_iter()
        .filter(|m| {
            let m = BigInt::from(m.as_biguint().clone());
            (1..=config.k).all(|a| {
                let top = if a == 1 { 1 } else { window.i_max };
                (1..=top).all(|i| {
                    let power = BigInt::from(a).pow(i as u32);
                    triples.iter().all(|t| {
                        let offset = BigInt::from(t.j) * &power + t.l;
                        if offset == BigInt::ZERO {
                            return true;
                        }
                        let v = (BigInt::from(t.k) * &m + offset).abs().to_biguint().expect("abs");
                        v > BigUint::from(1u32) && !is_prime(&v)
                    })
                })
            })
        })
        .map(|m| m.to_u64().expect("window bounds are u64"))
        .collect();
    Ok(survivors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::ExponentBound;

    #[test]
    fn window_without_primes() {
        let cfg = TargetConfig::new(2, vec![5, 7], 2);
        let w = SearchWindow::new(24, 28, 3).unwrap();
        assert!(brute_oracle(&w, &cfg).unwrap().is_empty());
    }

    #[test]
    fn guard() {
        let cfg = TargetConfig::new(2, vec![5, 7], 2);
        let w = SearchWindow::new(2, 2_000_000, 3).unwrap();
        assert!(matches!(brute_oracle(&w, &cfg), Err(Error::Guard(_))));
    }

    #[test]
    fn survivors_have_only_composite_forms() {
        let cfg = TargetConfig::new(2, vec![5, 7], 2);
        let w = SearchWindow::for_target(200, 2, ExponentBound::Inclusive).unwrap();
        for m in brute_oracle(&w, &cfg).unwrap() {
            // spot check the a = 1 forms by hand: m + j + l and 2m + j + l
            for k in [1i64, 2] {
                for j in [-2i64, -1, 1, 2] {
                    for l in [5i64, 7] {
                        let v = (k * m as i64 + j + l).unsigned_abs();
                        assert!(v > 1 && !crate::ntcore::is_prime_u64(v), "m={m} k={k} j={j} l={l}");
                    }
                }
            }
        }
    }
}
