//! Diagnostics for residue-class covers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Default ceiling on the lcm of the moduli for [`verify_cover`].
pub const DEFAULT_LCM_BOUND: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCheck {
    pub covered: bool,
    /// Least residue modulo the lcm that no class contains.
    pub uncovered: Option<u64>,
    pub lcm: u64,
}

/// Whether the classes `r (mod m)` contain every integer, checked
/// exhaustively modulo the lcm of the moduli.
pub fn verify_cover(classes: &[(u64, u64)], lcm_bound: u64) -> Result<CoverCheck> {
    let mut lcm = 1u64;
    for &(_, m) in classes {
        if m == 0 {
            return Err(domain("cover modulus must be >= 1"));
        }
        lcm = lcm
            .checked_mul(m / lcm.gcd(&m))
            .filter(|&v| v <= lcm_bound)
            .ok_or_else(|| Error::Guard(format!("lcm of cover moduli exceeds {lcm_bound}")))?;
    }
    let mut hit = vec![false; lcm as usize];
    for &(r, m) in classes {
        let mut x = r % m;
        while x < lcm {
            hit[x as usize] = true;
            x += m;
        }
    }
    let uncovered = hit.iter().position(|&h| !h).map(|x| x as u64);
    Ok(CoverCheck {
        covered: uncovered.is_none(),
        uncovered,
        lcm,
    })
}

/// `1 - Π (1 - 1/p)`: the share of residues modulo `Π p` hit by one class
/// per prime modulus.
pub fn coverage_density(moduli: &[u64]) -> Result<BigRational> {
    let mut sorted = moduli.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(domain("coverage_density: repeated modulus"));
    }
    if sorted.iter().any(|&p| p < 2) {
        return Err(domain("coverage_density: modulus below 2"));
    }
    let mut uncovered = BigRational::one();
    for &p in &sorted {
        let p = BigRational::from_integer(BigUint::from(p).into());
        uncovered *= (&p - BigRational::one()) / p;
    }
    Ok(BigRational::one() - uncovered)
}

/// Lossy view of a density for display.
pub fn density_f64(d: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if d.is_zero() {
        return 0.0;
    }
    d.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cover_examples() {
        assert!(verify_cover(&[(0, 2), (1, 2)], DEFAULT_LCM_BOUND).unwrap().covered);
        let erdos = [(0, 2), (0, 3), (1, 4), (5, 6), (7, 12)];
        assert!(verify_cover(&erdos, DEFAULT_LCM_BOUND).unwrap().covered);
        let gap = verify_cover(&[(0, 2), (1, 4)], DEFAULT_LCM_BOUND).unwrap();
        assert!(!gap.covered);
        assert_eq!(gap.uncovered, Some(3));
        assert!(verify_cover(&[], DEFAULT_LCM_BOUND).unwrap().uncovered == Some(0));
        assert!(matches!(verify_cover(&[(0, 1_000_003), (0, 1_000_033)], 1_000_000), Err(Error::Guard(_))));
        assert!(verify_cover(&[(0, 0)], DEFAULT_LCM_BOUND).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(coverage_density(&[]).unwrap(), ratio(0, 1));
        assert_eq!(coverage_density(&[5]).unwrap(), ratio(1, 5));
        assert_eq!(coverage_density(&[3, 5]).unwrap(), ratio(7, 15));
        assert!(coverage_density(&[3, 3]).is_err());
    }
}
