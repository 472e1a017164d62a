use serde::{Deserialize, Serialize};

use crate::cover::ExponentBound;
use crate::error::{domain, Result};

/// The range `[N, upper]` of candidate primes and the exponent cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchWindow {
    #[serde(rename = "N")]
    pub n: u64,
    pub upper: u64,
    pub i_max: u64,
}

impl SearchWindow {
    /// `[N, floor((1 + 1/K) N)]` with `i_max` from `bound` (natural log).
    pub fn for_target(n: u64, k: u64, bound: ExponentBound) -> Result<Self> {
        if k == 0 {
            return Err(domain("K must be positive"));
        }
        Self::new(n, n + n / k, bound.max_exponent(k, n))
    }

    pub fn new(n: u64, upper: u64, i_max: u64) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("window start N = {n} must be >= 2")));
        }
        if upper <= n {
            return Err(domain(format!("window upper {upper} must exceed N = {n}")));
        }
        if i_max < 1 {
            return Err(domain("i_max must be >= 1"));
        }
        Ok(SearchWindow { n, upper, i_max })
    }

    pub fn width(&self) -> u64 {
        self.upper - self.n
    }
}
