//! Numerical checks of the prime sums behind the construction: Mertens'
//! sum, Chebyshev-type bounds on π(x), Brun-type sums over `p` with
//! `m·p + 1` prime, and the order-weighted sums `E(x)`.
//!
//! Every sum is an exact enumeration over sieved primes. Floating results
//! use compensated summation; the grouping identities are checked in exact
//! rational arithmetic.

mod exact;
mod order_sums;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::ntcore::primality::is_prime_u128;
use crate::ntcore::sieve::{for_each_prime_segmented, DEFAULT_SEGMENT};

pub use exact::exact_sum;
pub use order_sums::{
    e_grouped_exact, e_truncated, e_truncated_exact, order_terms, weighted_order_grouped_exact, weighted_order_sum,
    weighted_order_sum_exact, OrderSum, OrderTerm, MAX_ORDER_SUM_BOUND,
};

/// Tolerance applied to the floating comparisons of the inequality checks.
pub const CHECK_MARGIN: f64 = 1e-9;

/// Neumaier's compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MertensCheck {
    pub x: u64,
    /// `Σ_{p <= x} 1/p`.
    pub sum: f64,
    pub log_log: f64,
    /// `log log x < sum < log log x + 1`, each side by more than the margin.
    pub holds: bool,
}

pub fn mertens_sum(x: u64) -> Result<MertensCheck> {
    mertens_sum_with_segment(x, DEFAULT_SEGMENT)
}

pub fn mertens_sum_with_segment(x: u64, segment: u64) -> Result<MertensCheck> {
    if x < 2 {
        return Err(domain(format!("mertens_sum needs x >= 2 (got {x})")));
    }
    let mut acc = CompensatedSum::default();
    for_each_prime_segmented(0, x, segment, |p| acc.add(1.0 / p as f64));
    let sum = acc.value();
    let log_log = (x as f64).ln().ln();
    Ok(MertensCheck {
        x,
        sum,
        log_log,
        holds: log_log + CHECK_MARGIN < sum && sum < log_log + 1.0 - CHECK_MARGIN,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiBounds {
    pub x: u64,
    pub pi: u64,
    /// `x / ln x · (1 + 1/(2 ln x))`.
    pub lower: f64,
    /// `x / ln x · (1 + 3/(2 ln x))`.
    pub upper: f64,
    pub holds: bool,
}

pub fn pi_bounds_check(x: u64) -> Result<PiBounds> {
    pi_bounds_check_with_segment(x, DEFAULT_SEGMENT)
}

pub fn pi_bounds_check_with_segment(x: u64, segment: u64) -> Result<PiBounds> {
    if x < 59 {
        return Err(domain(format!("pi bounds need x >= 59 (got {x})")));
    }
    let mut pi = 0u64;
    for_each_prime_segmented(0, x, segment, |_| pi += 1);
    let (lower, upper) = pi_bound_values(x);
    let v = pi as f64;
    Ok(PiBounds {
        x,
        pi,
        lower,
        upper,
        holds: lower + CHECK_MARGIN < v && v < upper - CHECK_MARGIN,
    })
}

pub fn pi_bound_values(x: u64) -> (f64, f64) {
    let ln = (x as f64).ln();
    let base = x as f64 / ln;
    (base * (1.0 + 0.5 / ln), base * (1.0 + 1.5 / ln))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrunSum {
    pub m: u64,
    pub x: u64,
    /// `Σ 1/p` over primes `p <= x` with `m·p + 1` prime.
    pub sum: f64,
    /// Contribution of each decade `(10^t, 10^(t+1)]`, clipped to `x`,
    /// keyed by the decade's upper end.
    pub decades: Vec<(u64, f64)>,
}

pub fn brun_pair_sum(m: u64, x: u64) -> Result<BrunSum> {
    brun_pair_sum_with_segment(m, x, DEFAULT_SEGMENT)
}

pub fn brun_pair_sum_with_segment(m: u64, x: u64, segment: u64) -> Result<BrunSum> {
    if m < 2 {
        return Err(domain(format!("brun_pair_sum needs m >= 2 (got {m})")));
    }
    if x < 1 {
        return Err(domain("brun_pair_sum needs x >= 1"));
    }
    let mut total = CompensatedSum::default();
    let mut decades: Vec<(u64, CompensatedSum)> = Vec::new();
    let mut decade_end = 10u64;
    for_each_prime_segmented(0, x, segment, |p| {
        if !is_prime_u128(m as u128 * p as u128 + 1) {
            return;
        }
        while p > decade_end {
            decade_end = decade_end.saturating_mul(10);
        }
        match decades.last_mut() {
            Some((end, acc)) if *end == decade_end => acc.add(1.0 / p as f64),
            _ => {
                let mut acc = CompensatedSum::default();
                acc.add(1.0 / p as f64);
                decades.push((decade_end, acc));
            }
        }
        total.add(1.0 / p as f64);
    });
    Ok(BrunSum {
        m,
        x,
        sum: total.value(),
        decades: decades.into_iter().map(|(end, acc)| (end.min(x), acc.value())).collect(),
    })
}

/// Parameters of the order-sum columns in [`diagnostics`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSumParams {
    #[serde(rename = "K")]
    pub k: u64,
    pub a: u64,
    pub j: i64,
    pub l: i64,
    #[serde(rename = "D")]
    pub d_max: u64,
}

impl Default for OrderSumParams {
    fn default() -> Self {
        OrderSumParams {
            k: 2,
            a: 2,
            j: 1,
            l: 1,
            d_max: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrunColumn {
    pub m: u64,
    pub sum: f64,
}

/// One grid point of the diagnostics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub x: u64,
    pub mertens_sum: f64,
    pub log_log: f64,
    pub mertens_holds: bool,
    pub pi: u64,
    /// Present for `x >= 59`.
    pub pi_lower: Option<f64>,
    pub pi_upper: Option<f64>,
    pub pi_holds: Option<bool>,
    pub brun: Vec<BrunColumn>,
    pub e_value: f64,
    /// `E(x) / ln^2 x`.
    pub e_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsTable {
    pub schema_version: u32,
    pub tool_version: String,
    pub order_sum: OrderSumParams,
    pub brun_multipliers: Vec<u64>,
    pub rows: Vec<DiagnosticsRow>,
}

pub const DIAGNOSTICS_SCHEMA_VERSION: u32 = 1;

/// Evaluates every check at each grid point `x >= 2`, in parallel.
pub fn diagnostics(grid: &[u64], brun_multipliers: &[u64], order: &OrderSumParams) -> Result<DiagnosticsTable> {
    if let Some(&bad) = grid.iter().find(|&&x| x < 2) {
        return Err(domain(format!("grid point {bad} is below 2")));
    }
    let terms = order_terms(order.k, order.a, order.j, order.l, order.d_max)?;
    let rows = grid
        .par_iter()
        .map(|&x| {
            let mertens = mertens_sum(x)?;
            let pi = if x >= 59 { Some(pi_bounds_check(x)?) } else { None };
            let brun = brun_multipliers
                .iter()
                .map(|&m| brun_pair_sum(m, x).map(|b| BrunColumn { m, sum: b.sum }))
                .collect::<Result<Vec<_>>>()?;
            let e = order_sums::e_from_terms(&terms, x, order.d_max);
            Ok(DiagnosticsRow {
                x,
                mertens_sum: mertens.sum,
                log_log: mertens.log_log,
                mertens_holds: mertens.holds,
                pi: pi.map(|p| p.pi).unwrap_or_else(|| crate::ntcore::prime_count(x)),
                pi_lower: pi.map(|p| p.lower),
                pi_upper: pi.map(|p| p.upper),
                pi_holds: pi.map(|p| p.holds),
                brun,
                e_value: e.value,
                e_ratio: e.ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticsTable {
        schema_version: DIAGNOSTICS_SCHEMA_VERSION,
        tool_version: crate::TOOL_VERSION.to_string(),
        order_sum: order.clone(),
        brun_multipliers: brun_multipliers.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mertens_examples() {
        let two = mertens_sum(2).unwrap();
        assert_eq!(two.sum, 0.5);
        assert!((two.log_log + 0.366_512_920_581_664_3).abs() < 1e-12);
        assert!(two.holds);
        let ten = mertens_sum(10).unwrap();
        let want = 0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0;
        assert!((ten.sum - want).abs() < 1e-15);
        assert!((ten.log_log - 0.834_032_445_247_956).abs() < 1e-12);
        assert!(ten.holds);
        assert!(mertens_sum(1).is_err());
    }

    #[test]
    fn pi_examples() {
        let at59 = pi_bounds_check(59).unwrap();
        assert_eq!(at59.pi, 17);
        assert!((at59.lower - 16.243_813_756).abs() < 1e-8 && (at59.upper - 19.792_405_976).abs() < 1e-8);
        assert!(at59.holds);
        let at100 = pi_bounds_check(100).unwrap();
        assert_eq!(at100.pi, 25);
        assert!((at100.lower - 24.072_370_308).abs() < 1e-8 && (at100.upper - 28.787_662_733).abs() < 1e-8);
        assert!(pi_bounds_check(58).is_err());
    }

    #[test]
    fn brun_examples() {
        assert_eq!(brun_pair_sum(2, 1).unwrap().sum, 0.0);
        let two = brun_pair_sum(2, 100).unwrap();
        let want: f64 = [2u64, 3, 5, 11, 23, 29, 41, 53, 83, 89].iter().map(|&p| 1.0 / p as f64).sum();
        assert!((two.sum - want).abs() < 1e-14);
        assert!((two.sum - 1.268_745_759_990_684).abs() < 1e-13);
        let four = brun_pair_sum(4, 50).unwrap();
        let want: f64 = [3u64, 7, 13, 37, 43].iter().map(|&p| 1.0 / p as f64).sum();
        assert!((four.sum - want).abs() < 1e-14);
        assert!((four.sum - 0.603_396_394_094_068_5).abs() < 1e-13);
        assert!(brun_pair_sum(1, 10).is_err());
    }

    #[test]
    fn brun_decades_add_up() {
        let b = brun_pair_sum(2, 100_000).unwrap();
        let total: f64 = b.decades.iter().map(|d| d.1).sum();
        assert!((total - b.sum).abs() < 1e-12);
        assert_eq!(b.decades.last().unwrap().0, 100_000);
        assert!(b.decades.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = CompensatedSum::default();
        acc.add(1e16);
        acc.add(1.0);
        acc.add(-1e16);
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn segment_size_is_invisible() {
        for seg in [1 << 10, 1 << 19] {
            assert_eq!(mertens_sum_with_segment(1_000_000, seg).unwrap(), mertens_sum(1_000_000).unwrap());
            assert_eq!(pi_bounds_check_with_segment(100_000, seg).unwrap(), pi_bounds_check(100_000).unwrap());
            assert_eq!(brun_pair_sum_with_segment(2, 100_000, seg).unwrap(), brun_pair_sum(2, 100_000).unwrap());
        }
    }

    #[test]
    fn small_table() {
        let params = OrderSumParams {
            d_max: 1000,
            ..OrderSumParams::default()
        };
        let table = diagnostics(&[2, 10, 100], &[2, 4], &params).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows.iter().all(|r| r.mertens_holds));
        assert_eq!(table.rows[0].pi_holds, None);
        assert_eq!(table.rows[2].pi_holds, Some(true));
        assert_eq!(table.rows[2].pi, 25);
        assert!(diagnostics(&[1], &[], &params).is_err());
    }
}
