use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use covercraft::cover::coverage_density;
use covercraft::ntcore::{
    crt_combine, factor_u64, form_exponent_order, is_prime_u64, mod_pow, multiplicative_order, prime_count,
    primes_in_range_u64, primes_up_to,
};

fn trial_division(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn small_primes() -> Vec<u64> {
    primes_up_to(2000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mod_pow_matches_repeated_multiplication(b in 0u64..1_000_000, e in 0u64..300, m in 1u64..1_000_000) {
        let mut naive = 1 % m as u128;
        for _ in 0..e {
            naive = naive * b as u128 % m as u128;
        }
        let got = mod_pow(&BigUint::from(b), &BigUint::from(e), &BigUint::from(m)).unwrap();
        prop_assert_eq!(got, BigUint::from(naive));
    }

    #[test]
    fn order_is_minimal_and_divides_group_order(idx in 1usize..300, a in 2u64..1000) {
        let q = small_primes()[idx];
        prop_assume!(a % q != 0);
        let (ab, qb) = (BigUint::from(a), BigUint::from(q));
        let ord = multiplicative_order(&ab, &qb).unwrap().to_u64().unwrap();
        prop_assert_eq!((q - 1) % ord, 0);
        prop_assert!(mod_pow(&ab, &BigUint::from(ord), &qb).unwrap().is_one());
        if ord == 1 {
            return Ok(());
        }
        for pp in factor_u64(ord).unwrap().factors {
            let r = pp.prime.to_u64().unwrap();
            prop_assert!(!mod_pow(&ab, &BigUint::from(ord / r), &qb).unwrap().is_one());
        }
    }

    #[test]
    fn crt_solution_satisfies_every_congruence(picks in proptest::collection::btree_set(0usize..200, 1..6), seed in any::<u64>()) {
        let primes = small_primes();
        let system: Vec<(BigUint, BigUint)> = picks
            .iter()
            .enumerate()
            .map(|(t, &i)| {
                let q = primes[i];
                (BigUint::from(seed.rotate_left(t as u32 * 7) % q), BigUint::from(q))
            })
            .collect();
        let (b, w) = crt_combine(&system).unwrap();
        let product: BigUint = system.iter().map(|(_, m)| m.clone()).product();
        prop_assert_eq!(&w, &product);
        prop_assert!(b < w);
        for (r, m) in &system {
            prop_assert_eq!(&b % m, r.clone());
        }
    }

    #[test]
    fn exponent_coset_is_the_exact_solution_set(a in 2u64..12, j in -6i64..7, l in -40i64..41, d in 2u64..400) {
        prop_assume!(a.gcd(&d) == 1);
        let solves = |i: u64| {
            let power = mod_pow(&BigUint::from(a), &BigUint::from(i), &BigUint::from(d)).unwrap();
            (j as i128 * power.to_u64().unwrap() as i128 + l as i128).rem_euclid(d as i128) == 0
        };
        let horizon = 2 * d + 2;
        let brute: Vec<u64> = (1..=horizon).filter(|&i| solves(i)).collect();
        match form_exponent_order(a, j, l, d).unwrap() {
            None => prop_assert!(brute.is_empty()),
            Some(c) => {
                prop_assert_eq!(brute.first().copied(), Some(c.first));
                let coset: Vec<u64> = (1..=horizon).filter(|&i| c.contains(i)).collect();
                prop_assert_eq!(coset, brute);
            }
        }
    }

    #[test]
    fn density_matches_exhaustive_count(picks in proptest::collection::btree_set(0usize..6, 1..5)) {
        let pool = [2u64, 3, 5, 7, 11, 13];
        let moduli: Vec<u64> = picks.iter().map(|&i| pool[i]).collect();
        let product: u64 = moduli.iter().product();
        let covered = (0..product).filter(|x| moduli.iter().any(|m| x % m == 0)).count();
        let d = coverage_density(&moduli).unwrap();
        prop_assert_eq!(d.numer() * BigInt::from(product), d.denom() * BigInt::from(covered as u64));
    }

    #[test]
    fn factorization_multiplies_back(n in 2u64..u64::MAX) {
        let f = factor_u64(n).unwrap();
        prop_assert_eq!(f.product(), BigUint::from(n));
        for p in f.primes() {
            prop_assert!(is_prime_u64(p.to_u64().unwrap()));
        }
    }

    #[test]
    fn primality_matches_trial_division(n in 0u64..50_000_000) {
        prop_assert_eq!(is_prime_u64(n), trial_division(n));
    }

    #[test]
    fn sieve_ranges_compose(lo in 0u64..200_000, span in 0u64..50_000, cut in 0u64..50_000) {
        let hi = lo + span;
        let mid = lo + cut.min(span);
        let mut joined = primes_in_range_u64(lo, mid);
        joined.extend(primes_in_range_u64(mid + 1, hi));
        let direct = primes_in_range_u64(lo, hi);
        prop_assert_eq!(&joined, &direct);
        prop_assert!(direct.iter().all(|&p| trial_division(p)));
    }
}

#[test]
fn prime_counts_at_powers_of_ten() {
    let want = [4u64, 25, 168, 1229, 9592, 78498, 664579];
    for (t, &pi) in want.iter().enumerate() {
        assert_eq!(prime_count(10u64.pow(t as u32 + 1)), pi);
    }
}
