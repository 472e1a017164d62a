//! Exact integer number theory shared by every other module.

pub mod arith;
pub mod factor;
pub mod modular;
pub mod primality;
pub mod sieve;

pub use factor::{factor, factor_u64, factor_with, FactorBudget, Factorization, PrimePower};
pub use modular::{
    crt_combine, form_exponent_order, mod_inverse, mod_pow, multiplicative_order, order_mod,
    ExponentCoset,
};
pub use primality::{is_prime, is_prime_u128, is_prime_u64, primality, Primality};
pub use sieve::{prime_count, primes_in_range, primes_in_range_u64, primes_up_to};
