//! Arbitrary-precision non-negative integers with a decimal-string wire form.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error};

/// A non-negative integer of unbounded size.
///
/// Serializes as a decimal string so values past 64 bits survive JSON.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Natural(BigUint);

impl Natural {
    pub fn new(value: BigUint) -> Self {
        Natural(value)
    }

    pub fn zero() -> Self {
        Natural(BigUint::zero())
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }
}

impl Deref for Natural {
    type Target = BigUint;

    fn deref(&self) -> &BigUint {
        &self.0
    }
}

impl From<BigUint> for Natural {
    fn from(value: BigUint) -> Self {
        Natural(value)
    }
}

impl From<Natural> for BigUint {
    fn from(value: Natural) -> Self {
        value.0
    }
}

macro_rules! natural_from_prim {
    ($($t:ty),*) => {$(
        impl From<$t> for Natural {
            fn from(value: $t) -> Self {
                Natural(BigUint::from(value))
            }
        }
    )*};
}

natural_from_prim!(u8, u16, u32, u64, u128, usize);

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for Natural {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(domain(format!("not a decimal natural number: {s:?}")));
        }
        if s.len() > 1 && s.starts_with('0') {
            return Err(domain(format!("leading zeros are not canonical: {s:?}")));
        }
        BigUint::from_str(s)
            .map(Natural)
            .map_err(|e| domain(format!("{s:?}: {e}")))
    }
}

impl Serialize for Natural {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_str_radix(10))
    }
}

impl<'de> Deserialize<'de> for Natural {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Natural::from_str(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trip() {
        let big: Natural = "170141183460469231731687303715884105727".parse().unwrap();
        assert_eq!(big.bits(), 127);
        let json = serde_json::to_string(&big).unwrap();
        assert_eq!(json, "\"170141183460469231731687303715884105727\"");
        let back: Natural = serde_json::from_str(&json).unwrap();
        assert_eq!(back, big);
    }

    #[test]
    fn rejects_non_canonical() {
        assert!("".parse::<Natural>().is_err());
        assert!("-3".parse::<Natural>().is_err());
        assert!("007".parse::<Natural>().is_err());
        assert!("1e5".parse::<Natural>().is_err());
        assert_eq!("0".parse::<Natural>().unwrap(), Natural::zero());
    }
}
