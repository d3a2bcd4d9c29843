//! Nonnegative integers stored as the set of their binary-digit positions.
//!
//! Values such as `2^(2^(R+1)) + r` have astronomically large magnitude but
//! only a handful of set bits; keeping the support sparse makes every
//! operation cost proportional to the number of set bits.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct BitInt {
    bits: BTreeSet<u64>,
}

impl BitInt {
    pub fn zero() -> Self {
        BitInt::default()
    }

    pub fn pow2(position: u64) -> Self {
        BitInt {
            bits: BTreeSet::from([position]),
        }
    }

    /// Builds from distinct positions; a repeated position is rejected
    /// because the caller almost certainly meant a sum.
    pub fn from_positions(positions: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut bits = BTreeSet::new();
        for p in positions {
            if !bits.insert(p) {
                return Err(Error::validation(format!("bit position {p} repeated")));
            }
        }
        Ok(BitInt { bits })
    }

    /// Ascending bit positions.
    pub fn positions(&self) -> impl DoubleEndedIterator<Item = u64> + '_ {
        self.bits.iter().copied()
    }

    /// Length of the dyadic expansion.
    pub fn popcount(&self) -> u64 {
        self.bits.len() as u64
    }

    /// Position of the leading bit, i.e. `floor(log2(self))`.
    pub fn top(&self) -> Option<u64> {
        self.bits.last().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn test_bit(&self, position: u64) -> bool {
        self.bits.contains(&position)
    }

    /// Adds `2^position` with binary carry.
    pub fn add_pow2(&mut self, mut position: u64) {
        while self.bits.remove(&position) {
            position += 1;
        }
        self.bits.insert(position);
    }

    pub fn shl(&self, shift: u64) -> BitInt {
        BitInt {
            bits: self.bits.iter().map(|p| p + shift).collect(),
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.top() {
            Some(t) if t >= 64 => None,
            _ => Some(self.bits.iter().fold(0u64, |acc, p| acc | (1u64 << p))),
        }
    }

    pub fn to_u128(&self) -> Option<u128> {
        match self.top() {
            Some(t) if t >= 128 => None,
            _ => Some(self.bits.iter().fold(0u128, |acc, p| acc | (1u128 << p))),
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut n = BigUint::default();
        for &p in &self.bits {
            n.set_bit(p, true);
        }
        n
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        BitInt {
            bits: (0..n.bits()).filter(|&i| n.bit(i)).collect(),
        }
    }
}

impl From<u64> for BitInt {
    fn from(n: u64) -> Self {
        BitInt::from(u128::from(n))
    }
}

impl From<u128> for BitInt {
    fn from(n: u128) -> Self {
        BitInt {
            bits: (0..128).filter(|i| n >> i & 1 == 1).collect(),
        }
    }
}

impl TryFrom<Vec<u64>> for BitInt {
    type Error = Error;

    fn try_from(positions: Vec<u64>) -> Result<Self> {
        BitInt::from_positions(positions)
    }
}

impl From<BitInt> for Vec<u64> {
    fn from(b: BitInt) -> Self {
        b.bits.into_iter().collect()
    }
}

impl Ord for BitInt {
    fn cmp(&self, other: &Self) -> Ordering {
        // First differing position from the top decides; a proper prefix of
        // the descending position list is the smaller number.
        self.bits.iter().rev().cmp(other.bits.iter().rev())
    }
}

impl PartialOrd for BitInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &BitInt {
    type Output = BitInt;

    fn add(self, rhs: &BitInt) -> BitInt {
        let (mut acc, smaller) = if self.popcount() >= rhs.popcount() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for p in smaller.positions() {
            acc.add_pow2(p);
        }
        acc
    }
}

impl Add for BitInt {
    type Output = BitInt;

    fn add(self, rhs: BitInt) -> BitInt {
        &self + &rhs
    }
}

impl PartialEq<u64> for BitInt {
    fn eq(&self, other: &u64) -> bool {
        self.to_u64() == Some(*other)
    }
}

impl PartialOrd<u64> for BitInt {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        Some(self.cmp(&BitInt::from(*other)))
    }
}

/// Small values print in decimal; large ones as a sum of powers of two.
impl fmt::Display for BitInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.to_u128() {
            return write!(f, "{v}");
        }
        for (i, p) in self.bits.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match p {
                0 => write!(f, "1")?,
                _ => write!(f, "2^{p}")?,
            }
        }
        Ok(())
    }
}

/// Decimal digits, or `2^e` for a single power.
impl FromStr for BitInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(exp) = s.strip_prefix("2^") {
            let e = exp
                .parse::<u64>()
                .map_err(|e| Error::validation(format!("bad exponent in {s:?}: {e}")))?;
            return Ok(BitInt::pow2(e));
        }
        let n = BigUint::from_str(s)
            .map_err(|e| Error::validation(format!("bad integer {s:?}: {e}")))?;
        Ok(BitInt::from_biguint(&n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn round_trip_below_2_pow_20() {
        for n in 0u64..(1 << 20) {
            let b = BitInt::from(n);
            assert_eq!(b.to_u64(), Some(n));
            assert_eq!(b.popcount(), u64::from(n.count_ones()));
        }
    }

    #[test]
    fn huge_values_stay_sparse() {
        let big = BitInt::pow2(1 << 13) + BitInt::from(5u64);
        assert_eq!(big.popcount(), 3);
        assert_eq!(big.top(), Some(8192));
        assert!(big > BitInt::pow2(8191));
        assert!(big < BitInt::pow2(8193));
        assert_eq!(big.to_u64(), None);
        assert_eq!(big.to_string(), "2^8192 + 2^2 + 1");
    }

    #[test]
    fn parse_forms() {
        assert_eq!("12".parse::<BitInt>().unwrap(), BitInt::from(12u64));
        assert_eq!("2^70".parse::<BitInt>().unwrap(), BitInt::pow2(70));
        let n = "1180591620717411303424".parse::<BitInt>().unwrap();
        assert_eq!(n, BitInt::pow2(70));
        assert!("x".parse::<BitInt>().is_err());
    }

    #[test]
    fn json_is_position_array() {
        let b = BitInt::from(12u64);
        assert_eq!(serde_json::to_string(&b).unwrap(), "[2,3]");
        let back: BitInt = serde_json::from_str("[3,2]").unwrap();
        assert_eq!(back, b);
        assert!(serde_json::from_str::<BitInt>("[1,1]").is_err());
    }

    proptest! {
        #[test]
        fn add_agrees_with_machine_integers(a in 0u64..u64::MAX / 2, b in 0u64..u64::MAX / 2) {
            prop_assert_eq!((BitInt::from(a) + BitInt::from(b)).to_u64(), Some(a + b));
        }

        #[test]
        fn order_agrees_with_machine_integers(a: u128, b: u128) {
            prop_assert_eq!(BitInt::from(a).cmp(&BitInt::from(b)), a.cmp(&b));
        }

        #[test]
        fn biguint_round_trip(positions in proptest::collection::btree_set(0u64..3000, 0..20)) {
            let b = BitInt::from_positions(positions).unwrap();
            prop_assert_eq!(BitInt::from_biguint(&b.to_biguint()), b.clone());
            let sum = &b + &b;
            prop_assert_eq!(sum.to_biguint(), b.to_biguint() * 2u32);
        }
    }
}
