//! Integers that live in an `i128` until they overflow.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Signed integer with a machine-word fast path.
///
/// Values are always normalized: anything that fits in an `i128` is stored as
/// `Small`, so derived equality and hashing are structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Int {
    Small(i128),
    Big(BigInt),
}

impl Int {
    pub const ZERO: Int = Int::Small(0);
    pub const ONE: Int = Int::Small(1);

    pub fn from_big(b: BigInt) -> Int {
        match b.to_i128() {
            Some(v) => Int::Small(v),
            None => Int::Big(b),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => b.clone(),
        }
    }

    pub fn as_i128(&self) -> Option<i128> {
        match self {
            Int::Small(v) => Some(*v),
            Int::Big(_) => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_i128().and_then(|v| i64::try_from(v).ok())
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.as_i128().and_then(|v| u64::try_from(v).ok())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Int::Small(v) => *v < 0,
            Int::Big(b) => b.is_negative(),
        }
    }

    pub fn is_big(&self) -> bool {
        matches!(self, Int::Big(_))
    }

    pub fn abs(&self) -> Int {
        match self {
            Int::Small(v) => match v.checked_abs() {
                Some(a) => Int::Small(a),
                None => Int::Big(BigInt::from(*v).abs()),
            },
            Int::Big(b) => Int::Big(b.abs()),
        }
    }

    /// Least non-negative residue modulo `m > 0`.
    pub fn rem_u64(&self, m: u64) -> u64 {
        assert!(m > 0, "modulus must be positive");
        match self {
            Int::Small(v) => v.rem_euclid(m as i128) as u64,
            Int::Big(b) => b.mod_floor(&BigInt::from(m)).to_u64().unwrap(),
        }
    }

    pub fn is_divisible_by(&self, m: u64) -> bool {
        self.rem_u64(m) == 0
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Int::Small(v) => *v as f64,
            Int::Big(b) => b.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn pow(&self, e: u32) -> Int {
        let mut acc = Int::ONE;
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Int {
        Int::Small(v as i128)
    }
}

impl From<i32> for Int {
    fn from(v: i32) -> Int {
        Int::Small(v as i128)
    }
}

impl From<u64> for Int {
    fn from(v: u64) -> Int {
        Int::Small(v as i128)
    }
}

impl From<i128> for Int {
    fn from(v: i128) -> Int {
        Int::Small(v)
    }
}

impl From<BigInt> for Int {
    fn from(b: BigInt) -> Int {
        Int::from_big(b)
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Int) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Int) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Int> for &Int {
            type Output = Int;
            fn $m(self, rhs: &Int) -> Int {
                if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
                    if let Some(v) = a.$checked(*b) {
                        return Int::Small(v);
                    }
                }
                Int::from_big(self.to_big().$m(rhs.to_big()))
            }
        }
        impl $tr<Int> for Int {
            type Output = Int;
            fn $m(self, rhs: Int) -> Int {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Int> for Int {
            type Output = Int;
            fn $m(self, rhs: &Int) -> Int {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match self {
            Int::Small(v) => match v.checked_neg() {
                Some(n) => Int::Small(n),
                None => Int::Big(-BigInt::from(*v)),
            },
            Int::Big(b) => Int::from_big(-b),
        }
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

impl Zero for Int {
    fn zero() -> Int {
        Int::ZERO
    }
    fn is_zero(&self) -> bool {
        Int::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn promotes_on_overflow_and_demotes_back() {
        let big = Int::Small(i128::MAX);
        let sum = &big + &Int::ONE;
        assert!(sum.is_big());
        let back = &sum - &Int::ONE;
        assert_eq!(back, Int::Small(i128::MAX));
        let sq = &big * &big;
        assert!(sq.is_big());
        assert_eq!(-Int::Small(i128::MIN), Int::Big(BigInt::from(i128::MIN) * -1));
    }

    #[test]
    fn residues_are_non_negative() {
        assert_eq!(Int::from(-7i64).rem_u64(5), 3);
        let huge = Int::from_big(BigInt::from(u128::MAX) * 3 + 2);
        assert_eq!(huge.rem_u64(3), (u128::MAX % 3 * 3 + 2) as u64 % 3);
    }

    proptest! {
        #[test]
        fn ring_ops_match_bigint(a in any::<i128>(), b in any::<i128>(), c in any::<i64>()) {
            let (ia, ib, ic) = (Int::from(a), Int::from(b), Int::from(c as i128));
            let (ba, bb, bc) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
            prop_assert_eq!((&(&ia * &ib) + &ic).to_big(), &ba * &bb + &bc);
            prop_assert_eq!((&ia - &ib).to_big(), &ba - &bb);
            prop_assert_eq!(ia.cmp(&ib), ba.cmp(&bb));
            let p = (c.unsigned_abs() % 1000) + 1;
            prop_assert_eq!(BigInt::from((&ia * &ib).rem_u64(p)), (&ba * &bb).mod_floor(&BigInt::from(p)));
        }
    }
}
