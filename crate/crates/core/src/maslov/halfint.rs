use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

/// An exact half-integer, stored as a count of halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct HalfInt {
    pub halves: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { halves: 0 };

    pub const fn from_halves(halves: i64) -> Self {
        Self { halves }
    }

    pub const fn from_int(k: i64) -> Self {
        Self { halves: 2 * k }
    }

    pub const fn halves(self) -> i64 {
        self.halves
    }

    pub const fn is_integer(self) -> bool {
        self.halves % 2 == 0
    }

    /// `Some(k)` iff the value is the integer `k`.
    pub const fn to_int(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.halves / 2)
        } else {
            None
        }
    }

    pub fn to_f64(self) -> f64 {
        self.halves as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_int() {
            Some(k) => write!(f, "{k}"),
            None => write!(f, "{}/2", self.halves),
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt::from_halves(self.halves + o.halves)
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, o: HalfInt) {
        self.halves += o.halves;
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt::from_halves(self.halves - o.halves)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_halves(-self.halves)
    }
}

impl Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> HalfInt {
        iter.fold(HalfInt::ZERO, Add::add)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_json() {
        assert_eq!(HalfInt::from_halves(5).to_string(), "5/2");
        assert_eq!(HalfInt::from_halves(-4).to_string(), "-2");
        assert_eq!(serde_json::to_string(&HalfInt::from_halves(5)).unwrap(), r#"{"halves":5}"#);
        assert_eq!(HalfInt::from_halves(3).to_int(), None);
        assert_eq!(HalfInt::from_int(7).to_int(), Some(7));
    }

    proptest! {
        #[test]
        fn group_laws(a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000) {
            let (a, b, c) = (HalfInt::from_halves(a), HalfInt::from_halves(b), HalfInt::from_halves(c));
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a - a, HalfInt::ZERO);
            prop_assert_eq!(a + (-a), HalfInt::ZERO);
            prop_assert_eq!((a + b).to_f64(), a.to_f64() + b.to_f64());
        }
    }
}
