//! Exact half-integers, stored as doubled integers.
//!
//! The grading group needs entries in (1/2)Z with exact arithmetic. A `Half`
//! stores twice its value in an `i64`, so 3/2 is `Half(3)` and 2 is `Half(4)`.

use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

/// An element of (1/2)Z. Internally twice the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Half(pub i64);

impl Half {
    pub const ZERO: Half = Half(0);

    /// The integer n as a half-integer.
    pub fn from_int(n: i64) -> Half {
        Half(2 * n)
    }

    /// n/2 as a half-integer.
    pub fn from_halves(n: i64) -> Half {
        Half(n)
    }

    /// Twice the value (the raw representation).
    pub fn doubled(self) -> i64 {
        self.0
    }

    /// True if this is an integer (even doubled representation).
    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// The value as an integer; None if it is a strict half-integer.
    pub fn as_int(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    /// Multiply by an integer scalar.
    pub fn scale(self, k: i64) -> Half {
        Half(self.0 * k)
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl AddAssign for Half {
    fn add_assign(&mut self, rhs: Half) {
        self.0 += rhs.0;
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl SubAssign for Half {
    fn sub_assign(&mut self, rhs: Half) {
        self.0 -= rhs.0;
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Integers serialize as JSON numbers, strict half-integers as strings "n/2".
impl Serialize for Half {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        if let Some(n) = self.as_int() {
            ser.serialize_i64(n)
        } else {
            ser.serialize_str(&format!("{}/2", self.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = Half::from_halves(3); // 3/2
        let b = Half::from_int(2); // 2
        assert_eq!(a + b, Half::from_halves(7));
        assert_eq!(b - a, Half::from_halves(1));
        assert_eq!(-a, Half::from_halves(-3));
        assert_eq!(a.scale(2), Half::from_int(3));
    }

    #[test]
    fn display_and_parse_shape() {
        assert_eq!(Half::from_halves(3).to_string(), "3/2");
        assert_eq!(Half::from_halves(-1).to_string(), "-1/2");
        assert_eq!(Half::from_int(2).to_string(), "2");
        assert_eq!(Half::from_int(0).to_string(), "0");
    }

    #[test]
    fn serialize_int_or_string() {
        let i = serde_json::to_string(&Half::from_int(3)).unwrap();
        assert_eq!(i, "3");
        let h = serde_json::to_string(&Half::from_halves(3)).unwrap();
        assert_eq!(h, "\"3/2\"");
        let nh = serde_json::to_string(&Half::from_halves(-5)).unwrap();
        assert_eq!(nh, "\"-5/2\"");
    }

    #[test]
    fn ordering_matches_values() {
        assert!(Half::from_halves(1) < Half::from_int(1));
        assert!(Half::from_int(-1) < Half::from_halves(-1));
    }
}
