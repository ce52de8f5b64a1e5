//! Exact rationals with a machine-word fast path.
//!
//! Values live in `Ratio<i64>` until an operation overflows, at which point
//! they are promoted to `BigRational`. Results that fit back into `i64` are
//! demoted again, so the representation of a value is unique.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub enum Rat {
    S(Ratio<i64>),
    B(Box<BigRational>),
}

fn big(r: &Ratio<i64>) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn demote(b: BigRational) -> Rat {
    match (b.numer().to_i64(), b.denom().to_i64()) {
        (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Rat::S(Ratio::new_raw(n, d)),
        _ => Rat::B(Box::new(b)),
    }
}

impl Rat {
    pub fn zero() -> Rat {
        Rat::S(Ratio::zero())
    }

    pub fn one() -> Rat {
        Rat::S(Ratio::one())
    }

    pub fn int(n: i64) -> Rat {
        Rat::S(Ratio::from_integer(n))
    }

    /// `n/d`; panics on `d == 0`.
    pub fn new(n: i64, d: i64) -> Rat {
        assert!(d != 0, "zero denominator");
        Rat::S(Ratio::new(n, d))
    }

    pub fn from_big(b: BigRational) -> Rat {
        demote(b)
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::S(r) => big(r),
            Rat::B(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rat::S(r) => r.is_zero(),
            Rat::B(_) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Rat::S(r) => r.is_one(),
            Rat::B(_) => false,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::S(r) => r.is_integer(),
            Rat::B(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rat::S(r) => r.numer().signum() as i32,
            Rat::B(b) => {
                if b.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    /// Numerator as `i64` when the value is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rat::S(r) if r.is_integer() => Some(*r.numer()),
            _ => None,
        }
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Rat::S(r) => Rat::S(r.recip()),
            Rat::B(b) => demote(b.recip()),
        }
    }

    pub fn pow(&self, k: u32) -> Rat {
        let mut acc = Rat::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $chk:ident, $op:tt) => {
        impl<'a> $tr<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, o: &'a Rat) -> Rat {
                if let (Rat::S(a), Rat::S(b)) = (self, o) {
                    if let Some(r) = a.$chk(b) {
                        return Rat::S(r);
                    }
                }
                demote(self.to_big() $op o.to_big())
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &'a Rat) -> Rat {
                (&self).$m(o)
            }
        }
    };
}

binop!(Add, add, checked_add, +);
binop!(Sub, sub, checked_sub, -);
binop!(Mul, mul, checked_mul, *);

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn div(self, o: &'a Rat) -> Rat {
        assert!(!o.is_zero(), "division by zero");
        if let (Rat::S(a), Rat::S(b)) = (self, o) {
            if let Some(r) = a.checked_div(b) {
                return Rat::S(r);
            }
        }
        demote(self.to_big() / o.to_big())
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, o: Rat) -> Rat {
        &self / &o
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::S(r) if *r.numer() != i64::MIN => Rat::S(-*r),
            _ => demote(-self.to_big()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, o: &Rat) {
        *self = &*self + o;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, o: &Rat) {
        *self = &*self - o;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, o: &Rat) {
        *self = &*self * o;
    }
}

impl PartialEq for Rat {
    fn eq(&self, o: &Rat) -> bool {
        match (self, o) {
            (Rat::S(a), Rat::S(b)) => a == b,
            (Rat::B(a), Rat::B(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            Rat::S(r) => {
                0u8.hash(h);
                r.numer().hash(h);
                r.denom().hash(h);
            }
            Rat::B(b) => {
                1u8.hash(h);
                b.numer().hash(h);
                b.denom().hash(h);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, o: &Rat) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Rat {
    fn cmp(&self, o: &Rat) -> Ordering {
        match (self, o) {
            (Rat::S(a), Rat::S(b)) => a.cmp(b),
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}

impl Default for Rat {
    fn default() -> Rat {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::S(r) => write!(f, "{}", r),
            Rat::B(b) => write!(f, "{}", b),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational {0:?}")]
pub struct ParseRatError(pub String);

impl FromStr for Rat {
    type Err = ParseRatError;
    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let t = s.trim();
        let err = || ParseRatError(s.to_string());
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(demote(BigRational::new(n, d)))
    }
}

impl serde::Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn promotes_on_overflow_and_demotes_back() {
        let big = Rat::int(i64::MAX);
        let sum = &big + &Rat::one();
        assert!(matches!(sum, Rat::B(_)));
        let back = &sum - &Rat::one();
        assert!(matches!(back, Rat::S(_)));
        assert_eq!(back, big);
    }

    #[test]
    fn parse_and_display() {
        let r: Rat = "6/-4".parse().unwrap();
        assert_eq!(r, Rat::new(-3, 2));
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!("7".parse::<Rat>().unwrap().to_string(), "7");
        assert!("1/0".parse::<Rat>().is_err());
        let huge: Rat = "123456789012345678901234567891/2".parse().unwrap();
        assert!(matches!(huge, Rat::B(_)));
        assert_eq!(huge.to_string(), "123456789012345678901234567891/2");
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(a in any::<i64>(), b in 1i64.., c in any::<i64>(), d in 1i64..) {
            let x = Rat::new(a, b);
            let y = Rat::new(c, d);
            let (bx, by) = (x.to_big(), y.to_big());
            prop_assert_eq!((&x + &y).to_big(), &bx + &by);
            prop_assert_eq!((&x - &y).to_big(), &bx - &by);
            prop_assert_eq!((&x * &y).to_big(), &bx * &by);
            if !y.is_zero() {
                prop_assert_eq!((&x / &y).to_big(), &bx / &by);
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
        }
    }
}
