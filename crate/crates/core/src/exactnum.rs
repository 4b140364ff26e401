//! Exact number types: non-negative rationals extended by infinity, and
//! rationals confined to the unit interval.
//!
//! Both types are immutable and normalized (lowest terms), so structural
//! equality coincides with numeric equality. Their textual form is `p/q`,
//! `p`, or `inf`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Parses `p/q` or `p` (non-negative integers only) into a rational.
fn parse_rational(text: &str) -> Result<BigRational, Error> {
    let bad = || Error::Malformed(format!("malformed rational `{text}`"));
    let digits = |s: &str| -> Result<BigInt, Error> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    let text = text.trim();
    match text.split_once('/') {
        Some((num, den)) => {
            let den = digits(den)?;
            if den.is_zero() {
                return Err(Error::Malformed(format!("zero denominator in `{text}`")));
            }
            Ok(BigRational::new(digits(num)?, den))
        }
        None => Ok(BigRational::from_integer(digits(text)?)),
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    // Variant order gives `Finite(_) < Infinity`.
    Finite(BigRational),
    Infinity,
}

/// A value of `[0, ∞]`: an exact non-negative rational or the top element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtNonneg(Repr);

impl ExtNonneg {
    pub const INFINITY: ExtNonneg = ExtNonneg(Repr::Infinity);

    pub fn new(value: BigRational) -> Result<Self, Error> {
        if value.is_negative() {
            return Err(Error::OutOfRange(format!("{value} is negative")));
        }
        Ok(ExtNonneg(Repr::Finite(value)))
    }

    pub fn zero() -> Self {
        ExtNonneg(Repr::Finite(BigRational::zero()))
    }

    pub fn from_integer(n: u64) -> Self {
        ExtNonneg(Repr::Finite(BigRational::from_integer(n.into())))
    }

    /// `numer / denom`; panics on a zero denominator.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        ExtNonneg(Repr::Finite(BigRational::new(numer.into(), denom.into())))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.0, Repr::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Finite(r) if r.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Finite(r) => Some(r),
            Repr::Infinity => None,
        }
    }

    /// `self - other`, defined when the result is a finite non-negative value.
    pub fn checked_sub(&self, other: &ExtNonneg) -> Option<ExtNonneg> {
        match (&self.0, &other.0) {
            (Repr::Finite(a), Repr::Finite(b)) if a >= b => Some(ExtNonneg(Repr::Finite(a - b))),
            _ => None,
        }
    }

    /// `self - other`, clamped at zero; `∞ - finite = ∞`, `x - ∞ = 0`.
    pub fn saturating_sub(&self, other: &ExtNonneg) -> ExtNonneg {
        match (&self.0, &other.0) {
            (_, Repr::Infinity) => ExtNonneg::zero(),
            (Repr::Infinity, _) => ExtNonneg::INFINITY,
            (Repr::Finite(a), Repr::Finite(b)) => {
                if a > b {
                    ExtNonneg(Repr::Finite(a - b))
                } else {
                    ExtNonneg::zero()
                }
            }
        }
    }

    /// Multiplies a finite value by a non-negative rational; infinity stays infinite.
    pub fn scale(&self, factor: &BigRational) -> ExtNonneg {
        match &self.0 {
            Repr::Finite(a) => ExtNonneg(Repr::Finite(a * factor)),
            Repr::Infinity => ExtNonneg::INFINITY,
        }
    }

    /// Halves a finite value.
    pub fn half(&self) -> ExtNonneg {
        self.scale(&BigRational::new(1.into(), 2.into()))
    }

    pub fn min_of<'a>(&'a self, other: &'a ExtNonneg) -> &'a ExtNonneg {
        if self <= other {
            self
        } else {
            other
        }
    }
}

/// Exact sum; infinity is absorbing.
pub fn ext_add(a: &ExtNonneg, b: &ExtNonneg) -> ExtNonneg {
    match (&a.0, &b.0) {
        (Repr::Finite(x), Repr::Finite(y)) => ExtNonneg(Repr::Finite(x + y)),
        _ => ExtNonneg::INFINITY,
    }
}

pub fn ext_compare(a: &ExtNonneg, b: &ExtNonneg) -> Ordering {
    a.cmp(b)
}

impl Add for &ExtNonneg {
    type Output = ExtNonneg;

    fn add(self, rhs: &ExtNonneg) -> ExtNonneg {
        ext_add(self, rhs)
    }
}

impl Add for ExtNonneg {
    type Output = ExtNonneg;

    fn add(self, rhs: ExtNonneg) -> ExtNonneg {
        ext_add(&self, &rhs)
    }
}

impl From<&UnitRational> for ExtNonneg {
    fn from(u: &UnitRational) -> Self {
        ExtNonneg(Repr::Finite(u.0.clone()))
    }
}

impl From<UnitRational> for ExtNonneg {
    fn from(u: UnitRational) -> Self {
        ExtNonneg(Repr::Finite(u.0))
    }
}

impl FromStr for ExtNonneg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.trim() == "inf" {
            Ok(ExtNonneg::INFINITY)
        } else {
            ExtNonneg::new(parse_rational(s)?)
        }
    }
}

impl fmt::Display for ExtNonneg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Finite(r) => fmt_rational(r, f),
            Repr::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExtNonneg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An exact rational in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitRational(BigRational);

impl UnitRational {
    pub fn new(value: BigRational) -> Result<Self, Error> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::OutOfRange(format!("{value} is outside [0,1]")));
        }
        Ok(UnitRational(value))
    }

    /// `numer / denom`; panics unless the ratio lies in `[0,1]`.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0 && numer <= denom, "{numer}/{denom} outside [0,1]");
        UnitRational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn zero() -> Self {
        UnitRational(BigRational::zero())
    }

    pub fn one() -> Self {
        UnitRational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// `1 - self`.
    pub fn complement(&self) -> UnitRational {
        UnitRational(BigRational::one() - &self.0)
    }

    pub fn mul(&self, other: &UnitRational) -> UnitRational {
        UnitRational(&self.0 * &other.0)
    }

    /// `max(self + other - 1, 0)`.
    pub fn bounded_sum(&self, other: &UnitRational) -> UnitRational {
        let s = &self.0 + &other.0 - BigRational::one();
        if s.is_negative() {
            UnitRational::zero()
        } else {
            UnitRational(s)
        }
    }

    /// Midpoint of two unit values.
    pub fn midpoint(&self, other: &UnitRational) -> UnitRational {
        UnitRational((&self.0 + &other.0) / BigRational::from_integer(2.into()))
    }

    /// `self + delta` if it stays inside `[0,1]`.
    pub fn checked_add(&self, delta: &BigRational) -> Option<UnitRational> {
        UnitRational::new(&self.0 + delta).ok()
    }

    /// `self - delta` if it stays inside `[0,1]`.
    pub fn checked_sub(&self, delta: &BigRational) -> Option<UnitRational> {
        UnitRational::new(&self.0 - delta).ok()
    }

    /// All `k / denom` for `k` in `lo..=denom`.
    pub fn dyadic_grid(denom: u64, include_zero: bool) -> Vec<UnitRational> {
        let start = if include_zero { 0 } else { 1 };
        (start..=denom).map(|k| UnitRational::ratio(k, denom)).collect()
    }
}

impl FromStr for UnitRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        UnitRational::new(parse_rational(s)?)
    }
}

impl fmt::Display for UnitRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.0, f)
    }
}

impl fmt::Debug for UnitRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! string_serde {
    ($ty:ty, $what:literal) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                struct Visitor;
                impl de::Visitor<'_> for Visitor {
                    type Value = $ty;

                    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                        f.write_str($what)
                    }

                    fn visit_str<E: de::Error>(self, v: &str) -> Result<$ty, E> {
                        v.parse().map_err(E::custom)
                    }
                }
                deserializer.deserialize_str(Visitor)
            }
        }
    };
}

string_serde!(ExtNonneg, "a string \"p/q\", \"p\" or \"inf\"");
string_serde!(UnitRational, "a string \"p/q\" or \"p\" in [0,1]");

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(s: &str) -> ExtNonneg {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(ext_add(&e("3/2"), &e("3/2")), e("3"));
        assert_eq!(ext_add(&e("2"), &ExtNonneg::INFINITY), ExtNonneg::INFINITY);
        assert_eq!(ext_add(&e("1/3"), &e("1/6")), e("1/2"));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(ext_compare(&e("5"), &e("inf")), Ordering::Less);
        assert_eq!(ext_compare(&e("1/2"), &e("2/4")), Ordering::Equal);
        assert_eq!(ext_compare(&e("inf"), &e("inf")), Ordering::Equal);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(e("2/4").to_string(), "1/2");
        assert_eq!(e("6/3").to_string(), "2");
        assert_eq!(e("inf").to_string(), "inf");
        for bad in ["", "-1", "1/0", "a", "1.5", "1/-2", "/3", "3/"] {
            assert!(bad.parse::<ExtNonneg>().is_err(), "{bad:?} accepted");
        }
        assert!("3/2".parse::<UnitRational>().is_err());
        assert!("inf".parse::<UnitRational>().is_err());
        assert_eq!("4/4".parse::<UnitRational>().unwrap(), UnitRational::one());
    }

    #[test]
    fn serde_uses_strings() {
        let v: Vec<ExtNonneg> = serde_json::from_str(r#"["2","inf","3/6"]"#).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["2","inf","1/2"]"#);
        assert!(serde_json::from_str::<UnitRational>(r#""3/2""#).is_err());
    }

    #[test]
    fn unit_ops() {
        let a = UnitRational::ratio(3, 4);
        assert_eq!(a.mul(&a), UnitRational::ratio(9, 16));
        assert_eq!(a.bounded_sum(&a), UnitRational::ratio(1, 2));
        assert_eq!(UnitRational::ratio(1, 4).bounded_sum(&a), UnitRational::zero());
        assert_eq!(a.complement(), UnitRational::ratio(1, 4));
    }

    fn ext_strategy() -> impl Strategy<Value = ExtNonneg> {
        prop_oneof![
            1 => Just(ExtNonneg::INFINITY),
            6 => (0u64..200, 1u64..17).prop_map(|(n, d)| ExtNonneg::ratio(n, d)),
        ]
    }

    proptest! {
        #[test]
        fn addition_laws(a in ext_strategy(), b in ext_strategy(), c in ext_strategy(), d in ext_strategy()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            if a <= d {
                prop_assert!(&a + &b <= &d + &b);
            }
        }

        #[test]
        fn order_is_total_and_matches_subtraction(a in ext_strategy(), b in ext_strategy(), c in ext_strategy()) {
            let ab = ext_compare(&a, &b);
            prop_assert_eq!(ab.reverse(), ext_compare(&b, &a));
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
            if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
                let diff = x - y;
                let sign = if diff.is_zero() { Ordering::Equal } else if diff.is_positive() { Ordering::Greater } else { Ordering::Less };
                prop_assert_eq!(ab, sign);
            }
            if b.is_finite() {
                prop_assert!(b < ExtNonneg::INFINITY);
            }
        }
    }
}
