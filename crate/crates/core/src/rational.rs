//! Exact rational masses.
//!
//! Every mass in the crate (measure weights, plan entries, decomposition
//! targets) is a [`RationalWeight`]. Distances stay `f64`; masses never do.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exact rational number kept in reduced form with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RationalWeight(BigRational);

impl RationalWeight {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    /// Panicking constructor for literals in code and tests.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn integer(n: i64) -> Self {
        Self(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for RationalWeight {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl fmt::Display for RationalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for RationalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for RationalWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad rational `{s}`")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let den = parse(d)?;
                if den.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in `{s}`")));
                }
                Ok(Self(BigRational::new(parse(n)?, den)))
            }
            None => Ok(Self(BigRational::from_integer(parse(s)?))),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for RationalWeight {
            type Output = RationalWeight;
            fn $method(self, rhs: RationalWeight) -> RationalWeight {
                RationalWeight(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a RationalWeight> for &'a RationalWeight {
            type Output = RationalWeight;
            fn $method(self, rhs: &'a RationalWeight) -> RationalWeight {
                RationalWeight((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a RationalWeight> for RationalWeight {
            type Output = RationalWeight;
            fn $method(self, rhs: &'a RationalWeight) -> RationalWeight {
                RationalWeight(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&RationalWeight> for RationalWeight {
    fn add_assign(&mut self, rhs: &RationalWeight) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for RationalWeight {
    fn add_assign(&mut self, rhs: RationalWeight) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&RationalWeight> for RationalWeight {
    fn sub_assign(&mut self, rhs: &RationalWeight) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign for RationalWeight {
    fn sub_assign(&mut self, rhs: RationalWeight) {
        self.0 -= rhs.0;
    }
}

impl Neg for RationalWeight {
    type Output = RationalWeight;
    fn neg(self) -> RationalWeight {
        RationalWeight(-self.0)
    }
}

impl Sum for RationalWeight {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, w| acc + w)
    }
}

impl<'a> Sum<&'a RationalWeight> for RationalWeight {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, w| acc + w)
    }
}

/// Wire form `{"num": .., "den": ..}` used by every JSON file format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: serde_json::Value,
    pub den: serde_json::Value,
}

fn json_int(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .to_string()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("expected an integer, got {n}"))),
        serde_json::Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("expected an integer, got `{s}`"))),
        other => Err(Error::Parse(format!("expected an integer, got {other}"))),
    }
}

fn int_json(i: &BigInt) -> serde_json::Value {
    match i.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(i.to_string()),
    }
}

impl TryFrom<&RationalRepr> for RationalWeight {
    type Error = Error;

    fn try_from(r: &RationalRepr) -> Result<Self> {
        let den = json_int(&r.den)?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self(BigRational::new(json_int(&r.num)?, den)))
    }
}

impl From<&RationalWeight> for RationalRepr {
    fn from(w: &RationalWeight) -> Self {
        RationalRepr {
            num: int_json(w.numer()),
            den: int_json(w.denom()),
        }
    }
}

impl Serialize for RationalWeight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalWeight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RationalRepr::deserialize(d)?;
        RationalWeight::try_from(&repr).map_err(serde::de::Error::custom)
    }
}
