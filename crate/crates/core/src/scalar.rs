//! Exact rational scalars.
//!
//! Every distance, radius and threshold in the crate is an [`Exact`]. Values
//! are kept in lowest terms with a positive denominator, and they serialize
//! as `"num/den"` strings.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An arbitrary-precision rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Exact(BigRational);

impl Exact {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Exact {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Exact(BigRational::new(num.into(), den))
    }

    pub fn zero() -> Exact {
        Exact(BigRational::zero())
    }

    pub fn one() -> Exact {
        Exact(BigRational::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Exact {
        Exact(BigRational::from_integer(n.into()))
    }

    /// `1 / n`.
    pub fn recip_of(n: u64) -> Exact {
        Exact::new(1u64, n)
    }

    /// `base^exp` for a possibly negative exponent.
    pub fn pow(base: u64, exp: i64) -> Exact {
        let b = BigRational::from_integer(BigInt::from(base));
        Exact(num_traits::pow::Pow::pow(&b, exp as i32))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Exact {
        Exact(self.0.abs())
    }

    pub fn recip(&self) -> Exact {
        Exact(self.0.recip())
    }

    pub fn max(self, other: Exact) -> Exact {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Exact) -> Exact {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Lossy conversion, only for human-facing summaries.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Exact {
    fn from(r: BigRational) -> Exact {
        Exact(r)
    }
}

impl From<i64> for Exact {
    fn from(n: i64) -> Exact {
        Exact::from_int(n)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Exact {
    type Err = Error;

    /// Accepts `"a/b"` or a bare integer `"a"`.
    fn from_str(s: &str) -> Result<Exact, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not an exact fraction: {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Exact::new(n, d))
            }
            None => Ok(Exact::from_int(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Exact, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Exact {
            type Output = Exact;
            fn $m(self, rhs: Exact) -> Exact {
                Exact(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Exact> for &'a Exact {
            type Output = Exact;
            fn $m(self, rhs: &'a Exact) -> Exact {
                Exact((&self.0).$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact(-self.0)
    }
}
