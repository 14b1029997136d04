// SPDX-License-Identifier: Apache-2.0

//! Exact rational helpers shared across the crate.

use num::bigint::BigInt;
use num::{BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-n` as an exact rational.
pub fn pow2_neg(n: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << n)
}

/// `10^-m` as an exact rational.
pub fn pow10_neg(m: u32) -> Rational {
    Rational::new(BigInt::one(), num::pow(BigInt::from(10), m as usize))
}

/// Parses `"num/den"`, `"int"` or a plain decimal like `"0.05"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = whole.abs() * &scale + frac;
        let num = if neg { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `num/den` text form used in every report.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering rounded half away from zero to `places` digits.
pub fn to_decimal(r: &Rational, places: usize) -> String {
    let scale = num::pow(BigInt::from(10), places);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut q = q;
    if rem * BigInt::from(2) >= *scaled.denom() {
        q += 1;
    }
    let (ip, fp) = q.div_rem(&scale);
    let sign = if r.is_negative() && !q.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{ip}");
    }
    let fp = fp.to_string();
    format!("{sign}{ip}.{}{fp}", "0".repeat(places - fp.len()))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `floor(x * 2^bits) / 2^bits`, the dyadic truncation of a nonnegative value.
pub fn dyadic_floor(x: &Rational, bits: u32) -> Rational {
    let den = BigInt::one() << bits;
    let n = (x.numer() * &den).div_floor(x.denom());
    Rational::new(n, den)
}

/// Serde adapter writing rationals (also inside `Vec`, `Option` and
/// `(usize, _)` pairs) as `"num/den"` strings.
/// Use with `#[serde(with = "crate::rational::text")]`.
pub mod text {
    use serde::de::{DeserializeOwned, Error as _};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{fmt_rational, parse_rational, Rational};

    pub trait TextForm: Sized {
        type Repr: Serialize + DeserializeOwned;
        fn to_repr(&self) -> Self::Repr;
        fn from_repr(r: Self::Repr) -> Result<Self, String>;
    }

    impl TextForm for Rational {
        type Repr = String;
        fn to_repr(&self) -> String {
            fmt_rational(self)
        }
        fn from_repr(r: String) -> Result<Self, String> {
            parse_rational(&r).map_err(|e| e.to_string())
        }
    }

    impl<T: TextForm> TextForm for Vec<T> {
        type Repr = Vec<T::Repr>;
        fn to_repr(&self) -> Self::Repr {
            self.iter().map(T::to_repr).collect()
        }
        fn from_repr(r: Self::Repr) -> Result<Self, String> {
            r.into_iter().map(T::from_repr).collect()
        }
    }

    impl<T: TextForm> TextForm for Option<T> {
        type Repr = Option<T::Repr>;
        fn to_repr(&self) -> Self::Repr {
            self.as_ref().map(T::to_repr)
        }
        fn from_repr(r: Self::Repr) -> Result<Self, String> {
            r.map(T::from_repr).transpose()
        }
    }

    impl<T: TextForm> TextForm for (usize, T) {
        type Repr = (usize, T::Repr);
        fn to_repr(&self) -> Self::Repr {
            (self.0, self.1.to_repr())
        }
        fn from_repr(r: Self::Repr) -> Result<Self, String> {
            Ok((r.0, T::from_repr(r.1)?))
        }
    }

    pub fn serialize<T: TextForm, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        v.to_repr().serialize(s)
    }

    pub fn deserialize<'de, T: TextForm, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        T::from_repr(T::Repr::deserialize(d)?).map_err(D::Error::custom)
    }
}
