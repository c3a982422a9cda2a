//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! Rationals are `num_rational::BigRational`, always kept in reduced form with a
//! positive denominator. Gaussian rationals pair two of them. Both serialize as
//! strings so no consumer ever sees a float.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^e` for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    let magnitude = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(magnitude)
    } else {
        Rational::new(BigInt::one(), magnitude)
    }
}

/// `(-1)^e`.
pub fn sign_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Converts a rational that must be an integer (a pairing of integral classes,
/// say) into `i64`.
pub fn to_i64(q: &Rational) -> Result<i64> {
    if !q.is_integer() {
        return Err(Error::NotIntegral(q.to_string()));
    }
    q.to_integer()
        .to_i64()
        .ok_or_else(|| Error::NotIntegral(q.to_string()))
}

/// Halves an even integer; errors on odd input.
pub fn half_even(n: i64) -> Result<i64> {
    if n.is_odd() {
        Err(Error::Parity(format!("{n} is odd")))
    } else {
        Ok(n / 2)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    Rational::from_str(s).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
}

/// Serde adapter for `Rational` fields, using the `"p/q"` string form.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(serde::de::Error::custom)
    }
}

/// An element `re + im·i` of `Q(i)`.
///
/// Ordering is lexicographic on `(re, im)`; exponent maps rely on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gaussian {
    pub re: Rational,
    pub im: Rational,
}

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn real(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }

    pub fn imag(im: Rational) -> Self {
        Self::new(Rational::zero(), im)
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(int(n))
    }

    /// `i^n` for any integer `n`.
    pub fn i_pow(n: i64) -> Self {
        match n.rem_euclid(4) {
            0 => Self::from_int(1),
            1 => Self::i(),
            2 => Self::from_int(-1),
            _ => -Self::i(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(&self.re * q, &self.im * q)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    /// The integer value of a Gaussian rational that is a rational integer.
    pub fn as_integer(&self) -> Option<i64> {
        if self.is_real() && self.re.is_integer() {
            self.re.to_integer().to_i64()
        } else {
            None
        }
    }
}

impl From<Rational> for Gaussian {
    fn from(re: Rational) -> Self {
        Self::real(re)
    }
}

impl From<i64> for Gaussian {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{} i", self.re, sign, self.im.abs())
    }
}

impl FromStr for Gaussian {
    type Err = Error;

    /// Accepts `"p/q"`, `"r/s i"`, and `"p/q+r/s i"` / `"p/q-r/s i"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix('i') else {
            return Ok(Self::real(parse_rational(s)?));
        };
        let body = body.trim_end();
        // The split point is the last sign that is not a leading sign.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(idx, _)| idx)
            .last();
        match split {
            Some(idx) => {
                let re = parse_rational(&body[..idx])?;
                let im_str = body[idx..].trim();
                let im = match im_str {
                    "+" => Rational::one(),
                    "-" => -Rational::one(),
                    other => parse_rational(other.trim_start_matches('+'))?,
                };
                Ok(Self::new(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => Rational::one(),
                    "-" => -Rational::one(),
                    other => parse_rational(other)?,
                };
                Ok(Self::imag(im))
            }
        }
    }
}

impl Serialize for Gaussian {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Gaussian {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for &Gaussian {
    type Output = Gaussian;
    fn add(self, rhs: &Gaussian) -> Gaussian {
        Gaussian::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Add for Gaussian {
    type Output = Gaussian;
    fn add(self, rhs: Gaussian) -> Gaussian {
        &self + &rhs
    }
}

impl AddAssign<&Gaussian> for Gaussian {
    fn add_assign(&mut self, rhs: &Gaussian) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for &Gaussian {
    type Output = Gaussian;
    fn sub(self, rhs: &Gaussian) -> Gaussian {
        Gaussian::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Sub for Gaussian {
    type Output = Gaussian;
    fn sub(self, rhs: Gaussian) -> Gaussian {
        &self - &rhs
    }
}

impl SubAssign<&Gaussian> for Gaussian {
    fn sub_assign(&mut self, rhs: &Gaussian) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Mul for &Gaussian {
    type Output = Gaussian;
    fn mul(self, rhs: &Gaussian) -> Gaussian {
        Gaussian::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Mul for Gaussian {
    type Output = Gaussian;
    fn mul(self, rhs: Gaussian) -> Gaussian {
        &self * &rhs
    }
}

impl MulAssign<&Gaussian> for Gaussian {
    fn mul_assign(&mut self, rhs: &Gaussian) {
        *self = &*self * rhs;
    }
}

impl Div for &Gaussian {
    type Output = Gaussian;
    /// Panics on division by zero, like the rational types underneath.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Gaussian) -> Gaussian {
        let inv = rhs.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

impl Div for Gaussian {
    type Output = Gaussian;
    fn div(self, rhs: Gaussian) -> Gaussian {
        &self / &rhs
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian::new(-self.re, -self.im)
    }
}

impl Neg for &Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian::new(-&self.re, -&self.im)
    }
}

impl Sum for Gaussian {
    fn sum<I: Iterator<Item = Gaussian>>(iter: I) -> Self {
        iter.fold(Gaussian::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(5), int(32));
        assert_eq!(pow2(-1), rat(1, 2));
        assert_eq!(pow2(0), int(1));
    }

    #[test]
    fn i_powers_cycle() {
        assert_eq!(Gaussian::i_pow(0), Gaussian::one());
        assert_eq!(Gaussian::i_pow(1), Gaussian::i());
        assert_eq!(Gaussian::i_pow(-1), -Gaussian::i());
        assert_eq!(Gaussian::i_pow(6), Gaussian::from_int(-1));
        assert_eq!(&Gaussian::i() * &Gaussian::i(), Gaussian::from_int(-1));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }

    #[test]
    fn gaussian_parse_forms() {
        assert_eq!(
            "3/4".parse::<Gaussian>().unwrap(),
            Gaussian::real(rat(3, 4))
        );
        assert_eq!("-2 i".parse::<Gaussian>().unwrap(), Gaussian::imag(int(-2)));
        assert_eq!(
            "-1/2-3 i".parse::<Gaussian>().unwrap(),
            Gaussian::new(rat(-1, 2), int(-3))
        );
        assert_eq!("0+1 i".parse::<Gaussian>().unwrap(), Gaussian::i());
        assert!("x+1 i".parse::<Gaussian>().is_err());
        assert_eq!(
            Gaussian::new(rat(1, 3), rat(-2, 5)).to_string(),
            "1/3-2/5 i"
        );
    }

    #[test]
    fn half_even_rejects_odd() {
        assert_eq!(half_even(-6).unwrap(), -3);
        assert!(half_even(3).is_err());
    }

    fn gaussian() -> impl Strategy<Value = Gaussian> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20)
            .prop_map(|(a, b, c, d)| Gaussian::new(rat(a, b), rat(c, d)))
    }

    proptest! {
        #[test]
        fn gaussian_string_round_trip(z in gaussian()) {
            let back: Gaussian = z.to_string().parse().unwrap();
            prop_assert_eq!(back, z);
        }

        #[test]
        fn gaussian_field_laws(a in gaussian(), b in gaussian(), c in gaussian()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }
    }
}
