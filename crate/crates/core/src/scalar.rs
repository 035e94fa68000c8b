//! Exact complex numbers with arbitrary-precision rational parts.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use nalgebra::Complex;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Builds the rational `num/den`; panics on a zero denominator.
pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators and denominators: scale both down by the same power of two.
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses `p`, `p/q` or a finite decimal such as `-0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = |reason: &str| Error::Parse { input: s.to_string(), reason: reason.to_string() };
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err("empty rational"));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p).map_err(|_| err("bad numerator"))?;
        let q = BigInt::from_str(q).map_err(|_| err("bad denominator"))?;
        if q.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['+', '-']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(err("bad decimal"));
        }
        let n = BigInt::from_str(&digits).map_err(|_| err("bad decimal"))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = BigRational::new(n, d);
        return Ok(if negative { -q } else { q });
    }
    BigInt::from_str(&t).map(BigRational::from_integer).map_err(|_| err("bad integer"))
}

/// Complex number `re + im·i` with exact rational parts, always stored reduced.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        ComplexRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        ComplexRational { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(rational(num, den))
    }

    pub fn i() -> Self {
        ComplexRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexRational { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, k: &Rational) -> Self {
        ComplexRational { re: &self.re * k, im: &self.im * k }
    }

    pub fn inv(&self) -> Result<Self> {
        let d = self.norm_sqr();
        if d.is_zero() {
            return Err(Error::DivisionByZero("reciprocal of zero"));
        }
        Ok(ComplexRational { re: &self.re / &d, im: -(&self.im / &d) })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn powi(&self, exp: i64) -> Result<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn to_complex64(&self) -> Complex<f64> {
        Complex::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Debug for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{} i", self.im);
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{} i", self.re, sign, self.im.abs())
    }
}

impl FromStr for ComplexRational {
    type Err = Error;

    /// Accepts `p/q`, `p/q+r/s i`, `r/s i`, `i`, `-i` (whitespace ignored).
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Self::real(parse_rational(&t)?));
        };
        // Split off the imaginary part at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let im = match im_part {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => parse_rational(other).map_err(|_| Error::Parse {
                input: s.to_string(),
                reason: "bad imaginary part".into(),
            })?,
        };
        let re = if re_part.is_empty() { Rational::zero() } else { parse_rational(re_part)? };
        Ok(ComplexRational { re, im })
    }
}

impl From<i64> for ComplexRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for ComplexRational {
    fn from(q: Rational) -> Self {
        Self::real(q)
    }
}

impl Add<&ComplexRational> for &ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub<&ComplexRational> for &ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul<&ComplexRational> for &ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: &ComplexRational) -> ComplexRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return ComplexRational::real(&self.re * &rhs.re);
        }
        ComplexRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

/// Panics on division by zero; use [`ComplexRational::checked_div`] for fallible division.
impl Div<&ComplexRational> for &ComplexRational {
    type Output = ComplexRational;
    fn div(self, rhs: &ComplexRational) -> ComplexRational {
        self.checked_div(rhs).expect("division by zero complex rational")
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<ComplexRational> for ComplexRational {
            type Output = ComplexRational;
            fn $f(self, rhs: ComplexRational) -> ComplexRational {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&ComplexRational> for ComplexRational {
            type Output = ComplexRational;
            fn $f(self, rhs: &ComplexRational) -> ComplexRational {
                (&self).$f(rhs)
            }
        }
        impl $tr<ComplexRational> for &ComplexRational {
            type Output = ComplexRational;
            fn $f(self, rhs: ComplexRational) -> ComplexRational {
                self.$f(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        -&self
    }
}

impl AddAssign<&ComplexRational> for ComplexRational {
    fn add_assign(&mut self, rhs: &ComplexRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&ComplexRational> for ComplexRational {
    fn sub_assign(&mut self, rhs: &ComplexRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&ComplexRational> for ComplexRational {
    fn mul_assign(&mut self, rhs: &ComplexRational) {
        *self = &*self * rhs;
    }
}
