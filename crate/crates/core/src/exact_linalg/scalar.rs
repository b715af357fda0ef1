//! The scalar field: Gaussian rationals a + b*i with exact rational a, b.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::LinAlgError;

/// Exact rational number, always reduced, denominator > 0.
pub type Rational = num_rational::BigRational;

/// A complex number with rational real and imaginary parts.
///
/// The field operations are exact; in particular `a * b / b == a` holds as a
/// literal equality whenever `b != 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(Rational::from_integer(BigInt::from(n)), Rational::zero())
    }

    pub fn from_rational(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }

    /// `p/q` as a real Gaussian rational. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 = re^2 + im^2, an exact rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `DivisionByZero` on zero.
    pub fn inv(&self) -> Result<Self, LinAlgError> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(LinAlgError::DivisionByZero);
        }
        Ok(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, LinAlgError> {
        Ok(self * &rhs.inv()?)
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let im_mag = fmt_rat(&self.im.abs());
        let im_part = if self.im.is_negative() {
            format!("-{im_mag}i")
        } else {
            format!("{im_mag}i")
        };
        if self.re.is_zero() {
            write!(f, "{im_part}")
        } else if self.im.is_negative() {
            write!(f, "{}{}", fmt_rat(&self.re), im_part)
        } else {
            write!(f, "{}+{}", fmt_rat(&self.re), im_part)
        }
    }
}

fn fmt_rat(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical `"p/q"` encoding used by the matrix interchange format.
/// Always carries the denominator, e.g. `3` prints as `"3/1"`.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p"` or `"p/q"`; result is reduced with positive denominator.
pub fn parse_rational(s: &str) -> Result<Rational, LinAlgError> {
    let bad = |msg: &str| LinAlgError::BadScalar { literal: s.to_string(), msg: msg.to_string() };
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer = BigInt::from_str(num_str.trim()).map_err(|_| bad("bad numerator"))?;
    let denom = match den_str {
        Some(d) => BigInt::from_str(d.trim()).map_err(|_| bad("bad denominator"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

impl FromStr for GaussianRational {
    type Err = LinAlgError;

    /// Parses complex literals like `2`, `-1/2`, `i`, `-i`, `3i`, `1+1i`,
    /// `1/2-3/4i`. Whitespace around the literal is ignored.
    fn from_str(s: &str) -> Result<Self, LinAlgError> {
        let t = s.trim();
        let bad = |msg: &str| LinAlgError::BadScalar { literal: s.to_string(), msg: msg.to_string() };
        if t.is_empty() {
            return Err(bad("empty literal"));
        }
        // Pure imaginary shorthand: "i" and "-i".
        if t == "i" {
            return Ok(Self::i());
        }
        if t == "-i" {
            return Ok(-Self::i());
        }
        if let Some(im) = t.strip_suffix('i') {
            // No second sign inside -> purely imaginary, e.g. "3/4i".
            let body = im.trim();
            let inner: String = body.chars().skip(1).collect();
            if !inner.contains('+') && !inner.contains('-') {
                let coeff = if body.is_empty() { Rational::one() } else { parse_rational(body)? };
                return Ok(Self::new(Rational::zero(), coeff));
            }
        }
        match t.strip_suffix('i') {
            None => Ok(Self::from_rational(parse_rational(t)?)),
            Some(body) => {
                // Split "re±im" at the last top-level sign.
                let split = body
                    .char_indices()
                    .skip(1)
                    .filter(|&(idx, c)| {
                        (c == '+' || c == '-')
                            && !matches!(body.as_bytes()[idx - 1], b'/' | b'+' | b'-')
                    })
                    .map(|(idx, _)| idx)
                    .last()
                    .ok_or_else(|| bad("missing sign before imaginary part"))?;
                let re = parse_rational(&body[..split])?;
                let im_str = body[split..].trim();
                let im = match im_str {
                    "+" => Rational::one(),
                    "-" => -Rational::one(),
                    _ => parse_rational(im_str)?,
                };
                Ok(Self::new(re, im))
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl $trait<GaussianRational> for &GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}
forward_binop!(Add, add);

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}
forward_binop!(Sub, sub);

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}
forward_binop!(Mul, mul);

impl Div<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self.checked_div(rhs).expect("division by zero")
    }
}
forward_binop!(Div, div);

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = (&*self) * rhs;
    }
}
