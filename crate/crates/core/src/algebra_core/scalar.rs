//! Coefficient field: exact Gaussian rationals with a float fallback.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type GaussRational = Complex<BigRational>;

/// A coefficient. Exact unless a transcendental operation forced promotion.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(GaussRational),
    Float(Complex64),
}

pub fn rat(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // to_f64 can fail for huge numerators/denominators; fall back to a scaled division
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Complex::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Complex::one())
    }

    pub fn i() -> Self {
        Scalar::Exact(Complex::new(Rational::zero(), Rational::one()))
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(Complex::new(Rational::from_integer(n.into()), Rational::zero()))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Exact(Complex::new(rat(p, q), Rational::zero()))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::Exact(Complex::new(r, Rational::zero()))
    }

    pub fn gauss(re: Rational, im: Rational) -> Self {
        Scalar::Exact(Complex::new(re, im))
    }

    pub fn real(x: f64) -> Self {
        Scalar::Float(Complex64::new(x, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.re.is_zero() && z.im.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(z) => Complex64::new(rat_to_f64(&z.re), rat_to_f64(&z.im)),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_c64())
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(z.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn as_exact(&self) -> Option<&GaussRational> {
        match self {
            Scalar::Exact(z) => Some(z),
            Scalar::Float(_) => None,
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Exact(z) => {
                let n = &z.re * &z.re + &z.im * &z.im;
                Scalar::Exact(Complex::new(&z.re / &n, -&z.im / &n))
            }
            Scalar::Float(z) => Scalar::Float(z.inv()),
        })
    }

    /// Integer power, exact when the base is exact.
    pub fn powi(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale_f64(&self, x: f64) -> Scalar {
        Scalar::Float(self.to_c64() * x)
    }

    /// Exponential; exact only at zero.
    pub fn exp(&self) -> Scalar {
        if self.is_zero() && self.is_exact() {
            Scalar::one()
        } else {
            Scalar::Float(self.to_c64().exp())
        }
    }

    /// Distance to another scalar, in the complex modulus.
    pub fn dist(&self, other: &Scalar) -> f64 {
        (self - other).abs()
    }

    pub fn re_string(&self) -> String {
        match self {
            Scalar::Exact(z) => rational_string(&z.re),
            Scalar::Float(z) => format!("{}", z.re),
        }
    }

    pub fn im_string(&self) -> String {
        match self {
            Scalar::Exact(z) => rational_string(&z.im),
            Scalar::Float(z) => format!("{}", z.im),
        }
    }

    /// Parse "p/q", "p" or a decimal float.
    pub fn parse_parts(re: &str, im: &str) -> Result<Scalar> {
        match (parse_rational(re), parse_rational(im)) {
            (Some(a), Some(b)) => Ok(Scalar::gauss(a, b)),
            _ => {
                let a: f64 = re
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient '{re}'")))?;
                let b: f64 = im
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient '{im}'")))?;
                Ok(Scalar::complex(a, b))
            }
        }
    }
}

fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(BigRational::new(p, q))
    } else {
        let p: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(p))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_c64() == other.to_c64(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) => {
                if z.im.is_zero() {
                    write!(f, "{}", rational_string(&z.re))
                } else if z.re.is_zero() {
                    write!(f, "{}i", rational_string(&z.im))
                } else {
                    let sign = if z.im.is_negative() { "-" } else { "+" };
                    write!(f, "({}{}{}i)", rational_string(&z.re), sign, rational_string(&z.im.abs()))
                }
            }
            Scalar::Float(z) => write!(f, "({:.6e}{:+.6e}i)", z.re, z.im),
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Float(self.to_c64() + rhs.to_c64()),
        }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => Scalar::Float(self.to_c64() - rhs.to_c64()),
        }
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                // skip the four-product path for real operands
                if a.im.is_zero() && b.im.is_zero() {
                    Scalar::Exact(Complex::new(&a.re * &b.re, Rational::zero()))
                } else {
                    Scalar::Exact(a * b)
                }
            }
            _ => Scalar::Float(self.to_c64() * rhs.to_c64()),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a.clone()),
            Scalar::Float(a) => Scalar::Float(-a),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(a) => Scalar::Float(-a),
        }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                a.re += &b.re;
                a.im += &b.im;
            }
            _ => *self = Scalar::Float(self.to_c64() + rhs.to_c64()),
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                a.re -= &b.re;
                a.im -= &b.im;
            }
            _ => *self = Scalar::Float(self.to_c64() - rhs.to_c64()),
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::i();
        let c = &(&a * &b) + &a;
        assert!(c.is_exact());
        assert_eq!(c.re_string(), "1/3");
        assert_eq!(c.im_string(), "1/3");
        let inv = c.inv().unwrap();
        assert_eq!(&inv * &c, Scalar::one());
    }

    #[test]
    fn i_squared() {
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::int(-1));
    }

    #[test]
    fn promotion_on_mix() {
        let a = Scalar::ratio(1, 2);
        let b = Scalar::real(0.25);
        let c = &a + &b;
        assert!(!c.is_exact());
        assert!((c.to_c64().re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn parse_round_trip() {
        let s = Scalar::parse_parts("-3/4", "5").unwrap();
        assert_eq!(s, Scalar::gauss(rat(-3, 4), rat(5, 1)));
        assert!(Scalar::parse_parts("0.5", "0").unwrap().to_c64().re == 0.5);
        assert!(Scalar::parse_parts("x", "0").is_err());
    }

    #[test]
    fn zero_inverse_errors() {
        assert!(Scalar::zero().inv().is_err());
    }
}
