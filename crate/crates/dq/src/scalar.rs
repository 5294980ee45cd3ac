//! The scalar field: Gaussian rationals `Q(i)`.
//!
//! All coefficients in the crate live here. Components are arbitrary
//! precision rationals (`num_rational::BigRational`), so every operation in
//! the library is exact and every test can assert equality instead of a
//! tolerance.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{DqError, Result};

pub type Rational = BigRational;

/// `re + i*im` with exact rational parts.
///
/// Fractions are kept reduced with positive denominators by `BigRational`
/// itself; no normalization pass is ever needed.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(Rational::from_integer(BigInt::from(n)), Rational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            Rational::new(BigInt::from(num), BigInt::from(den)),
            Rational::zero(),
        )
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::new(r, Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(DqError::NonInvertibleSeries);
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Ok(Self::new(&self.re / &norm, -(&self.im / &norm)))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Sign used when joining terms in pretty-printed sums: a value prints
    /// after a `-` when its leading nonzero part is negative.
    pub fn is_negative_leaning(&self) -> bool {
        if !self.re.is_zero() {
            self.re.is_negative()
        } else {
            self.im.is_negative()
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "re": self.re.to_string(),
            "im": self.im.to_string(),
        })
    }

    /// Canonical expression string; `parenthesized` requests wrapping when
    /// both parts are nonzero (for use as a multiplicative coefficient).
    pub fn expr_string(&self, parenthesized: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let im_part = |im: &Rational| -> String {
            if im.is_one() {
                "i".to_string()
            } else if (-im).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", im)
            }
        };
        if self.im.is_zero() {
            self.re.to_string()
        } else if self.re.is_zero() {
            im_part(&self.im)
        } else {
            let joined = if self.im.is_negative() {
                format!("{} - {}", self.re, im_part(&-self.im.clone()))
            } else {
                format!("{} + {}", self.re, im_part(&self.im))
            };
            if parenthesized {
                format!("({})", joined)
            } else {
                joined
            }
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr_string(false))
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_value_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                $trait::$method(&self, &rhs)
            }
        }
    )*};
}
forward_value_ops!(Add::add, Sub::sub, Mul::mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

/// Exact rational `n!`.
pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = GaussianRational::from_ratio(1, 3);
        let b = GaussianRational::from_ratio(1, 6);
        assert_eq!(&a + &b, GaussianRational::from_ratio(1, 2));
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_int(-1));
    }

    #[test]
    fn inverse() {
        let z = GaussianRational::new(
            Rational::new(BigInt::from(1), BigInt::from(2)),
            Rational::new(BigInt::from(-3), BigInt::from(4)),
        );
        let w = z.inv().unwrap();
        assert!((&z * &w).is_one());
        assert_eq!(
            GaussianRational::zero().inv(),
            Err(DqError::NonInvertibleSeries)
        );
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussianRational::zero().to_string(), "0");
        assert_eq!(GaussianRational::from_ratio(-1, 2).to_string(), "-1/2");
        assert_eq!(GaussianRational::i().to_string(), "i");
        assert_eq!((-GaussianRational::i()).to_string(), "-i");
        let z = GaussianRational::new(
            Rational::from_integer(BigInt::from(1)),
            Rational::new(BigInt::from(-2), BigInt::from(3)),
        );
        assert_eq!(z.to_string(), "1 - 2/3*i");
        assert_eq!(z.expr_string(true), "(1 - 2/3*i)");
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), Rational::one());
        assert_eq!(factorial(5), Rational::from_integer(BigInt::from(120)));
    }
}
