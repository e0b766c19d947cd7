//! Exact Gaussian-rational scalars: complex numbers whose real and imaginary
//! parts are arbitrary-precision rationals.
//!
//! The exact path of the library runs all of its elimination and chain
//! arithmetic over these scalars so that fixtures with rational data can be
//! checked bit-for-bit instead of within a floating-point tolerance.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A complex number with exact rational real and imaginary parts, kept in
/// lowest terms by the underlying `BigRational` representation.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactScalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactScalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// Real rational p/q. Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::zero(),
        )
    }

    pub fn from_re(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    /// Exact conversion of a finite double: every finite `f64` is a dyadic
    /// rational, so this never loses information. Returns `None` for NaN or
    /// infinities.
    pub fn from_f64_exact(re: f64, im: f64) -> Option<Self> {
        Some(Self::new(
            BigRational::from_float(re)?,
            BigRational::from_float(im)?,
        ))
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

    /// |z|^2 as an exact rational (the modulus itself is generally irrational).
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse. Panics if `self` is zero.
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by exact zero");
        Self::new(&self.re / &n, -&self.im / &n)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// Total order usable for deterministic pivoting / sorting of exact values
    /// (lexicographic on real then imaginary part).
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

/// Convert a `BigRational` to the nearest `f64` by dividing numerator by
/// denominator in floating point at full precision.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Fast path: both parts fit in i64.
    if let (Some(n), Some(d)) = (to_i64(r.numer()), to_i64(r.denom())) {
        return n as f64 / d as f64;
    }
    // General path: scale down exponents until the parts fit in doubles.
    let n = bigint_to_f64(r.numer());
    let d = bigint_to_f64(r.denom());
    n / d
}

fn to_i64(b: &BigInt) -> Option<i64> {
    use num::ToPrimitive;
    b.to_i64()
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    use num::ToPrimitive;
    b.to_f64().unwrap_or(f64::INFINITY)
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &ExactScalar {
    type Output = ExactScalar;
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        self * &rhs.inv()
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for ExactScalar {
    /// Renders `a`, `bi`, or `a+bi` with rational parts printed as `p/q`
    /// (or plain integers). The output parses back to the identical value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut wrote_re = false;
        if !self.re.is_zero() {
            write!(f, "{}", format_rational(&self.re))?;
            wrote_re = true;
        }
        if !self.im.is_zero() {
            if wrote_re && self.im.is_positive() {
                write!(f, "+")?;
            }
            write!(f, "{}i", format_rational(&self.im))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
