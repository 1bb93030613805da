//! Coefficient fields the series engine runs over.
//!
//! Everything in this crate is generic over [`Scalar`]. The exact path uses
//! [`Rational`] (arbitrary precision, always reduced); the float path uses
//! `f64` and is what grid evaluation and numeric cross-checks run on.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, NumAssign, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational in canonical form (denominator > 0, reduced).
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + NumAssign + Signed + Send + Sync + 'static
{
    fn from_i64(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn from_rational(q: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// `self^r` when it is representable in this field, `None` otherwise.
    fn pow_scalar(&self, r: &Self) -> Option<Self>;

    /// `e^self` when representable.
    fn exp_scalar(&self) -> Option<Self>;

    /// True for fields where `==` is an exact identity test.
    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn pow_scalar(&self, r: &Self) -> Option<Self> {
        if *self > 0.0 {
            Some(self.powf(*r))
        } else if r.fract() == 0.0 {
            Some(self.powi(*r as i32))
        } else {
            None
        }
    }

    fn exp_scalar(&self) -> Option<Self> {
        Some(self.exp())
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn pow_scalar(&self, r: &Self) -> Option<Self> {
        if r.is_integer() {
            let e = r.to_integer().to_i32()?;
            if self.is_zero() && e < 0 {
                return None;
            }
            return Some(num_traits::Pow::pow(self, e));
        }
        if !self.is_positive() {
            return None;
        }
        // self^(m/k) is rational iff numerator and denominator are perfect k-th powers.
        let k = r.denom().to_u32()?;
        let m = r.numer().to_i32()?;
        let p = exact_root(self.numer(), k)?;
        let q = exact_root(self.denom(), k)?;
        Some(num_traits::Pow::pow(&Rational::new(p, q), m))
    }

    fn exp_scalar(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }

    fn is_exact() -> bool {
        true
    }
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    (num_traits::Pow::pow(&r, k) == *n).then_some(r)
}

fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(x) = ToPrimitive::to_f64(q) {
        if x.is_finite() {
            return x;
        }
    }
    // Huge numerator and denominator: scale both down before dividing.
    let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
    let n = ToPrimitive::to_f64(&(q.numer() >> shift)).unwrap_or(f64::NAN);
    let d = ToPrimitive::to_f64(&(q.denom() >> shift)).unwrap_or(f64::NAN);
    n / d
}

/// Parses `"p/q"` or `"p"` into a canonical rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    (!den.is_zero()).then(|| Rational::new(num, den))
}

/// Binomial coefficient `C(x + i - 1, i)` for rational `x`: the rising
/// factorial `x (x+1) ... (x+i-1) / i!`.
pub fn rising_binomial<S: Scalar>(x: &S, i: usize) -> S {
    let mut acc = S::one();
    for j in 1..=i {
        acc = acc * (x.clone() + S::from_i64(j as i64 - 1)) / S::from_i64(j as i64);
    }
    acc
}

pub(crate) fn from_usize<S: Scalar>(n: usize) -> S {
    S::from_i64(n as i64)
}
