use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// Truncated power series `c_0 + c_1 t + ... + c_N t^N + O(t^{N+1})` in the
/// radial variable `t = |w|^2`.
///
/// Coefficients `0..=order` are exact; nothing is known beyond. Binary
/// operations truncate to the smaller order.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialSeries<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> RadialSeries<S> {
    /// Series with the given coefficients, order `coeffs.len() - 1`.
    ///
    /// An empty vector is treated as the zero constant.
    pub fn new(mut coeffs: Vec<S>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(S::zero());
        }
        Self { coeffs }
    }

    /// A polynomial padded with exact zeros up to `order`.
    pub fn from_poly(poly: &[S], order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|i| poly.get(i).cloned().unwrap_or_else(S::zero))
            .collect();
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_poly(&[], order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(S::one(), order)
    }

    pub fn constant(c: S, order: usize) -> Self {
        Self::from_poly(&[c], order)
    }

    /// `t` itself.
    pub fn variable(order: usize) -> Self {
        Self::from_poly(&[S::zero(), S::one()], order)
    }

    /// `1 / (1 - t)`.
    pub fn geometric(order: usize) -> Self {
        Self::new(vec![S::one(); order + 1])
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> S) -> Self {
        Self::new((0..=order).map(f).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient of `t^i`; zero past the truncation order is *not* implied,
    /// so callers must stay within [`order`](Self::order).
    pub fn coeff(&self, i: usize) -> &S {
        &self.coeffs[i]
    }

    pub fn constant_term(&self) -> &S {
        &self.coeffs[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RadialSeries<T> {
        RadialSeries::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> RadialSeries<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    /// Equality of the coefficients both series know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a == b)
    }

    /// Coefficientwise agreement within `tol`, on the shared order.
    pub fn approx_agrees_with(&self, other: &Self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(a, b)| (a.to_f64() - b.to_f64()).abs() <= tol)
    }

    /// Index of the first shared coefficient where the two series differ.
    pub fn first_disagreement(&self, other: &Self) -> Option<usize> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b)
    }

    /// `1/f`. Requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let f0 = self.constant_term();
        if f0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = S::one() / f0.clone();
        let n = self.order();
        let mut g: Vec<S> = Vec::with_capacity(n + 1);
        g.push(inv0.clone());
        for k in 1..=n {
            let mut acc = S::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += self.coeffs[j].clone() * g[k - j].clone();
                }
            }
            g.push(-(acc * inv0.clone()));
        }
        Ok(Self::new(g))
    }

    /// `f / g` computed as `f * (1/g)`.
    pub fn div(&self, g: &Self) -> Result<Self> {
        Ok(self * &g.reciprocal()?)
    }

    /// Formal `d/dt`; the order drops by one.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |k| {
            self.coeffs[k + 1].clone() * from_usize(k + 1)
        })
    }

    /// `t * d/dt`, which keeps the order.
    pub fn euler(&self) -> Self {
        Self::from_fn(self.order(), |k| self.coeffs[k].clone() * from_usize(k))
    }

    /// `log f` for `f(0) = 1`, by integrating `f'/f` term by term.
    pub fn log(&self) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::ConstantTermNotOne);
        }
        let n = self.order();
        // n g_n = n f_n - sum_{k=1}^{n-1} k g_k f_{n-k}
        let mut g: Vec<S> = vec![S::zero(); n + 1];
        for m in 1..=n {
            let mut acc = self.coeffs[m].clone() * from_usize(m);
            for k in 1..m {
                if !self.coeffs[m - k].is_zero() && !g[k].is_zero() {
                    acc -= g[k].clone() * self.coeffs[m - k].clone() * from_usize(k);
                }
            }
            g[m] = acc / from_usize(m);
        }
        Ok(Self::new(g))
    }

    /// `exp f`. The constant term must have a representable exponential
    /// (for exact fields that means `f(0) = 0`).
    pub fn exp(&self) -> Result<Self> {
        let g0 = self
            .constant_term()
            .exp_scalar()
            .ok_or(Error::IrrationalScale)?;
        let n = self.order();
        // m g_m = sum_{k=1}^m k f_k g_{m-k}
        let mut g: Vec<S> = Vec::with_capacity(n + 1);
        g.push(g0);
        for m in 1..=n {
            let mut acc = S::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += self.coeffs[k].clone() * g[m - k].clone() * from_usize(k);
                }
            }
            g.push(acc / from_usize(m));
        }
        Ok(Self::new(g))
    }

    /// `f^r := exp(r log f)`.
    ///
    /// A constant term `c != 1` is factored out and `c^r` reapplied only when
    /// it is representable in the field; otherwise [`Error::IrrationalScale`].
    pub fn pow(&self, r: &S) -> Result<Self> {
        let c = self.constant_term().clone();
        if c.is_one() {
            return self.log()?.scale(r).exp();
        }
        if c.is_zero() {
            return Err(Error::ConstantTermNotOne);
        }
        let scale = c.pow_scalar(r).ok_or(Error::IrrationalScale)?;
        if !c.is_positive() {
            return Err(Error::ConstantTermNotOne);
        }
        let unit = self.scale(&(S::one() / c));
        Ok(unit.log()?.scale(r).exp()?.scale(&scale))
    }

    /// Repeated multiplication; negative exponents go through the reciprocal.
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 {
            self.reciprocal()?
        } else {
            self.clone()
        };
        let mut acc = Self::one(self.order());
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            k >>= 1;
        }
        Ok(acc)
    }

    /// `∂∂̄` of the radial function: `Σ_{n≥1} n² c_n t^{n-1}`.
    pub fn del_delbar(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |k| {
            let n: S = from_usize(k + 1);
            self.coeffs[k + 1].clone() * n.clone() * n
        })
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64())
    }
}

impl<'a, S: Scalar> Add<&'a RadialSeries<S>> for &'a RadialSeries<S> {
    type Output = RadialSeries<S>;

    fn add(self, rhs: &'a RadialSeries<S>) -> RadialSeries<S> {
        RadialSeries::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }
}

impl<'a, S: Scalar> Sub<&'a RadialSeries<S>> for &'a RadialSeries<S> {
    type Output = RadialSeries<S>;

    fn sub(self, rhs: &'a RadialSeries<S>) -> RadialSeries<S> {
        RadialSeries::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }
}

impl<S: Scalar> Neg for &RadialSeries<S> {
    type Output = RadialSeries<S>;

    fn neg(self) -> RadialSeries<S> {
        self.map(|c| -c.clone())
    }
}

impl<'a, S: Scalar> Mul<&'a RadialSeries<S>> for &'a RadialSeries<S> {
    type Output = RadialSeries<S>;

    /// Cauchy product truncated to the shared order.
    fn mul(self, rhs: &'a RadialSeries<S>) -> RadialSeries<S> {
        let n = self.order().min(rhs.order());
        let mut out = vec![S::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        RadialSeries::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<RadialSeries<S>> for RadialSeries<S> {
            type Output = RadialSeries<S>;
            fn $m(self, rhs: RadialSeries<S>) -> RadialSeries<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Scalar> Neg for RadialSeries<S> {
    type Output = RadialSeries<S>;
    fn neg(self) -> RadialSeries<S> {
        -&self
    }
}
