use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::radial::RadialSeries;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

#[inline]
fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + i
}

/// Truncated series `Σ_{i+j ≤ N} c_{ij} u^i v^j` in two commuting formal
/// variables, where `u` stands for `w` and `v` for `w̄`.
///
/// Coefficients are real, so complex conjugation is the `(i, j) ↦ (j, i)`
/// swap. Storage is dense over the triangle `i + j ≤ N`, ordered by total
/// degree.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<S> {
    order: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> BiSeries<S> {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            coeffs: vec![S::zero(); index(0, order + 1)],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(S::one(), order)
    }

    pub fn constant(c: S, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c u^i v^j`, or zero if the monomial is beyond `order`.
    pub fn monomial(c: S, i: usize, j: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if i + j <= order {
            s.coeffs[index(i, j)] = c;
        }
        s
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut s = Self::zero(order);
        for d in 0..=order {
            for i in 0..=d {
                s.coeffs[index(i, d - i)] = f(i, d - i);
            }
        }
        s
    }

    /// `p(u)` for a polynomial `p` with coefficients lowest degree first.
    pub fn poly_in_u(poly: &[S], order: usize) -> Self {
        Self::from_fn(order, |i, j| {
            if j == 0 {
                poly.get(i).cloned().unwrap_or_else(S::zero)
            } else {
                S::zero()
            }
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> &S {
        &self.coeffs[index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, c: S) {
        self.coeffs[index(i, j)] = c;
    }

    pub fn constant_term(&self) -> &S {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Iterator over `(i, j, c_ij)` for nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        (0..=self.order)
            .flat_map(|d| (0..=d).map(move |i| (i, d - i)))
            .map(|(i, j)| (i, j, &self.coeffs[index(i, j)]))
            .filter(|(_, _, c)| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self {
            order,
            coeffs: self.coeffs[..index(0, order + 1)].to_vec(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BiSeries<T> {
        BiSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    /// Complex conjugate: swap the roles of `u` and `v`.
    pub fn conj(&self) -> Self {
        Self::from_fn(self.order, |i, j| self.coeff(j, i).clone())
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = index(0, self.order.min(other.order) + 1);
        self.coeffs[..n] == other.coeffs[..n]
    }

    /// `∂/∂u`; order drops by one.
    pub fn d_u(&self) -> Self {
        if self.order == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order - 1, |i, j| {
            self.coeff(i + 1, j).clone() * from_usize(i + 1)
        })
    }

    /// `∂/∂v`; order drops by one.
    pub fn d_v(&self) -> Self {
        if self.order == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order - 1, |i, j| {
            self.coeff(i, j + 1).clone() * from_usize(j + 1)
        })
    }

    /// `d_u^a d_v^b`.
    pub fn d(&self, a: usize, b: usize) -> Self {
        let mut s = self.clone();
        for _ in 0..a {
            s = s.d_u();
        }
        for _ in 0..b {
            s = s.d_v();
        }
        s
    }

    pub fn is_radial(&self) -> bool {
        self.terms().all(|(i, j, _)| i == j)
    }

    /// Embeds `f(t)` as `f(uv)`. Radial order `N` becomes bivariate order
    /// `2N + 1`, since every off-diagonal coefficient is an exact zero.
    pub fn lift(f: &RadialSeries<S>) -> Self {
        let order = 2 * f.order() + 1;
        Self::from_fn(order, |i, j| {
            if i == j {
                f.coeff(i).clone()
            } else {
                S::zero()
            }
        })
    }

    /// Inverse of [`lift`](Self::lift) on radial series.
    pub fn restrict(&self) -> Result<RadialSeries<S>> {
        if !self.is_radial() {
            return Err(Error::NotRadial);
        }
        let n = self.order / 2;
        Ok(RadialSeries::from_fn(n, |k| self.coeff(k, k).clone()))
    }

    /// `1/f` by the graded recurrence `g_{ij} = -(1/f_00) Σ f_{ab} g_{i-a,j-b}`.
    pub fn reciprocal(&self) -> Result<Self> {
        let f0 = self.constant_term().clone();
        if f0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = S::one() / f0;
        let terms: Vec<(usize, usize, S)> = self
            .terms()
            .filter(|&(i, j, _)| i + j > 0)
            .map(|(i, j, c)| (i, j, c.clone()))
            .collect();
        let mut g = Self::zero(self.order);
        g.coeffs[0] = inv0.clone();
        for d in 1..=self.order {
            for i in 0..=d {
                let j = d - i;
                let mut acc = S::zero();
                for (a, b, c) in &terms {
                    if *a <= i && *b <= j {
                        let prev = g.coeff(i - a, j - b);
                        if !prev.is_zero() {
                            acc += c.clone() * prev.clone();
                        }
                    }
                }
                g.coeffs[index(i, j)] = -(acc * inv0.clone());
            }
        }
        Ok(g)
    }

    /// Total-degree Euler operator `u ∂_u + v ∂_v`.
    pub fn euler(&self) -> Self {
        Self::from_fn(self.order, |i, j| self.coeff(i, j).clone() * from_usize(i + j))
    }

    /// Inverse Euler operator on series without constant term.
    fn euler_inverse(&self) -> Self {
        Self::from_fn(self.order, |i, j| {
            if i + j == 0 {
                S::zero()
            } else {
                self.coeff(i, j).clone() / from_usize(i + j)
            }
        })
    }

    /// `log f` for `f(0,0) = 1`, via `E log f = (E f) / f`.
    pub fn log(&self) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::ConstantTermNotOne);
        }
        Ok((&self.euler() * &self.reciprocal()?).euler_inverse())
    }

    /// Evaluates at `u = x`, `v = y` (real arguments).
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.terms()
            .map(|(i, j, c)| c.to_f64() * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }
}

impl<'a, S: Scalar> Add<&'a BiSeries<S>> for &'a BiSeries<S> {
    type Output = BiSeries<S>;

    fn add(self, rhs: &'a BiSeries<S>) -> BiSeries<S> {
        let order = self.order.min(rhs.order);
        let n = index(0, order + 1);
        BiSeries {
            order,
            coeffs: self.coeffs[..n]
                .iter()
                .zip(&rhs.coeffs[..n])
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<'a, S: Scalar> Sub<&'a BiSeries<S>> for &'a BiSeries<S> {
    type Output = BiSeries<S>;

    fn sub(self, rhs: &'a BiSeries<S>) -> BiSeries<S> {
        let order = self.order.min(rhs.order);
        let n = index(0, order + 1);
        BiSeries {
            order,
            coeffs: self.coeffs[..n]
                .iter()
                .zip(&rhs.coeffs[..n])
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Neg for &BiSeries<S> {
    type Output = BiSeries<S>;

    fn neg(self) -> BiSeries<S> {
        self.map(|c| -c.clone())
    }
}

impl<'a, S: Scalar> Mul<&'a BiSeries<S>> for &'a BiSeries<S> {
    type Output = BiSeries<S>;

    fn mul(self, rhs: &'a BiSeries<S>) -> BiSeries<S> {
        let order = self.order.min(rhs.order);
        let mut out = BiSeries::zero(order);
        let rt: Vec<(usize, usize, &S)> = rhs
            .terms()
            .filter(|t| t.0 + t.1 <= order && !t.2.is_zero())
            .collect();
        for (i, j, a) in self.terms() {
            if i + j > order {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for &(k, l, b) in &rt {
                if i + j + k + l > order {
                    break;
                }
                out.coeffs[index(i + k, j + l)] += a.clone() * b.clone();
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<BiSeries<S>> for BiSeries<S> {
            type Output = BiSeries<S>;
            fn $m(self, rhs: BiSeries<S>) -> BiSeries<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Scalar> Neg for BiSeries<S> {
    type Output = BiSeries<S>;
    fn neg(self) -> BiSeries<S> {
        -&self
    }
}
