use std::ops::{Add, Mul, Neg, Sub};

use super::linalg::{self, Dense};
use crate::error::{Error, Result};
use crate::fps::BiSeries;
use crate::scalar::Scalar;

/// Square matrix of [`BiSeries`], row-major. All entries share one order.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix<S> {
    n: usize,
    entries: Vec<BiSeries<S>>,
}

/// Gram matrices use the convention `h_ij = <γ_j, γ_i>`.
pub type GramSeriesMatrix<S> = SeriesMatrix<S>;

impl<S: Scalar> SeriesMatrix<S> {
    /// Entries are truncated to the smallest order among them.
    pub fn new(n: usize, entries: Vec<BiSeries<S>>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        let order = entries.iter().map(BiSeries::order).min().unwrap_or(0);
        let entries = entries
            .into_iter()
            .map(|e| if e.order() == order { e } else { e.truncate(order) })
            .collect();
        Ok(Self { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BiSeries<S>) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(n, entries).expect("shape is consistent")
    }

    pub fn identity(n: usize, order: usize) -> Self {
        Self::from_fn(n, |i, j| {
            if i == j {
                BiSeries::one(order)
            } else {
                BiSeries::zero(order)
            }
        })
    }

    pub fn zero(n: usize, order: usize) -> Self {
        Self::from_fn(n, |_, _| BiSeries::zero(order))
    }

    /// A rank-one matrix `[f]`.
    pub fn scalar(f: BiSeries<S>) -> Self {
        Self::new(1, vec![f]).expect("one entry")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    pub fn get(&self, i: usize, j: usize) -> &BiSeries<S> {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[BiSeries<S>] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&BiSeries<S>) -> BiSeries<S>) -> Self {
        Self::new(self.n, self.entries.iter().map(f).collect()).expect("same shape")
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|e| e.truncate(order))
    }

    pub fn d_u(&self) -> Self {
        self.map(BiSeries::d_u)
    }

    pub fn d_v(&self) -> Self {
        self.map(BiSeries::d_v)
    }

    /// Conjugate transpose: entry `(i, j)` is the swap of entry `(j, i)`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn constant_matrix(&self) -> Dense<S> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).constant_term().clone()).collect())
            .collect()
    }

    /// Hermitian with a positive definite constant term.
    pub fn is_gram(&self) -> bool {
        self.is_hermitian() && linalg::is_positive_definite(&self.constant_matrix())
    }

    pub fn trace(&self) -> BiSeries<S> {
        (1..self.n).fold(self.get(0, 0).clone(), |acc, i| &acc + self.get(i, i))
    }

    /// Multiplies every entry by `f`.
    pub fn scale_by(&self, f: &BiSeries<S>) -> Self {
        self.map(|e| e * f)
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.agrees_with(b))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(BiSeries::is_zero)
    }

    /// Laplace expansion along the first row.
    pub fn det(&self) -> BiSeries<S> {
        fn go<S: Scalar>(m: &SeriesMatrix<S>, rows: &[usize], cols: &[usize]) -> BiSeries<S> {
            if rows.len() == 1 {
                return m.get(rows[0], cols[0]).clone();
            }
            let mut acc = BiSeries::zero(m.order());
            for (k, &c) in cols.iter().enumerate() {
                let e = m.get(rows[0], c);
                if e.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = e * &go(m, &rows[1..], &rest);
                acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        let idx: Vec<usize> = (0..self.n).collect();
        go(self, &idx, &idx)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.n, self.order()))
    }

    /// `h⁻¹ r` by the graded recurrence
    /// `H_00 X_ij = R_ij - Σ_{(a,b) ≠ 0} H_ab X_{i-a,j-b}` over matrix-valued
    /// coefficients.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        check_shape(self, rhs);
        let n = self.n;
        let order = self.order().min(rhs.order());
        let h00_inv = linalg::inverse(&self.constant_matrix())?;
        let coeff_matrix = |m: &Self, i: usize, j: usize| -> Option<Dense<S>> {
            let c: Dense<S> = (0..n)
                .map(|r| (0..n).map(|c| m.get(r, c).coeff(i, j).clone()).collect())
                .collect();
            c.iter().flatten().any(|x| !x.is_zero()).then_some(c)
        };
        let mut h_terms = Vec::new();
        for d in 1..=order {
            for i in 0..=d {
                if let Some(m) = coeff_matrix(self, i, d - i) {
                    h_terms.push((i, d - i, m));
                }
            }
        }
        let slot = |i: usize, j: usize| {
            let d = i + j;
            d * (d + 1) / 2 + i
        };
        // x[slot(i, j)] is None when that coefficient matrix vanishes.
        let mut x: Vec<Option<Dense<S>>> = Vec::with_capacity(slot(0, order + 1));
        for d in 0..=order {
            for i in 0..=d {
                let j = d - i;
                let mut acc = coeff_matrix(rhs, i, j);
                for (a, b, h) in &h_terms {
                    if *a > i || *b > j {
                        continue;
                    }
                    let Some(prev) = &x[slot(i - a, j - b)] else {
                        continue;
                    };
                    let p = linalg::mat_mul(h, prev);
                    acc = Some(match acc {
                        None => p.into_iter().map(|row| row.into_iter().map(|v| -v).collect()).collect(),
                        Some(s) => sub_dense(s, &p),
                    });
                }
                x.push(acc.and_then(|s| {
                    let r = linalg::mat_mul(&h00_inv, &s);
                    r.iter().flatten().any(|v| !v.is_zero()).then_some(r)
                }));
            }
        }
        let mut out = Self::zero(n, order);
        for d in 0..=order {
            for i in 0..=d {
                if let Some(m) = &x[slot(i, d - i)] {
                    for r in 0..n {
                        for c in 0..n {
                            if !m[r][c].is_zero() {
                                out.entries[r * n + c].set(i, d - i, m[r][c].clone());
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Inverse by Newton iteration `X ← X (2I - H X)` from the constant-term
    /// inverse, doubling the number of correct degrees each step.
    pub fn newton_inverse(&self) -> Result<Self> {
        let n = self.n;
        let order = self.order();
        let h00_inv = linalg::inverse(&self.constant_matrix())?;
        let mut x = Self::from_fn(n, |i, j| BiSeries::constant(h00_inv[i][j].clone(), order));
        let two = Self::identity(n, order).map(|e| e.scale(&S::from_i64(2)));
        let mut correct = 1;
        while correct <= order {
            x = &x * &(&two - &(self * &x));
            correct *= 2;
        }
        Ok(x)
    }

    pub fn commutator(a: &Self, b: &Self) -> Self {
        &(a * b) - &(b * a)
    }
}

fn sub_dense<S: Scalar>(mut a: Dense<S>, b: &Dense<S>) -> Dense<S> {
    for (r, s) in a.iter_mut().zip(b) {
        for (x, y) in r.iter_mut().zip(s) {
            *x -= y.clone();
        }
    }
    a
}

fn check_shape<S>(a: &SeriesMatrix<S>, b: &SeriesMatrix<S>) {
    assert_eq!(a.n, b.n, "matrix dimensions differ");
}

impl<'a, S: Scalar> Add<&'a SeriesMatrix<S>> for &'a SeriesMatrix<S> {
    type Output = SeriesMatrix<S>;
    fn add(self, rhs: &'a SeriesMatrix<S>) -> SeriesMatrix<S> {
        check_shape(self, rhs);
        SeriesMatrix::from_fn(self.n, |i, j| self.get(i, j) + rhs.get(i, j))
    }
}

impl<'a, S: Scalar> Sub<&'a SeriesMatrix<S>> for &'a SeriesMatrix<S> {
    type Output = SeriesMatrix<S>;
    fn sub(self, rhs: &'a SeriesMatrix<S>) -> SeriesMatrix<S> {
        check_shape(self, rhs);
        SeriesMatrix::from_fn(self.n, |i, j| self.get(i, j) - rhs.get(i, j))
    }
}

impl<'a, S: Scalar> Mul<&'a SeriesMatrix<S>> for &'a SeriesMatrix<S> {
    type Output = SeriesMatrix<S>;
    fn mul(self, rhs: &'a SeriesMatrix<S>) -> SeriesMatrix<S> {
        check_shape(self, rhs);
        let order = self.order().min(rhs.order());
        SeriesMatrix::from_fn(self.n, |i, j| {
            let mut acc = BiSeries::zero(order);
            for k in 0..self.n {
                let (a, b) = (self.get(i, k), rhs.get(k, j));
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        })
    }
}

impl<S: Scalar> Neg for &SeriesMatrix<S> {
    type Output = SeriesMatrix<S>;
    fn neg(self) -> SeriesMatrix<S> {
        self.map(|e| -e)
    }
}

impl<S: Scalar> Neg for SeriesMatrix<S> {
    type Output = SeriesMatrix<S>;
    fn neg(self) -> SeriesMatrix<S> {
        -&self
    }
}

/// `𝒦 = -∂̄(h⁻¹ ∂h)`; the order drops by two.
pub fn curvature_matrix<S: Scalar>(h: &SeriesMatrix<S>) -> Result<SeriesMatrix<S>> {
    Ok(-h.solve(&h.d_u())?.d_v())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    W,
    WBar,
}

/// `𝒦_w = ∂𝒦 + [h⁻¹∂h, 𝒦]` and `𝒦_w̄ = ∂̄𝒦`.
pub fn covariant_derivative<S: Scalar>(
    h: &SeriesMatrix<S>,
    k: &SeriesMatrix<S>,
    direction: Direction,
) -> Result<SeriesMatrix<S>> {
    if h.dim() != k.dim() {
        return Err(Error::ShapeMismatch(format!(
            "metric is {0}x{0}, curvature is {1}x{1}",
            h.dim(),
            k.dim()
        )));
    }
    match direction {
        Direction::WBar => Ok(k.d_v()),
        Direction::W => {
            let conn = &h.inverse()? * &h.d_u();
            Ok(&k.d_u() + &SeriesMatrix::commutator(&conn, k))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::RadialSeries;
    use crate::scalar::Rational;

    type M = SeriesMatrix<Rational>;
    type B = BiSeries<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn power(alpha: i64, order: usize) -> RadialSeries<Rational> {
        RadialSeries::from_fn(order, |n| crate::scalar::rising_binomial(&Rational::from_i64(alpha), n))
    }

    fn sample() -> M {
        let h0 = B::lift(&power(1, 6));
        let off = B::from_fn(h0.order(), |i, j| if j == 0 && i <= 2 { q(i as i64 + 1, 3) } else { q(0, 1) });
        M::from_fn(2, |i, j| match (i, j) {
            (0, 0) => h0.clone(),
            (0, 1) => off.clone(),
            (1, 0) => off.conj(),
            _ => (&h0 + &B::monomial(q(2, 1), 1, 1, 13)) + B::constant(q(1, 1), 13),
        })
    }

    #[test]
    fn inverse_agrees_with_newton() {
        let h = sample();
        let a = h.inverse().unwrap();
        let b = h.newton_inverse().unwrap();
        assert!(a.agrees_with(&b));
        assert!((&h * &a).agrees_with(&M::identity(2, h.order())));
    }

    #[test]
    fn rank_one_bergman_curvature() {
        let h = M::scalar(B::lift(&power(2, 8)));
        let k = curvature_matrix(&h).unwrap();
        let r = k.get(0, 0).restrict().unwrap();
        for n in 0..=r.order() {
            assert_eq!(*r.coeff(n), Rational::from_i64(-2 * (n as i64 + 1)));
        }
    }

    #[test]
    fn flat_bundle() {
        let id = M::identity(3, 6);
        assert!(curvature_matrix(&id).unwrap().is_zero());
        let z = M::zero(3, 6);
        assert!(covariant_derivative(&id, &z, Direction::W).unwrap().is_zero());
    }

    #[test]
    fn rank_one_covariant_derivative_is_plain() {
        let h = M::scalar(B::lift(&power(1, 8)));
        let k = curvature_matrix(&h).unwrap();
        let kw = covariant_derivative(&h, &k, Direction::W).unwrap();
        assert!(kw.agrees_with(&k.d_u()));
        // 𝒦 = -Σ (n+1) u^n v^n, so 𝒦_w̄ = -Σ n(n+1) u^n v^{n-1}
        let kv = covariant_derivative(&h, &k, Direction::WBar).unwrap();
        let e = kv.get(0, 0);
        for n in 1..=e.order() / 2 {
            assert_eq!(*e.coeff(n, n - 1), Rational::from_i64(-((n * (n + 1)) as i64)));
        }
    }

    #[test]
    fn singular_constant_term() {
        let h = M::from_fn(2, |_, _| B::one(4));
        assert_eq!(curvature_matrix(&h), Err(Error::SingularConstantTerm));
    }

    #[test]
    fn trace_matches_log_det() {
        let h = sample();
        assert!(h.is_gram());
        let trace = curvature_matrix(&h).unwrap().trace();
        let det = h.det();
        let c = det.constant_term().clone();
        let log_det = det.scale(&(Rational::from_i64(1) / c)).log().unwrap();
        let expected = -log_det.d_u().d_v();
        assert!(trace.agrees_with(&expected));
    }
}
