//! Seeded generators for randomized identity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{linalg::Dense, FrameSpecFB2, SeriesMatrix};
use crate::fps::{BiSeries, RadialSeries};
use crate::scalar::{Rational, Scalar};

pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ 9`, `1 ≤ q ≤ 9`.
pub fn rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::from_ratio(rng.random_range(-9..=9), rng.random_range(1..=9))
}

pub fn positive_rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::from_ratio(rng.random_range(1..=9), rng.random_range(1..=9))
}

pub fn matrix<R: Rng>(rng: &mut R, n: usize) -> Dense<Rational> {
    (0..n).map(|_| (0..n).map(|_| rational(rng)).collect()).collect()
}

/// A matrix whose last row is a random combination of the others.
pub fn singular_matrix<R: Rng>(rng: &mut R, n: usize) -> Dense<Rational> {
    let mut a = matrix(rng, n);
    let weights: Vec<Rational> = (0..n - 1).map(|_| rational(rng)).collect();
    let last = (0..n)
        .map(|j| {
            (0..n - 1).fold(Rational::from_i64(0), |acc, i| acc + weights[i].clone() * a[i][j].clone())
        })
        .collect();
    a[n - 1] = last;
    a
}

/// Random series with constant term 1.
pub fn unit_series<R: Rng>(rng: &mut R, order: usize) -> RadialSeries<Rational> {
    RadialSeries::from_fn(order, |n| if n == 0 { Rational::from_i64(1) } else { rational(rng) })
}

/// Integer in `-3..=3`, as a rational.
pub fn small_int<R: Rng>(rng: &mut R) -> Rational {
    Rational::from_i64(rng.random_range(-3..=3))
}

/// Random metric with positive coefficients, as `‖t(w)‖²` has for a
/// holomorphic section `t`.
/// Coefficients are integers in `0..=5` after a unit constant term.
pub fn metric_series<R: Rng>(rng: &mut R, order: usize) -> RadialSeries<Rational> {
    RadialSeries::from_fn(order, |n| Rational::from_i64(if n == 0 { 1 } else { rng.random_range(0..=5) }))
}

pub fn fb2_spec<R: Rng>(rng: &mut R, order: usize) -> FrameSpecFB2<Rational> {
    FrameSpecFB2::new(metric_series(rng, order), metric_series(rng, order), None)
        .expect("positive constant terms")
}

/// `P(u) G(uv) P(v)^T` with `G` symmetric radial and `P` unit upper
/// triangular with polynomial entries in `u`. The determinant is `det G`,
/// hence radial. Coefficients are small integers and `G(0)` is positive
/// definite with determinant 1, so exact inverses stay integral.
pub fn gram<R: Rng>(rng: &mut R, rank: usize, order: usize) -> SeriesMatrix<Rational> {
    let bi_order = 2 * order + 1;
    // G(0) = L L^T with L unit lower bidiagonal.
    let l: Vec<Rational> = (0..rank).map(|_| small_int(rng)).collect();
    let g0 = |i: usize, j: usize| -> Rational {
        let (lo, hi) = (i.min(j), i.max(j));
        if lo == hi {
            Rational::from_i64(1) + if lo > 0 { l[lo].clone() * l[lo].clone() } else { Rational::from_i64(0) }
        } else if hi == lo + 1 {
            l[hi].clone()
        } else {
            Rational::from_i64(0)
        }
    };
    let mut g_entries = vec![vec![BiSeries::zero(bi_order); rank]; rank];
    for i in 0..rank {
        for j in i..rank {
            let f = RadialSeries::from_fn(order, |n| if n == 0 { g0(i, j) } else { small_int(rng) });
            let lifted = BiSeries::lift(&f);
            g_entries[i][j] = lifted.clone();
            g_entries[j][i] = lifted;
        }
    }
    let g = SeriesMatrix::from_fn(rank, |i, j| g_entries[i][j].clone());
    let p = SeriesMatrix::from_fn(rank, |i, j| {
        if i == j {
            BiSeries::one(bi_order)
        } else if i < j {
            let poly: Vec<Rational> = (0..3).map(|_| small_int(rng)).collect();
            BiSeries::poly_in_u(&poly, bi_order)
        } else {
            BiSeries::zero(bi_order)
        }
    });
    let p_adj = p.adjoint();
    &(&p * &g) * &p_adj
}

/// Up to three integer polynomial sections of degree ≤ 3. The first is 1
/// at the origin and the rest vanish there, so `Σ |e_i|²` is 1 at 0.
pub fn sections<R: Rng>(rng: &mut R) -> Vec<Vec<Rational>> {
    let count = rng.random_range(1..=3);
    (0..count)
        .map(|k| {
            let deg = rng.random_range(0..=3);
            (0..=deg)
                .map(|i| match (k, i) {
                    (0, 0) => Rational::from_i64(1),
                    (_, 0) => Rational::from_i64(0),
                    _ => small_int(rng),
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::linalg::det;

    #[test]
    fn deterministic() {
        let a = unit_series(&mut rng(7), 10);
        let b = unit_series(&mut rng(7), 10);
        assert_eq!(a, b);
    }

    #[test]
    fn singular_is_singular() {
        let mut r = rng(1);
        for n in 3..=5 {
            assert_eq!(det(&singular_matrix(&mut r, n)).unwrap(), Rational::from_i64(0));
        }
    }

    #[test]
    fn gram_is_gram_with_radial_det() {
        let h = gram(&mut rng(3), 2, 6);
        assert!(h.is_gram());
        assert!(h.det().is_radial());
    }
}
