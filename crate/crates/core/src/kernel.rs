//! Diagonal reproducing kernels `K(z, w) = 1 + Σ a_i z^i w̄^i` on the disc.
//!
//! On the diagonal `z = w` such a kernel is a radial series in `t = |w|²`,
//! so everything here reduces to [`RadialSeries`] arithmetic.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fps::{serial, RadialSeries};
use crate::scalar::{from_usize, rising_binomial, Rational, Scalar};

/// Expression grammar for radial metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `(1 - t)^{-alpha}`.
    Power {
        #[serde(with = "serial::rational")]
        alpha: Rational,
    },
    /// A polynomial in `t`, lowest degree first.
    Coeffs {
        #[serde(with = "serial::rational_vec")]
        a: Vec<Rational>,
    },
    Product {
        left: Box<KernelSpec>,
        right: Box<KernelSpec>,
    },
    /// `base(t) * exp(poly(t))`.
    ExpPoly {
        base: Box<KernelSpec>,
        #[serde(with = "serial::rational_vec")]
        poly: Vec<Rational>,
    },
}

impl KernelSpec {
    pub fn power(alpha: i64) -> Self {
        KernelSpec::Power {
            alpha: Rational::from_i64(alpha),
        }
    }

    pub fn coeffs(a: Vec<Rational>) -> Self {
        KernelSpec::Coeffs { a }
    }

    pub fn product(left: KernelSpec, right: KernelSpec) -> Self {
        KernelSpec::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn exp_poly(base: KernelSpec, poly: Vec<Rational>) -> Self {
        KernelSpec::ExpPoly {
            base: Box::new(base),
            poly,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::MalformedSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("kernel spec serializes")
    }

    /// The radial series of this metric through `t^order`. The constant term
    /// is whatever the expression gives; see [`kernel_from_spec`] for the
    /// normalized version.
    pub fn metric_series<S: Scalar>(&self, order: usize) -> Result<RadialSeries<S>> {
        match self {
            KernelSpec::Power { alpha } => {
                let alpha = S::from_rational(alpha);
                Ok(RadialSeries::from_fn(order, |i| rising_binomial(&alpha, i)))
            }
            KernelSpec::Coeffs { a } => {
                if a.is_empty() {
                    return Err(Error::MalformedSpec("empty coefficient list".into()));
                }
                let a: Vec<S> = a.iter().map(S::from_rational).collect();
                Ok(RadialSeries::from_poly(&a, order))
            }
            KernelSpec::Product { left, right } => {
                Ok(&left.metric_series::<S>(order)? * &right.metric_series::<S>(order)?)
            }
            KernelSpec::ExpPoly { base, poly } => {
                if poly.is_empty() {
                    return Err(Error::MalformedSpec("empty exponent polynomial".into()));
                }
                let p: Vec<S> = poly.iter().map(S::from_rational).collect();
                let e = RadialSeries::from_poly(&p, order).exp().map_err(|_| {
                    Error::MalformedSpec("exponent polynomial must vanish at t = 0".into())
                })?;
                Ok(&base.metric_series::<S>(order)? * &e)
            }
        }
    }
}

/// Normalized coefficient sequence `a_0 = 1, a_1, ..., a_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalKernel<S> {
    a: RadialSeries<S>,
    tag: Option<KernelSpec>,
}

impl<S: Scalar> DiagonalKernel<S> {
    pub fn from_series(a: RadialSeries<S>) -> Result<Self> {
        if !a.constant_term().is_one() {
            return Err(Error::NonUnitConstant(a.constant_term().to_string()));
        }
        Ok(Self { a, tag: None })
    }

    pub fn from_coeffs(a: Vec<S>) -> Result<Self> {
        Self::from_series(RadialSeries::new(a))
    }

    /// `(1 - t)^{-alpha}`, `a_i = C(i + alpha - 1, i)`.
    pub fn power(alpha: i64, order: usize) -> Self {
        kernel_from_spec(&KernelSpec::power(alpha), order).expect("power kernels are normalized")
    }

    pub fn series(&self) -> &RadialSeries<S> {
        &self.a
    }

    pub fn coeffs(&self) -> &[S] {
        self.a.coeffs()
    }

    pub fn coeff(&self, i: usize) -> &S {
        self.a.coeff(i)
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    pub fn tag(&self) -> Option<&KernelSpec> {
        self.tag.as_ref()
    }
}

pub fn kernel_from_spec<S: Scalar>(spec: &KernelSpec, order: usize) -> Result<DiagonalKernel<S>> {
    let mut k = DiagonalKernel::from_series(spec.metric_series(order)?)?;
    k.tag = Some(spec.clone());
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdVerdict {
    pub pd: bool,
    pub first_negative: Option<usize>,
}

pub fn validate_pd<S: Scalar>(k: &DiagonalKernel<S>) -> PdVerdict {
    let first_negative = k.coeffs().iter().position(|c| c.is_negative());
    PdVerdict {
        pd: first_negative.is_none(),
        first_negative,
    }
}

/// `𝒦 = -∂∂̄ log h` for a radial metric `h` with positive constant term.
/// The result has order one less than `h`.
pub fn line_curvature<S: Scalar>(h: &RadialSeries<S>) -> Result<RadialSeries<S>> {
    let c = h.constant_term();
    if !c.is_positive() {
        return Err(Error::NonpositiveConstant);
    }
    let unit = h.scale(&(S::one() / c.clone()));
    Ok(-unit.log()?.del_delbar())
}

/// `b_1, ..., b_N`: coefficients of `log K(w, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogCoeffs<S> {
    pub b: Vec<S>,
}

impl<S: Scalar> LogCoeffs<S> {
    /// `b_n` for `n ≥ 1`.
    pub fn get(&self, n: usize) -> &S {
        &self.b[n - 1]
    }
}

pub fn log_coeffs<S: Scalar>(k: &DiagonalKernel<S>) -> LogCoeffs<S> {
    let log = k.series().log().expect("normalized kernel");
    LogCoeffs {
        b: log.coeffs()[1..].to_vec(),
    }
}

/// `K(w, w) · (-𝒦(w))` as a radial series.
pub fn curvature_product_coeffs<S: Scalar>(k: &DiagonalKernel<S>) -> RadialSeries<S> {
    let curv = line_curvature(k.series()).expect("normalized kernel");
    k.series() * &(-curv)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdBound<S> {
    pub bound: S,
    /// `a_{n+1} ≥ bound`.
    pub satisfied: bool,
    /// The `t^n` coefficient of `K · (-𝒦)` is nonnegative.
    pub product_nonneg: bool,
}

/// Compares `a_{n+1}` with the lower bound forced by positivity of
/// `K · (-𝒦)` at `t^n`.
///
/// The bound is `-1/(n+1)² (Σ_{i=1}^n i² a_{n+1-i} a_i + Σ_{i=2}^{n+1}
/// Σ_{k=2}^i (-1)^{k-1} (i²/k) a_{n+1-i} [t^i](K - 1)^k)`.
pub fn pd_necessary_bound<S: Scalar>(k: &DiagonalKernel<S>, n: usize) -> Result<PdBound<S>> {
    if n == 0 {
        return Err(Error::MalformedSpec("n must be at least 1".into()));
    }
    if k.order() < n + 1 {
        return Err(Error::InsufficientOrder {
            needed: n + 1,
            available: k.order(),
        });
    }
    let a = |i: usize| k.coeff(i).clone();
    let tail = RadialSeries::from_fn(n + 1, |i| if i == 0 { S::zero() } else { a(i) });

    let mut sum = S::zero();
    for i in 1..=n {
        let i2: S = from_usize(i * i);
        sum += i2 * a(n + 1 - i) * a(i);
    }
    // powers[k] = (K - 1)^k truncated at t^{n+1}
    let mut power = tail.clone();
    for kk in 2..=n + 1 {
        power = &power * &tail;
        let sign = if kk % 2 == 0 { -S::one() } else { S::one() };
        for i in kk..=n + 1 {
            let c = power.coeff(i);
            if c.is_zero() {
                continue;
            }
            let w: S = from_usize::<S>(i * i) / from_usize(kk);
            sum += sign.clone() * w * a(n + 1 - i) * c.clone();
        }
    }
    let bound = -sum / from_usize((n + 1) * (n + 1));
    let product = curvature_product_coeffs(k);
    Ok(PdBound {
        satisfied: a(n + 1) >= bound,
        product_nonneg: !product.coeff(n).is_negative(),
        bound,
    })
}

/// `(1 - p t / 2)^{-2/p}` through `t^order`.
pub fn canonical_p_kernel<S: Scalar>(p: u32, order: usize) -> DiagonalKernel<S> {
    let p_s = S::from_i64(p as i64);
    let base = RadialSeries::from_poly(&[S::one(), -p_s.clone() / S::from_i64(2)], order);
    let a = base
        .pow(&(S::from_i64(-2) / p_s))
        .expect("unit constant term");
    DiagonalKernel::from_series(a).expect("unit constant term")
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremPVerdict<S> {
    pub holds: bool,
    pub first_mismatch: Option<usize>,
    /// `∂∂̄ log K`.
    pub lhs: RadialSeries<S>,
    /// `K^p`.
    pub rhs: RadialSeries<S>,
}

/// Tests `∂∂̄ log K = K^p` coefficientwise up to the shared order.
pub fn check_theorem_p<S: Scalar>(k: &DiagonalKernel<S>, p: u32) -> TheoremPVerdict<S> {
    let lhs = k.series().log().expect("normalized kernel").del_delbar();
    let rhs = k
        .series()
        .truncate(lhs.order())
        .powi(p as i64)
        .expect("positive power");
    let first_mismatch = lhs.first_disagreement(&rhs);
    TheoremPVerdict {
        holds: first_mismatch.is_none(),
        first_mismatch,
        lhs,
        rhs,
    }
}

/// Solves `∂∂̄ log K = K^p` for `a_1, ..., a_order` starting from `a_0 = 1`.
///
/// Matching `t^{n-1}` gives `n² b_n = [K^p]_{n-1}`, and `b_n` is `a_n` plus
/// terms in `a_1..a_{n-1}`, so each step has exactly one solution.
pub fn solve_theorem_p<S: Scalar>(p: u32, order: usize) -> DiagonalKernel<S> {
    let mut a = vec![S::one()];
    for n in 1..=order {
        a.push(S::zero());
        let series = RadialSeries::new(a.clone());
        let b_partial = series.log().expect("unit constant term").coeff(n).clone();
        let target = series
            .truncate(n - 1)
            .powi(p as i64)
            .expect("positive power")
            .coeff(n - 1)
            .clone();
        a[n] = target / from_usize(n * n) - b_partial;
    }
    DiagonalKernel::from_coeffs(a).expect("unit constant term")
}

pub const COMPOSITION_SUM_LIMIT: usize = 22;

/// `Σ_{k=1}^n (-1)^{k-1}/k Σ_{i_1+...+i_k = n} Π (i_j + 1)` by enumerating all
/// compositions of `n`.
pub fn lemma_sum_identity(n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::MalformedSpec("n must be at least 1".into()));
    }
    if n > COMPOSITION_SUM_LIMIT {
        return Err(Error::LimitExceeded {
            what: "n",
            value: n,
            limit: COMPOSITION_SUM_LIMIT,
        });
    }
    // Bit j of the mask cuts between positions j and j+1.
    let mut by_parts = vec![0u128; n + 1];
    for mask in 0u32..(1u32 << (n - 1)) {
        let mut product: u128 = 1;
        let mut run = 1u128;
        for j in 0..n - 1 {
            if mask >> j & 1 == 1 {
                product *= run + 1;
                run = 1;
            } else {
                run += 1;
            }
        }
        product *= run + 1;
        by_parts[mask.count_ones() as usize + 1] += product;
    }
    let mut total = Rational::zero();
    for (k, s) in by_parts.iter().enumerate().skip(1) {
        let term = Rational::new(num_bigint::BigInt::from(*s), num_bigint::BigInt::from(k));
        if k % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;
    use num_traits::One;

    type K = DiagonalKernel<Rational>;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_i64(x)).collect()
    }

    /// `b_n` straight from the composition expansion of `log(1 + x)`.
    fn b_by_enumeration(a: &[Rational], n: usize) -> Rational {
        let get = |i: usize| a.get(i).cloned().unwrap_or_else(Rational::zero);
        let mut total = Rational::zero();
        for mask in 0u32..(1u32 << (n - 1)) {
            let mut prod = Rational::one();
            let mut run = 1;
            for j in 0..n - 1 {
                if mask >> j & 1 == 1 {
                    prod *= get(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            prod *= get(run);
            let k = mask.count_ones() as i64 + 1;
            let w = Rational::from_ratio(if k % 2 == 1 { 1 } else { -1 }, k);
            total += w * prod;
        }
        total
    }

    #[test]
    fn spec_json_round_trip() {
        let s = r#"{"kind":"exp_poly","base":{"kind":"power","alpha":"2"},"poly":["0","1"]}"#;
        let spec = KernelSpec::from_json(s).unwrap();
        assert_eq!(spec.to_json(), s);
        assert!(KernelSpec::from_json(r#"{"kind":"power"}"#).is_err());
        assert!(KernelSpec::from_json(r#"{"kind":"power","alpha":"x"}"#).is_err());
    }

    #[test]
    fn power_kernels() {
        assert_eq!(K::power(1, 5).coeffs(), ints(&[1, 1, 1, 1, 1, 1]).as_slice());
        assert_eq!(K::power(2, 4).coeffs(), ints(&[1, 2, 3, 4, 5]).as_slice());
        let prod = kernel_from_spec::<Rational>(
            &KernelSpec::product(KernelSpec::power(1), KernelSpec::power(1)),
            10,
        )
        .unwrap();
        assert_eq!(prod.series(), K::power(2, 10).series());
    }

    #[test]
    fn non_unit_constant_rejected() {
        let err = kernel_from_spec::<Rational>(&KernelSpec::coeffs(ints(&[2, 1])), 4);
        assert_eq!(err, Err(Error::NonUnitConstant("2".into())));
        let bad = KernelSpec::exp_poly(KernelSpec::power(1), ints(&[1, 1]));
        assert!(matches!(kernel_from_spec::<Rational>(&bad, 4), Err(Error::MalformedSpec(_))));
    }

    #[test]
    fn positivity() {
        assert!(validate_pd(&K::power(2, 10)).pd);
        let k = K::from_coeffs(ints(&[1, -1])).unwrap();
        assert_eq!(validate_pd(&k).first_negative, Some(1));
    }

    #[test]
    fn curvature_of_power_metrics() {
        let c = line_curvature(K::power(1, 8).series()).unwrap();
        assert_eq!(c.coeffs(), ints(&[-1, -2, -3, -4, -5, -6, -7, -8]).as_slice());
        let c3 = line_curvature(K::power(3, 8).series()).unwrap();
        for n in 0..8 {
            assert_eq!(*c3.coeff(n), Rational::from_i64(-3 * (n as i64 + 1)));
        }
        let flat = RadialSeries::constant(q("5/2"), 6);
        assert!(line_curvature(&flat).unwrap().is_zero());
        assert_eq!(
            line_curvature(&RadialSeries::constant(q("-1"), 3)),
            Err(Error::NonpositiveConstant)
        );
    }

    #[test]
    fn log_coefficients() {
        let b = log_coeffs(&K::power(3, 10));
        for n in 1..=10 {
            assert_eq!(*b.get(n), Rational::from_ratio(3, n as i64));
        }
        let b = log_coeffs(&K::from_coeffs(ints(&[1, 1, 0, 0])).unwrap());
        assert_eq!(b.b, vec![q("1"), q("-1/2"), q("1/3")]);
    }

    #[test]
    fn log_coefficients_match_enumeration() {
        let a = vec![q("1"), q("3/2"), q("-2/7"), q("5"), q("0"), q("1/3"), q("2"), q("-1"), q("4/9"), q("1"), q("7"), q("1/11"), q("2")];
        let k = K::from_coeffs(a.clone()).unwrap();
        let b = log_coeffs(&k);
        for n in 1..=12 {
            assert_eq!(*b.get(n), b_by_enumeration(&a, n), "n = {n}");
        }
    }

    #[test]
    fn product_coefficients() {
        let szego = curvature_product_coeffs(&K::power(1, 10));
        for n in 0..10 {
            let expected = (n + 1) * (n + 2) / 2;
            assert_eq!(*szego.coeff(n), Rational::from_i64(expected as i64));
        }
        let short = curvature_product_coeffs(&K::from_coeffs(ints(&[1, 1, 0, 0])).unwrap());
        assert_eq!(*short.coeff(0), q("1"));
        assert_eq!(*short.coeff(1), q("-1"));
        let flat = curvature_product_coeffs(&K::from_coeffs(ints(&[1, 0, 0, 0])).unwrap());
        assert!(flat.is_zero());
    }

    #[test]
    fn product_coefficient_formula() {
        let a = vec![q("1"), q("2/3"), q("1/5"), q("3"), q("1/2"), q("1"), q("2")];
        let k = K::from_coeffs(a.clone()).unwrap();
        let prod = curvature_product_coeffs(&k);
        let b = |n: usize| b_by_enumeration(&a, n);
        for m in 0..prod.order() {
            let mut expected = Rational::from_i64(((m + 1) * (m + 1)) as i64) * b(m + 1);
            for i in 1..=m {
                expected += Rational::from_i64((i * i) as i64) * a[m + 1 - i].clone() * b(i);
            }
            assert_eq!(*prod.coeff(m), expected, "m = {m}");
        }
    }

    #[test]
    fn bound_examples() {
        let k = K::from_coeffs(ints(&[1, 1, 0, 0])).unwrap();
        let r = pd_necessary_bound(&k, 1).unwrap();
        assert_eq!(r.bound, q("1/4"));
        assert!(!r.satisfied);
        assert!(!r.product_nonneg);
        let szego = K::power(1, 12);
        for n in 1..12 {
            let r = pd_necessary_bound(&szego, n).unwrap();
            assert!(r.satisfied && r.product_nonneg);
        }
        assert_eq!(
            pd_necessary_bound(&K::power(1, 3), 3),
            Err(Error::InsufficientOrder { needed: 4, available: 3 })
        );
    }

    #[test]
    fn bound_threshold_at_quarter() {
        for a2 in ["0", "1/4", "1/5", "3/10", "2"] {
            let k = K::from_coeffs(vec![q("1"), q("1"), q(a2)]).unwrap();
            let r = pd_necessary_bound(&k, 1).unwrap();
            assert_eq!(r.satisfied, q(a2) >= q("1/4"));
            assert_eq!(r.satisfied, r.product_nonneg);
        }
    }

    #[test]
    fn canonical_kernels() {
        let k = canonical_p_kernel::<Rational>(2, 12);
        assert_eq!(k.series(), K::power(1, 12).series());
        assert!(check_theorem_p(&k, 2).holds);
        let k1 = canonical_p_kernel::<Rational>(1, 12);
        assert_eq!(*k1.coeff(3), q("1/2"));
        assert!(check_theorem_p(&k1, 1).holds);
        for p in 1..=6u32 {
            let l = canonical_p_kernel::<Rational>(p, 6).series().powi(p as i64).unwrap();
            let pq = Rational::from_i64(p as i64);
            assert_eq!(*l.coeff(1), pq.clone());
            assert_eq!(*l.coeff(2), q("3/4") * pq.clone() * pq.clone());
            assert_eq!(*l.coeff(3), pq.clone() * pq.clone() * pq / Rational::from_i64(2));
        }
        assert!(!check_theorem_p(&K::power(2, 8), 2).holds);
    }

    #[test]
    fn solve_reproduces_canonical() {
        for p in 1..=4u32 {
            assert_eq!(solve_theorem_p::<Rational>(p, 10), canonical_p_kernel(p, 10));
        }
    }

    #[test]
    fn composition_sum() {
        assert_eq!(lemma_sum_identity(1).unwrap(), q("2"));
        assert_eq!(lemma_sum_identity(2).unwrap(), q("1"));
        assert_eq!(lemma_sum_identity(10).unwrap(), q("1/5"));
        assert!(matches!(lemma_sum_identity(23), Err(Error::LimitExceeded { .. })));
    }
}
