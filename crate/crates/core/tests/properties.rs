use proptest::prelude::*;

use cdcurv::fps::{BiSeries, RadialSeries};
use cdcurv::kernel::KernelSpec;
use cdcurv::similarity::{certificate, radial_potential_solve, Verdict, DEFAULT_BOUND, DEFAULT_GRID};
use cdcurv::{BiSeriesQ, Rational, RadialSeriesQ, Scalar};

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=12).prop_map(|(n, d)| Rational::from_ratio(n, d))
}

fn series(order: usize) -> impl Strategy<Value = RadialSeriesQ> {
    prop::collection::vec(rational(), order + 1).prop_map(RadialSeries::new)
}

fn unit_series(order: usize) -> impl Strategy<Value = RadialSeriesQ> {
    prop::collection::vec(rational(), order).prop_map(|mut c| {
        c.insert(0, Rational::from_i64(1));
        RadialSeries::new(c)
    })
}

fn bi_series(order: usize) -> impl Strategy<Value = BiSeriesQ> {
    let len = (order + 1) * (order + 2) / 2;
    prop::collection::vec(rational(), len).prop_map(move |c| {
        let mut it = c.into_iter();
        BiSeries::from_fn(order, |_, _| it.next().expect("enough coefficients"))
    })
}

/// `λ (1-t)^{-β}` for `β ≤ 3`, or a polynomial with nonnegative
/// coefficients, times a sign.
fn sign_definite(order: usize) -> impl Strategy<Value = RadialSeriesQ> {
    let lambda = (0i64..=8, 1i64..=4).prop_map(|(n, d)| Rational::from_ratio(n, d));
    let power = (lambda, 0i64..=3).prop_map(move |(l, beta)| {
        KernelSpec::power(beta)
            .metric_series::<Rational>(order)
            .expect("power metric")
            .scale(&l)
    });
    let poly = prop::collection::vec((0i64..=6, 1i64..=4), 1..=4).prop_map(move |c| {
        let c: Vec<Rational> = c.into_iter().map(|(n, d)| Rational::from_ratio(n, d)).collect();
        RadialSeries::from_poly(&c, order)
    });
    (prop_oneof![power, poly], any::<bool>()).prop_map(|(f, neg)| if neg { -f } else { f })
}

fn coefficientwise_le(a: &RadialSeriesQ, b: &RadialSeriesQ) -> bool {
    (0..=a.order().min(b.order())).all(|n| a.coeff(n) <= b.coeff(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(f in series(16), g in series(16), h in series(16)) {
        prop_assert_eq!(&(&f + &g) * &h, &(&f * &h) + &(&g * &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
        prop_assert_eq!(&f - &f, RadialSeries::zero(16));
        prop_assert_eq!(&f * &RadialSeries::one(16), f.clone());
    }

    #[test]
    fn reciprocal_round_trip(f in unit_series(16)) {
        prop_assert_eq!(&f * &f.reciprocal().unwrap(), RadialSeries::one(16));
    }

    #[test]
    fn log_exp_round_trip(f in unit_series(16)) {
        prop_assert_eq!(f.log().unwrap().exp().unwrap(), f.clone());
        let g = &f - &RadialSeries::one(16);
        prop_assert_eq!(g.exp().unwrap().log().unwrap(), g);
    }

    #[test]
    fn pow_round_trip(f in unit_series(12), p in 1i64..=4, q in 1i64..=4) {
        let e = Rational::from_ratio(p, q);
        let back = f.pow(&e).unwrap().pow(&(Rational::from_i64(1) / e)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn del_delbar_matches_bivariate(f in series(14)) {
        let via_lift = BiSeries::lift(&f).d_u().d_v().restrict().unwrap();
        let direct = f.del_delbar();
        prop_assert!(via_lift.agrees_with(&direct));
        prop_assert!(via_lift.order() >= direct.order());
    }

    #[test]
    fn mixed_partials_commute(f in bi_series(10)) {
        prop_assert_eq!(f.d_u().d_v(), f.d_v().d_u());
    }

    #[test]
    fn potential_solves(d in series(16)) {
        let psi = radial_potential_solve(&d);
        prop_assert_eq!(psi.del_delbar(), d);
    }

    #[test]
    fn certificate_is_monotone(a in sign_definite(32), b in sign_definite(32)) {
        let (lo, hi) = if coefficientwise_le(&a, &b) {
            (a, b)
        } else if coefficientwise_le(&b, &a) {
            (b, a)
        } else {
            return Ok(());
        };
        let upper = certificate(&hi, &DEFAULT_GRID, DEFAULT_BOUND);
        if upper.verdict == Verdict::Certified {
            let lower = certificate(&lo, &DEFAULT_GRID, DEFAULT_BOUND);
            prop_assert_ne!(lower.verdict, Verdict::NotCertified, "{:?} <= {:?}", lo, hi);
        }
    }
}

#[test]
fn certificate_of_zero() {
    for order in [4, 16, 32] {
        let r = certificate(&RadialSeriesQ::zero(order), &DEFAULT_GRID, DEFAULT_BOUND);
        assert_eq!(r.verdict, Verdict::Certified);
        assert!(r.psi.is_zero());
    }
}

#[test]
fn evaluation_is_the_only_float_path() {
    let f = RadialSeriesQ::from_fn(60, |n| Rational::from_i64(n as i64 + 1));
    let exact = 1.0 / (0.91f64 * 0.91);
    assert!((f.evaluate(0.09) - exact).abs() < 1e-12);
    assert_eq!(f.to_f64().coeff(3).to_f64(), 4.0);
}
