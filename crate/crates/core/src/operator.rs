//! Weighted-shift realizations of `M_z*` on `H_K`, defect operators, and the
//! product asymptotics that govern diagonal intertwiners between shifts.

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{line_curvature, DiagonalKernel};
use crate::scalar::{rising_binomial, Rational, Scalar};

/// Backward shift `T e_n = w_{n-1} e_{n-1}` in the basis `e_n = sqrt(a_n) z^n`,
/// stored by squared weights `w_n² = a_n / a_{n+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedShift<S> {
    sq_weights: Vec<S>,
}

impl<S: Scalar> WeightedShift<S> {
    pub fn from_sq_weights(sq_weights: Vec<S>) -> Result<Self> {
        if let Some(index) = sq_weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::NonpositiveCoefficient { index });
        }
        Ok(Self { sq_weights })
    }

    /// Truncation dimension.
    pub fn dim(&self) -> usize {
        self.sq_weights.len()
    }

    pub fn sq_weights(&self) -> &[S] {
        &self.sq_weights
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.sq_weights.iter().map(|w| w.to_f64().sqrt()).collect()
    }

    /// Coefficients `a_0 = 1, a_{n+1} = a_n / w_n²` of the kernel this shift
    /// came from.
    pub fn kernel_coeffs(&self) -> Vec<S> {
        let mut a = vec![S::one()];
        for w in &self.sq_weights {
            let next = a.last().expect("nonempty").clone() / w.clone();
            a.push(next);
        }
        a
    }
}

/// Squared weights `a_n / a_{n+1}` for `n < dim`.
pub fn shift_from_kernel<S: Scalar>(k: &DiagonalKernel<S>, dim: usize) -> Result<WeightedShift<S>> {
    if k.order() < dim {
        return Err(Error::InsufficientOrder {
            needed: dim,
            available: k.order(),
        });
    }
    if let Some(index) = k.coeffs()[..=dim].iter().position(|a| !a.is_positive()) {
        return Err(Error::NonpositiveCoefficient { index });
    }
    let sq = (0..dim)
        .map(|n| k.coeff(n).clone() / k.coeff(n + 1).clone())
        .collect();
    WeightedShift::from_sq_weights(sq)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Defect<S> {
    pub diag: Vec<S>,
    pub nonneg: bool,
    pub first_negative: Option<usize>,
}

/// Diagonal of `Σ_k (-1)^k C(m, k) T*^k T^k` for the backward shift, through
/// index `dim - m`: `d_n = Σ_{k ≤ min(m, n)} (-1)^k C(m, k) Π_{j=1}^k w_{n-j}²`.
pub fn hypercontraction_defect<S: Scalar>(s: &WeightedShift<S>, m: usize) -> Result<Defect<S>> {
    if m == 0 {
        return Err(Error::MalformedSpec("m must be at least 1".into()));
    }
    if m > s.dim() {
        return Err(Error::InsufficientOrder {
            needed: m,
            available: s.dim(),
        });
    }
    let binom: Vec<S> = (0..=m)
        .map(|k| {
            // C(m, k)
            let mut c = S::one();
            for j in 0..k {
                c = c * S::from_i64((m - j) as i64) / S::from_i64(j as i64 + 1);
            }
            c
        })
        .collect();
    let w = s.sq_weights();
    let diag: Vec<S> = (0..=s.dim() - m)
        .map(|n| {
            let mut acc = S::one();
            let mut prod = S::one();
            for k in 1..=m.min(n) {
                prod *= w[n - k].clone();
                let term = binom[k].clone() * prod.clone();
                acc = if k % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        })
        .collect();
    let first_negative = diag.iter().position(|d| d.is_negative());
    Ok(Defect {
        nonneg: first_negative.is_none(),
        first_negative,
        diag,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogeneityVerdict {
    pub homogeneous: bool,
    /// `α` read off from `a_1` of `h0`, if it is a positive integer.
    pub alpha: Option<i64>,
    pub h0_power: bool,
    pub h1_power: bool,
    pub a_positive: bool,
    /// `𝒦₁ - 𝒦₀ = -2 (1-t)^{-2}`.
    pub curvature_gap: bool,
}

fn matches_power(k: &DiagonalKernel<Rational>, alpha: i64) -> bool {
    let a = Rational::from_i64(alpha);
    k.coeffs()
        .iter()
        .enumerate()
        .all(|(i, c)| *c == rising_binomial(&a, i))
}

/// Homogeneity of the rank-two operator with metrics `h0`, `h1` and
/// intertwiner data `S t_1 = a t_0`.
pub fn homogeneity_check(
    h0: &DiagonalKernel<Rational>,
    h1: &DiagonalKernel<Rational>,
    a: &Rational,
) -> HomogeneityVerdict {
    let a1 = h0.coeffs().get(1).cloned().unwrap_or_else(|| Rational::from_i64(0));
    let alpha = (a1.is_integer() && a1 >= Rational::from_i64(1))
        .then(|| a1.to_integer().try_into().ok())
        .flatten();
    let h0_power = alpha.is_some_and(|al| matches_power(h0, al));
    let h1_power = alpha.is_some_and(|al| matches_power(h1, al + 2));
    let curvature_gap = match (line_curvature(h0.series()), line_curvature(h1.series())) {
        (Ok(k0), Ok(k1)) => {
            let gap = &k1 - &k0;
            (0..=gap.order()).all(|n| *gap.coeff(n) == Rational::from_i64(-2 * (n as i64 + 1)))
        }
        _ => false,
    };
    let a_positive = a.is_positive();
    HomogeneityVerdict {
        homogeneous: h0_power && h1_power && a_positive && curvature_gap,
        alpha,
        h0_power,
        h1_power,
        a_positive,
        curvature_gap,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigiditySample {
    pub m: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rigidity {
    /// `1 + (k0 - k1)/2`.
    pub exponent: Rational,
    pub samples: Vec<RigiditySample>,
    /// Log-log slope over the last decade of samples.
    pub fitted_slope: f64,
}

/// `R(m) = m Π_{n=0}^m sqrt((n+1)/(n+k1)) / Π_{n=0}^m sqrt((n+1)/(n+k0))`
/// sampled at `m = 10, 100, ...` up to `m_max`, summed in log space.
pub fn rigidity_exponent(k0: u64, k1: u64, m_max: u64) -> Result<Rigidity> {
    if k0 == 0 || k1 == 0 {
        return Err(Error::MalformedSpec("k0 and k1 must be at least 1".into()));
    }
    if m_max < 10 {
        return Err(Error::MalformedSpec("m_max must be at least 10".into()));
    }
    let mut marks = Vec::new();
    let mut m = 10u64;
    while m <= m_max {
        marks.push(m);
        m = m.saturating_mul(10);
    }
    if marks.last() != Some(&m_max) {
        marks.push(m_max);
    }
    let mut log_prod = 0.0f64;
    let mut samples = Vec::with_capacity(marks.len());
    let mut log_samples = Vec::with_capacity(marks.len());
    let mut next = 0;
    for n in 0..=m_max {
        let nf = n as f64;
        log_prod += 0.5 * ((nf + k0 as f64).ln() - (nf + k1 as f64).ln());
        if n == marks[next] {
            let log_r = nf.ln() + log_prod;
            samples.push(RigiditySample { m: n, ratio: log_r.exp() });
            log_samples.push((nf.ln(), log_r));
            next += 1;
            if next == marks.len() {
                break;
            }
        }
    }
    let fitted_slope = if log_samples.len() >= 2 {
        let (x1, y1) = log_samples[log_samples.len() - 1];
        let (x0, y0) = log_samples[log_samples.len() - 2];
        (y1 - y0) / (x1 - x0)
    } else {
        f64::NAN
    };
    Ok(Rigidity {
        exponent: Rational::from_i64(1) + Rational::from_ratio(k0 as i64 - k1 as i64, 2),
        samples,
        fitted_slope,
    })
}
