use serde::{Deserialize, Serialize};

use super::matrix::{curvature_matrix, GramSeriesMatrix, SeriesMatrix};
use crate::error::{Error, Result};
use crate::fps::{serial, BiSeries, RadialSeries};
use crate::kernel::{line_curvature, KernelSpec};
use crate::scalar::{Rational, Scalar};

/// Metric data of a rank-two frame: `h0 = ‖γ_0‖²`, `h1 = ‖∂γ_0 - γ_1‖²`,
/// and optionally the intertwiner scalar with `S t_1 = a t_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSpecFB2<S> {
    pub h0: RadialSeries<S>,
    pub h1: RadialSeries<S>,
    pub a: Option<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameSpecFB3<S> {
    pub h0: RadialSeries<S>,
    pub h1: RadialSeries<S>,
    pub h2: RadialSeries<S>,
    pub k: S,
}

fn check_positive<S: Scalar>(h: &RadialSeries<S>) -> Result<()> {
    if h.constant_term().is_positive() {
        Ok(())
    } else {
        Err(Error::NonpositiveConstant)
    }
}

impl<S: Scalar> FrameSpecFB2<S> {
    pub fn new(h0: RadialSeries<S>, h1: RadialSeries<S>, a: Option<S>) -> Result<Self> {
        check_positive(&h0)?;
        check_positive(&h1)?;
        Ok(Self { h0, h1, a })
    }

    /// Homogeneous data: `h0 = a (1-t)^{-α}`, `h1 = (1-t)^{-(α+2)}`.
    pub fn homogeneous(alpha: i64, a: S, order: usize) -> Self {
        let h0 = KernelSpec::power(alpha).metric_series(order).expect("power metric");
        let h1 = KernelSpec::power(alpha + 2).metric_series(order).expect("power metric");
        Self {
            h0: h0.scale(&a),
            h1,
            a: Some(a),
        }
    }

    /// `‖S t_1‖² / ‖t_1‖²` implied by `S t_1 = a t_0`, reading `h0` as
    /// `‖t_0‖²`: `a² h0 / h1`.
    pub fn default_ratio(&self) -> Result<RadialSeries<S>> {
        let a = self.a.clone().unwrap_or_else(S::one);
        self.h0.scale(&(a.clone() * a)).div(&self.h1)
    }
}

impl<S: Scalar> FrameSpecFB3<S> {
    pub fn new(h0: RadialSeries<S>, h1: RadialSeries<S>, h2: RadialSeries<S>, k: S) -> Result<Self> {
        check_positive(&h0)?;
        check_positive(&h1)?;
        check_positive(&h2)?;
        Ok(Self { h0, h1, h2, k })
    }
}

/// `[[h0, ∂h0], [∂̄h0, ∂∂̄h0 + h1]]`.
pub fn gram_fb2<S: Scalar>(spec: &FrameSpecFB2<S>) -> GramSeriesMatrix<S> {
    let h0 = BiSeries::lift(&spec.h0);
    let h1 = BiSeries::lift(&spec.h1);
    let d = h0.d_u();
    let dd = &d.d_v() + &h1;
    SeriesMatrix::new(2, vec![h0.clone(), d.clone(), d.conj(), dd]).expect("2x2")
}

/// Gram matrix of `γ_0, γ_1 = t_1 + ∂t_0, γ_2 = t_2 + k ∂t_1 + ∂²t_0`.
pub fn gram_fb3<S: Scalar>(spec: &FrameSpecFB3<S>) -> GramSeriesMatrix<S> {
    let h0 = BiSeries::lift(&spec.h0);
    let h1 = BiSeries::lift(&spec.h1);
    let h2 = BiSeries::lift(&spec.h2);
    let k = &spec.k;
    let e01 = h0.d(1, 0);
    let e02 = h0.d(2, 0);
    let e11 = &h0.d(1, 1) + &h1;
    let e12 = &h0.d(2, 1) + &h1.d(1, 0).scale(k);
    let e22 = &(&h0.d(2, 2) + &h1.d(1, 1).scale(&(k.clone() * k.clone()))) + &h2;
    SeriesMatrix::new(
        3,
        vec![
            h0.clone(),
            e01.clone(),
            e02.clone(),
            e01.conj(),
            e11,
            e12.clone(),
            e02.conj(),
            e12.conj(),
            e22,
        ],
    )
    .expect("3x3")
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetTraceReport<S> {
    pub det: RadialSeries<S>,
    pub trace_curv: RadialSeries<S>,
    pub det_curv: RadialSeries<S>,
    pub equal: bool,
}

/// Trace of the curvature matrix against the line curvature of `det h`.
pub fn det_trace_report<S: Scalar>(h: &GramSeriesMatrix<S>) -> Result<DetTraceReport<S>> {
    let det = h.det().restrict().map_err(|_| Error::NotRadialDeterminant)?;
    let det_curv = line_curvature(&det)?;
    let trace_curv = curvature_matrix(h)?
        .trace()
        .restrict()
        .map_err(|_| Error::NotRadialDeterminant)?;
    let n = det_curv.order().min(trace_curv.order());
    let (det_curv, trace_curv) = (det_curv.truncate(n), trace_curv.truncate(n));
    Ok(DetTraceReport {
        equal: det_curv == trace_curv,
        det,
        trace_curv,
        det_curv,
    })
}

/// `θ² = 𝒦₀² / (1/ratio - 𝒦₀)` where `ratio = ‖S t_1‖² / ‖t_1‖²`.
pub fn second_fundamental_form_sq<S: Scalar>(
    spec: &FrameSpecFB2<S>,
    ratio: &RadialSeries<S>,
) -> Result<RadialSeries<S>> {
    let k0 = line_curvature(&spec.h0)?;
    let inv_ratio = ratio.reciprocal().map_err(|_| Error::ZeroDenominator)?;
    let denom = &inv_ratio - &k0;
    if denom.constant_term().is_zero() {
        return Err(Error::ZeroDenominator);
    }
    (&k0 * &k0).div(&denom)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdditivityReport<S> {
    /// `trace 𝒦 = 𝒦₀ + 𝒦₁` to the shared order.
    pub additive: bool,
    /// `λ` with `h1 = λ (-𝒦₀ h0)`, when such a positive `λ` exists.
    pub lambda: Option<S>,
    pub trace_curv: RadialSeries<S>,
    pub sum_curv: RadialSeries<S>,
}

pub fn trace_additivity_report<S: Scalar>(
    spec: &FrameSpecFB2<S>,
    k1_metric: &RadialSeries<S>,
) -> Result<AdditivityReport<S>> {
    let report = det_trace_report(&gram_fb2(spec))?;
    let k0 = line_curvature(&spec.h0)?;
    let k1 = line_curvature(k1_metric)?;
    let sum_curv = &k0 + &k1;
    let n = sum_curv.order().min(report.trace_curv.order());
    let trace_curv = report.trace_curv.truncate(n);
    let sum_curv = sum_curv.truncate(n);

    let q = -(&k0 * &spec.h0);
    let lambda = if q.constant_term().is_zero() {
        None
    } else {
        let lambda = spec.h1.constant_term().clone() / q.constant_term().clone();
        let scaled = q.scale(&lambda);
        (lambda.is_positive() && scaled.agrees_with(&spec.h1)).then_some(lambda)
    };
    Ok(AdditivityReport {
        additive: trace_curv == sum_curv,
        lambda,
        trace_curv,
        sum_curv,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantTriple<S> {
    pub curvature: RadialSeries<S>,
    pub theta_sq: RadialSeries<S>,
    pub cross: RadialSeries<S>,
}

/// `(𝒦₀, θ², <S t_1, t_0>/‖t_0‖²)`.
pub fn unitary_invariant_triple<S: Scalar>(
    spec: &FrameSpecFB2<S>,
    ratio: &RadialSeries<S>,
    cross: &RadialSeries<S>,
) -> Result<InvariantTriple<S>> {
    Ok(InvariantTriple {
        curvature: line_curvature(&spec.h0)?,
        theta_sq: second_fundamental_form_sq(spec, ratio)?,
        cross: cross.clone(),
    })
}

/// JSON form of a frame: each metric is a [`KernelSpec`] expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpecJson {
    pub h0: KernelSpec,
    pub h1: KernelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serial::rational_opt")]
    pub k: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serial::rational_opt")]
    pub a: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross: Option<KernelSpec>,
    /// Metric whose line curvature is `𝒦_{T_1}`; defaults to `h1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<KernelSpec>,
}

impl FrameSpecJson {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::MalformedSpec(e.to_string()))
    }

    pub fn fb2<S: Scalar>(&self, order: usize) -> Result<FrameSpecFB2<S>> {
        FrameSpecFB2::new(
            self.h0.metric_series(order)?,
            self.h1.metric_series(order)?,
            self.a.as_ref().map(S::from_rational),
        )
    }

    pub fn fb3<S: Scalar>(&self, order: usize) -> Result<FrameSpecFB3<S>> {
        let h2 = self
            .h2
            .as_ref()
            .ok_or_else(|| Error::MalformedSpec("FB3 frame needs h2".into()))?;
        let k = self
            .k
            .as_ref()
            .ok_or_else(|| Error::MalformedSpec("FB3 frame needs the constant k".into()))?;
        FrameSpecFB3::new(
            self.h0.metric_series(order)?,
            self.h1.metric_series(order)?,
            h2.metric_series(order)?,
            S::from_rational(k),
        )
    }
}
