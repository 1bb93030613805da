//! Double-precision cross-check: `‖∂P‖²_HS = -trace 𝒦` for the projection
//! `P(w) = α(w) h(w)⁻¹ α(w)*` onto the fibre.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::frames::{gram_fb2, FrameSpecFB2};
use crate::error::{Error, Result};
use crate::fps::RadialSeries;
use crate::kernel::{line_curvature, KernelSpec};
use crate::scalar::Rational;

/// Order of the exact series used for the curvature side.
pub const EXACT_ORDER: usize = 48;

const MAX_CONDITION: f64 = 1e12;

type FrameFn = dyn Fn(Complex64) -> DMatrix<Complex64> + Send + Sync;

/// A holomorphic frame given by coordinates in a truncated orthonormal basis,
/// plus `-trace 𝒦` as an exact series converted to `f64`.
pub struct NumericFrame {
    dim: usize,
    rank: usize,
    eval: Box<FrameFn>,
    neg_trace_curv: RadialSeries<f64>,
}

impl std::fmt::Debug for NumericFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NumericFrame")
            .field("dim", &self.dim)
            .field("rank", &self.rank)
            .finish_non_exhaustive()
    }
}

fn sqrt_coeffs(spec: &KernelSpec, m: usize) -> Result<Vec<f64>> {
    let a: RadialSeries<f64> = spec.metric_series(m - 1)?;
    a.coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if c >= 0.0 {
                Ok(c.sqrt())
            } else {
                Err(Error::NonpositiveCoefficient { index: i })
            }
        })
        .collect()
}

impl NumericFrame {
    pub fn new(
        dim: usize,
        rank: usize,
        eval: Box<FrameFn>,
        neg_trace_curv: RadialSeries<f64>,
    ) -> Self {
        Self {
            dim,
            rank,
            eval,
            neg_trace_curv,
        }
    }

    /// `K(·, w̄)` in the basis `z^i / ‖z^i‖`: coordinates `sqrt(a_i) w^i`.
    pub fn from_kernel(spec: &KernelSpec, m: usize) -> Result<Self> {
        let s = sqrt_coeffs(spec, m)?;
        let curv = line_curvature(&spec.metric_series::<Rational>(EXACT_ORDER + 1)?)?;
        let eval = move |w: Complex64| {
            let mut p = Complex64::new(1.0, 0.0);
            DMatrix::from_fn(s.len(), 1, |i, _| {
                let v = p * s[i];
                p *= w;
                v
            })
        };
        Ok(Self::new(m, 1, Box::new(eval), (-curv).to_f64()))
    }

    /// The rank-two frame `γ_0 = (sqrt(a_i) w^i, 0)`,
    /// `γ_1 = (sqrt(a_i) i w^{i-1}, -sqrt(b_i) w^i)` in `C^M ⊕ C^M`, whose
    /// Gram matrix is the FB₂ matrix of `h0 = Σ a_i t^i`, `h1 = Σ b_i t^i`.
    pub fn fb2(h0: &KernelSpec, h1: &KernelSpec, m: usize) -> Result<Self> {
        let sa = sqrt_coeffs(h0, m)?;
        let sb = sqrt_coeffs(h1, m)?;
        let spec = FrameSpecFB2::<Rational>::new(
            h0.metric_series(EXACT_ORDER + 1)?,
            h1.metric_series(EXACT_ORDER + 1)?,
            None,
        )?;
        let det = gram_fb2(&spec).det().restrict()?;
        let curv = line_curvature(&det)?;
        let eval = move |w: Complex64| {
            let mut out = DMatrix::zeros(2 * m, 2);
            let mut p = Complex64::new(1.0, 0.0);
            let mut prev = Complex64::new(0.0, 0.0);
            for i in 0..m {
                out[(i, 0)] = p * sa[i];
                out[(i, 1)] = prev * (sa[i] * i as f64);
                out[(m + i, 1)] = -p * sb[i];
                prev = p;
                p *= w;
            }
            out
        };
        Ok(Self::new(2 * m, 2, Box::new(eval), (-curv).to_f64()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn eval(&self, w: Complex64) -> DMatrix<Complex64> {
        (self.eval)(w)
    }

    pub fn neg_trace_curv(&self) -> &RadialSeries<f64> {
        &self.neg_trace_curv
    }

    fn projection(&self, w: Complex64) -> Result<DMatrix<Complex64>> {
        let alpha = self.eval(w);
        let h = alpha.adjoint() * &alpha;
        let eig = h.clone().symmetric_eigen().eigenvalues;
        let (lo, hi) = eig
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if !(lo > 0.0) || hi / lo > MAX_CONDITION {
            return Err(Error::IllConditionedFrame(format!(
                "Gram eigenvalues in [{lo:e}, {hi:e}] at w = {w}"
            )));
        }
        let inv = h
            .try_inverse()
            .ok_or_else(|| Error::IllConditionedFrame(format!("singular Gram matrix at w = {w}")))?;
        Ok(&alpha * inv * alpha.adjoint())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsCheck {
    pub hs_sq: f64,
    pub neg_trace_curv: f64,
    pub gap: f64,
}

pub const DEFAULT_STEP: f64 = 1e-4;

/// Central differences in `x` and `y` assembled into `∂ = (∂_x - i∂_y)/2`.
pub fn projection_hs_check(frame: &NumericFrame, w: Complex64, step: f64) -> Result<HsCheck> {
    if w.norm() + step >= 1.0 {
        return Err(Error::IllConditionedFrame(format!("|w| = {} is not inside the disc", w.norm())));
    }
    let dx = Complex64::new(step, 0.0);
    let dy = Complex64::new(0.0, step);
    let px = (frame.projection(w + dx)? - frame.projection(w - dx)?) / Complex64::new(2.0 * step, 0.0);
    let py = (frame.projection(w + dy)? - frame.projection(w - dy)?) / Complex64::new(2.0 * step, 0.0);
    let d = (px - py * Complex64::i()) * Complex64::new(0.5, 0.0);
    let hs_sq = d.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let neg_trace_curv = frame.neg_trace_curv.evaluate(w.norm_sqr());
    Ok(HsCheck {
        hs_sq,
        neg_trace_curv,
        gap: (hs_sq - neg_trace_curv).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn szego_at_point_three() {
        let f = NumericFrame::from_kernel(&KernelSpec::power(1), 200).unwrap();
        let r = projection_hs_check(&f, Complex64::new(0.3, 0.0), DEFAULT_STEP).unwrap();
        assert!((r.hs_sq - 1.0 / (0.91f64 * 0.91)).abs() < 1e-6, "{r:?}");
        assert!(r.gap < 1e-6);
    }

    #[test]
    fn power_kernel_at_origin() {
        for alpha in 1..=3 {
            let f = NumericFrame::from_kernel(&KernelSpec::power(alpha), 200).unwrap();
            let r = projection_hs_check(&f, Complex64::new(0.0, 0.0), DEFAULT_STEP).unwrap();
            assert!((r.hs_sq - alpha as f64).abs() < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn fb2_homogeneous_at_origin() {
        let f = NumericFrame::fb2(&KernelSpec::power(1), &KernelSpec::power(3), 200).unwrap();
        let r = projection_hs_check(&f, Complex64::new(0.0, 0.0), DEFAULT_STEP).unwrap();
        assert!((r.hs_sq - 4.0).abs() < 1e-6, "{r:?}");
        assert!((r.neg_trace_curv - 4.0).abs() < 1e-12);
    }

    #[test]
    fn outside_disc() {
        let f = NumericFrame::from_kernel(&KernelSpec::power(1), 50).unwrap();
        assert!(matches!(
            projection_hs_check(&f, Complex64::new(1.0, 0.0), DEFAULT_STEP),
            Err(Error::IllConditionedFrame(_))
        ));
    }
}
