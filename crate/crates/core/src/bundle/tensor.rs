
use super::matrix::{curvature_matrix, GramSeriesMatrix, SeriesMatrix};
use crate::error::{Error, Result};
use crate::fps::BiSeries;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct TensorReport<S> {
    /// Curvature of the product metric `h1 · g`.
    pub total: SeriesMatrix<S>,
    /// `𝒦_{h1} + 𝒦_g I`.
    pub expected: SeriesMatrix<S>,
    /// Line-bundle curvature of `g`.
    pub line: BiSeries<S>,
    pub additive: bool,
}

/// Tensors `h1` with the line bundle whose metric is
/// `g(u, v) = Σ e_i(u) e_i(v)` for real polynomial sections `e_i`.
pub fn tensor_curvature<S: Scalar>(
    h1: &GramSeriesMatrix<S>,
    e_polys: &[Vec<S>],
) -> Result<TensorReport<S>> {
    let order = h1.order();
    let mut g = BiSeries::zero(order);
    for e in e_polys {
        let eu = BiSeries::poly_in_u(e, order);
        g = &g + &(&eu * &eu.conj());
    }
    if g.constant_term().is_zero() {
        return Err(Error::ZeroSection);
    }
    let line = curvature_matrix(&SeriesMatrix::scalar(g.clone()))?
        .get(0, 0)
        .clone();
    let total = curvature_matrix(&h1.scale_by(&g))?;
    let k1 = curvature_matrix(h1)?;
    let id = SeriesMatrix::identity(h1.dim(), line.order());
    let expected = &k1 + &id.scale_by(&line);
    Ok(TensorReport {
        additive: total.agrees_with(&expected),
        total,
        expected,
        line,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::RadialSeries;
    use crate::scalar::Rational;

    fn r(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn szego_times_one_plus_t() {
        let h1 = SeriesMatrix::scalar(BiSeries::lift(&RadialSeries::<Rational>::geometric(8)));
        let rep = tensor_curvature(&h1, &[vec![r(1)], vec![r(0), r(1)]]).unwrap();
        assert!(rep.additive);
        // -(1+t)^{-2} = -Σ (-1)^n (n+1) t^n
        let line = rep.line.restrict().unwrap();
        for n in 0..=line.order() {
            let sign = if n % 2 == 0 { -1 } else { 1 };
            assert_eq!(*line.coeff(n), r(sign * (n as i64 + 1)));
        }
    }

    #[test]
    fn trivial_section() {
        let h1 = SeriesMatrix::scalar(BiSeries::lift(&RadialSeries::<Rational>::geometric(6)));
        let rep = tensor_curvature(&h1, &[vec![r(1)]]).unwrap();
        assert!(rep.line.is_zero());
        assert!(rep.total.agrees_with(&curvature_matrix(&h1).unwrap()));
        assert_eq!(
            tensor_curvature(&h1, &[vec![r(0), r(1)]]),
            Err(Error::ZeroSection)
        );
    }

    #[test]
    fn rank_two() {
        let h0 = RadialSeries::<Rational>::geometric(6);
        let spec = crate::bundle::FrameSpecFB2::new(h0.clone(), h0, None).unwrap();
        let h = crate::bundle::gram_fb2(&spec);
        let rep = tensor_curvature(&h, &[vec![r(1)], vec![r(0), r(0), r(1)]]).unwrap();
        assert!(rep.additive);
    }
}
