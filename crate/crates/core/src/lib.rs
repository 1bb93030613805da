//! Exact curvature invariants of Cowen-Douglas eigenvector bundles over the
//! unit disc: truncated power series in `w, w̄`, diagonal kernels, frame Gram
//! matrices, weighted shifts and curvature-difference similarity
//! certificates.
//!
//! Everything is generic over [`Scalar`]; the aliases below fix the two
//! scalars in use, exact rationals and `f64`.

pub mod bundle;
pub mod cli;
pub mod error;
pub mod fps;
pub mod kernel;
pub mod operator;
pub mod random;
pub mod scalar;
pub mod similarity;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

pub type RadialSeriesQ = fps::RadialSeries<Rational>;
pub type RadialSeriesF64 = fps::RadialSeries<f64>;
pub type BiSeriesQ = fps::BiSeries<Rational>;
pub type BiSeriesF64 = fps::BiSeries<f64>;
pub type GramMatrixQ = bundle::GramSeriesMatrix<Rational>;
pub type GramMatrixF64 = bundle::GramSeriesMatrix<f64>;
pub type DiagonalKernelQ = kernel::DiagonalKernel<Rational>;
pub type DiagonalKernelF64 = kernel::DiagonalKernel<f64>;
pub type WeightedShiftQ = operator::WeightedShift<Rational>;
pub type SimilarityReportQ = similarity::SimilarityReport<Rational>;
