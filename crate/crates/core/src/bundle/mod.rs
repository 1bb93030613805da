//! Hermitian holomorphic bundles given by frame Gram matrices.

mod frames;
pub mod linalg;
mod matrix;
mod numeric;
mod tensor;

pub use frames::{
    det_trace_report, gram_fb2, gram_fb3, second_fundamental_form_sq, trace_additivity_report,
    unitary_invariant_triple, AdditivityReport, DetTraceReport, FrameSpecFB2, FrameSpecFB3,
    FrameSpecJson, InvariantTriple,
};
pub use linalg::{minor_det_identity_check, DetIdentity};
pub use matrix::{covariant_derivative, curvature_matrix, Direction, GramSeriesMatrix, SeriesMatrix};
pub use numeric::{projection_hs_check, HsCheck, NumericFrame, DEFAULT_STEP, EXACT_ORDER};
pub use tensor::{tensor_curvature, TensorReport};
