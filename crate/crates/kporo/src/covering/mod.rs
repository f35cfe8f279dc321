//! Executable form of the covering machinery: empty-half-space search,
//! convex boundary decomposition into planar pieces, the half-space
//! translation check, and the inductive covering construction with a
//! machine-checkable certificate.

mod body;
mod construct;
mod decompose;
mod lemma;

pub use body::ConvexBody;
pub use construct::{
    covering_construction, find_empty_halfspaces, CoverBall, CoverParams, CoverResult,
};
pub use decompose::{decompose_boundary, PlanarPiece};
pub use lemma::{check_translation_lemma, TranslationInstance};
