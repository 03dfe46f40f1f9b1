//! Random geometry: Haar matrices, subspace frames, positive spanning sets
//! and cosine measures.

mod alignment;
mod cosine;
mod directions;
mod haar;
mod matrix;

pub use alignment::{empirical_min_alignment, FrameSampler};
pub use cosine::{cosine_measure, cosine_measure_witness, restricted_cosine_measure};
pub use directions::{
    map_to_fullspace, maximal_positive_basis_from, minimal_positive_basis, minimal_positive_basis_from,
    DirectionSet, DirectionTag,
};
pub use haar::{sample_haar_frame, sample_haar_orthogonal, take_frame, GinibreMatrix, HaarOrthogonal, SubspaceFrame};
pub use matrix::{dot, norm, Matrix};
