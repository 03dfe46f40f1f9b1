use rand::Rng;

use super::haar::{sample_haar_orthogonal, SubspaceFrame};
use super::matrix::{norm, Matrix};
use crate::error::{Error, Result};

/// What a [`DirectionSet`] is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionTag {
    /// Positive spanning set of the subspace coordinates `R^p`.
    PssSubspace,
    /// Poll directions in the ambient space `R^n`.
    PollFullspace,
}

/// An ordered set of unit vectors sharing one ambient dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    directions: Vec<Vec<f64>>,
    dim: usize,
    tag: DirectionTag,
}

const UNIT_TOL: f64 = 1e-12;

impl DirectionSet {
    /// Normalizes each vector. Zero vectors and ragged input are rejected.
    pub fn normalized(vectors: Vec<Vec<f64>>, tag: DirectionTag) -> Result<Self> {
        let dim = vectors.first().map(Vec::len).ok_or(Error::EmptyDirectionSet)?;
        let mut directions = Vec::with_capacity(vectors.len());
        for mut v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            let len = norm(&v);
            if len == 0.0 || !len.is_finite() {
                return Err(Error::ZeroVector);
            }
            v.iter_mut().for_each(|x| *x /= len);
            directions.push(v);
        }
        if dim == 0 {
            return Err(Error::InvalidDimension("directions must have dimension >= 1".into()));
        }
        Ok(Self {
            directions,
            dim,
            tag,
        })
    }

    /// Wraps vectors that must already have unit norm (within 1e-12).
    pub fn from_unit_vectors(vectors: Vec<Vec<f64>>, tag: DirectionTag) -> Result<Self> {
        for v in &vectors {
            if (norm(v) - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidDimension(format!(
                    "direction has norm {} instead of 1",
                    norm(v)
                )));
            }
        }
        Self::normalized(vectors, tag)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> DirectionTag {
        self.tag
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.directions.iter().map(Vec::as_slice)
    }

    /// Same directions in the order given by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            directions: perm.iter().map(|&i| self.directions[i].clone()).collect(),
            dim: self.dim,
            tag: self.tag,
        }
    }

    /// Gram matrix of the directions.
    pub fn gram(&self) -> Matrix {
        Matrix::from_columns(self.dim, &self.directions).gram()
    }
}

/// `p + 1` directions: the columns of a fresh Haar matrix of size `p` plus
/// the negated, normalized column sum.
pub fn minimal_positive_basis<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Result<DirectionSet> {
    let basis = sample_haar_orthogonal(p, rng)?;
    minimal_positive_basis_from(basis.matrix())
}

/// Minimal positive basis built on the columns of a given orthonormal basis.
pub fn minimal_positive_basis_from(basis: &Matrix) -> Result<DirectionSet> {
    let p = basis.rows();
    if p == 0 || basis.cols() != p {
        return Err(Error::InvalidDimension(format!(
            "basis must be square and nonempty, got {}x{}",
            basis.rows(),
            basis.cols()
        )));
    }
    let mut vectors: Vec<Vec<f64>> = (0..p).map(|j| basis.col(j).to_vec()).collect();
    let mut sum = vec![0.0; p];
    for v in &vectors {
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
    }
    vectors.push(sum.into_iter().map(|x| -x).collect());
    DirectionSet::normalized(vectors, DirectionTag::PssSubspace)
}

/// Maximal positive basis `{±b_j}` on the columns of an orthonormal basis.
pub fn maximal_positive_basis_from(basis: &Matrix, tag: DirectionTag) -> Result<DirectionSet> {
    let mut vectors = Vec::with_capacity(2 * basis.cols());
    for j in 0..basis.cols() {
        let c = basis.col(j);
        vectors.push(c.to_vec());
        vectors.push(c.iter().map(|x| -x).collect());
    }
    DirectionSet::normalized(vectors, tag)
}

/// Images `U d` of subspace directions under the frame's orthonormal columns.
pub fn map_to_fullspace(frame: &SubspaceFrame, d: &DirectionSet) -> Result<DirectionSet> {
    if d.ambient_dim() != frame.subspace_dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.subspace_dim(),
            got: d.ambient_dim(),
        });
    }
    let images = d.iter().map(|v| frame.embed(v)).collect();
    DirectionSet::normalized(images, DirectionTag::PollFullspace)
}
