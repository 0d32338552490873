//! Dense helpers: Gram-Schmidt, projectors, ranks, orthogonal complements.

use nalgebra::{DMatrix, DVector};

/// Tolerance for rank decisions after orthogonalization.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("vectors are dependent: rank {rank} of {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("no vectors given")]
    Empty,
}

/// Modified Gram-Schmidt with a second pass. Vectors whose residual norm
/// drops below `tol` times their original norm are skipped.
pub fn orthonormal_span(vectors: &[DVector<f64>], tol: f64) -> DMatrix<f64> {
    let dim = vectors.first().map_or(0, |v| v.len());
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &cols {
                let c = q.dot(&w);
                if c != 0.0 {
                    w.axpy(-c, q, 1.0);
                }
            }
        }
        let r = w.norm();
        if r > tol * norm0 {
            cols.push(w / r);
        }
    }
    if cols.is_empty() {
        return DMatrix::zeros(dim, 0);
    }
    DMatrix::from_columns(&cols)
}

/// Orthonormal basis of the span; fails unless all vectors are independent.
pub fn orthonormalize(vectors: &[DVector<f64>]) -> Result<DMatrix<f64>, LinalgError> {
    if vectors.is_empty() {
        return Err(LinalgError::Empty);
    }
    let q = orthonormal_span(vectors, RANK_TOL);
    if q.ncols() != vectors.len() {
        return Err(LinalgError::RankDeficient { rank: q.ncols(), expected: vectors.len() });
    }
    Ok(q)
}

pub fn rank(vectors: &[DVector<f64>]) -> usize {
    orthonormal_span(vectors, RANK_TOL).ncols()
}

/// `Q Q^T` for orthonormal columns `Q`.
pub fn projector_from_orthonormal(q: &DMatrix<f64>) -> DMatrix<f64> {
    q * q.transpose()
}

/// Orthogonal projector onto the span of independent vectors.
pub fn projector(vectors: &[DVector<f64>]) -> Result<DMatrix<f64>, LinalgError> {
    Ok(projector_from_orthonormal(&orthonormalize(vectors)?))
}

/// Orthonormal basis of the orthogonal complement of the span.
pub fn complement_basis(vectors: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let q = orthonormal_span(vectors, RANK_TOL);
    let mut all: Vec<DVector<f64>> = q.column_iter().map(|c| c.into_owned()).collect();
    let start = all.len();
    for k in 0..dim {
        all.push(DVector::from_fn(dim, |i, _| if i == k { 1.0 } else { 0.0 }));
    }
    let full = orthonormal_span(&all, 1e-8);
    full.column_iter().skip(start).map(|c| c.into_owned()).collect()
}

/// Dimension of the intersection of two spans.
pub fn intersection_dim(a: &[DVector<f64>], b: &[DVector<f64>]) -> usize {
    let joint: Vec<_> = a.iter().chain(b).cloned().collect();
    rank(a) + rank(b) - rank(&joint)
}

/// Largest absolute off-diagonal entry of the Gram matrix of unit-normalized vectors.
pub fn max_normalized_overlap(vectors: &[DVector<f64>]) -> f64 {
    let units: Vec<DVector<f64>> = vectors.iter().map(|v| v / v.norm()).collect();
    let mut worst: f64 = 0.0;
    for (k, a) in units.iter().enumerate() {
        for b in &units[k + 1..] {
            worst = worst.max(a.dot(b).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn projector_properties() {
        let p = projector(&[v(&[1.0, 1.0, 0.0]), v(&[0.0, 1.0, 1.0])]).unwrap();
        assert!((&p * &p - &p).norm() < 1e-12);
        assert!((&p - p.transpose()).norm() < 1e-12);
        assert!((p.trace() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dependent_vectors_are_rejected() {
        let err = orthonormalize(&[v(&[1.0, 0.0]), v(&[2.0, 0.0])]).unwrap_err();
        assert_eq!(err, LinalgError::RankDeficient { rank: 1, expected: 2 });
    }

    #[test]
    fn complements() {
        let full = [v(&[1.0, 0.0]), v(&[1.0, 1.0])];
        assert!(complement_basis(&full, 2).is_empty());
        let c = complement_basis(&[v(&[1.0, 1.0, 0.0])], 3);
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|x| (x[0] + x[1]).abs() < 1e-12));
    }

    #[test]
    fn intersections() {
        let a = [v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])];
        let b = [v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])];
        assert_eq!(intersection_dim(&a, &b), 1);
    }
}
