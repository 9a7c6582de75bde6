//! The ambient space `V ≅ ℝⁿ` with a rational inner product.

use crate::error::{Error, Result};
use crate::linalg::{identity, inverse, is_positive_definite, is_symmetric, mat_mul, mat_vec, transpose, Mat};
use crate::rational::{dot, Rat, Vector};

/// `V = ℝⁿ` with inner product `⟨x, y⟩ = xᵀ A y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    pub dim: usize,
    pub gram: Mat,
}

impl Space {
    /// Standard dot product.
    pub fn euclidean(dim: usize) -> Self {
        Space { dim, gram: identity(dim) }
    }

    /// Space with a given symmetric positive-definite Gram matrix.
    pub fn with_inner_product(gram: Mat) -> Result<Self> {
        let dim = gram.len();
        if gram.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInnerProduct("matrix is not square".into()));
        }
        if !is_symmetric(&gram) {
            return Err(Error::InvalidInnerProduct("matrix is not symmetric".into()));
        }
        if !is_positive_definite(&gram) {
            return Err(Error::InvalidInnerProduct("matrix is not positive definite".into()));
        }
        Ok(Space { dim, gram })
    }

    pub fn ip(&self, x: &[Rat], y: &[Rat]) -> Rat {
        dot(x, &mat_vec(&self.gram, y))
    }

    pub fn norm2(&self, x: &[Rat]) -> Rat {
        self.ip(x, x)
    }

    /// The covector `⟨·, v⟩`, i.e. `A v`, so that `⟨x, v⟩ = covector · x`.
    pub fn covector(&self, v: &[Rat]) -> Vector {
        mat_vec(&self.gram, v)
    }

    /// Inverse of [`Space::covector`]: the vector `v` with `⟨·,v⟩ = c`.
    pub fn vector_of(&self, c: &[Rat]) -> Vector {
        let inv = inverse(&self.gram).expect("positive definite");
        mat_vec(&inv, c)
    }

    pub fn check_dim(&self, v: &[Rat]) -> Result<()> {
        if v.len() != self.dim {
            Err(Error::DimensionMismatch { expected: self.dim, got: v.len() })
        } else {
            Ok(())
        }
    }

    /// Gram matrix `Wᵀ A W` of a list of vectors.
    pub fn gram_of(&self, ws: &[Vector]) -> Mat {
        ws.iter().map(|a| ws.iter().map(|b| self.ip(a, b)).collect()).collect()
    }

    /// Orthogonal projection onto `Span(ws)` (`ws` independent):
    /// `π(x) = W G⁻¹ Wᵀ A x`.
    pub fn project_onto(&self, ws: &[Vector], x: &[Rat]) -> Vector {
        if ws.is_empty() {
            return vec![Rat::from_integer(0.into()); self.dim];
        }
        let g = self.gram_of(ws);
        let rhs: Vector = ws.iter().map(|w| self.ip(w, x)).collect();
        let c = crate::linalg::solve(&g, &rhs).expect("independent vectors");
        let mut out = vec![Rat::from_integer(0.into()); self.dim];
        for (ci, w) in c.iter().zip(ws) {
            out = crate::rational::axpy(&out, ci, w);
        }
        out
    }

    /// Orthogonal projection onto `Span(ws)^⊥`.
    pub fn project_perp(&self, ws: &[Vector], x: &[Rat]) -> Vector {
        crate::rational::sub(x, &self.project_onto(ws, x))
    }

    /// Induced space on the coordinates `y` of `x = U y`.
    pub fn restrict(&self, basis: &[Vector]) -> Space {
        let u = crate::linalg::from_columns(basis, self.dim);
        Space { dim: basis.len(), gram: mat_mul(&mat_mul(&transpose(&u), &self.gram), &u) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, vec_i};

    #[test]
    fn rejects_indefinite() {
        assert!(Space::with_inner_product(vec![vec_i(&[1, 2]), vec_i(&[2, 1])]).is_err());
        assert!(Space::with_inner_product(vec![vec_i(&[2, 1]), vec_i(&[1, 2])]).is_ok());
    }

    #[test]
    fn projection() {
        let sp = Space::euclidean(2);
        let p = sp.project_onto(&[vec_i(&[1, 1])], &vec_i(&[2, 0]));
        assert_eq!(p, vec_i(&[1, 1]));
        assert_eq!(sp.project_perp(&[vec_i(&[1, 1])], &vec_i(&[2, 0])), vec_i(&[1, -1]));
        assert_eq!(sp.ip(&vec_i(&[1, 2]), &vec_i(&[3, 4])), rat(11));
    }
}
