//! Finite-dimensional convex bodies: representation, conversion, measure and
//! projection primitives.

pub mod bodies;
pub mod ellipsoid;
pub mod hull;
pub mod polytope;

pub use ellipsoid::{sym_sqrt, Ellipsoid};
pub use hull::orthonormal_complement;
pub use polytope::{HPolytope, Halfspace, Matrix, VPolytope, Vector, MAX_DIM};

/// Invertible affine map `x ↦ linear·x + offset`.
#[derive(Debug, Clone)]
pub struct AffineMap {
    pub linear: Matrix,
    pub offset: Vector,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        Self {
            linear: Matrix::identity(n, n),
            offset: Vector::zeros(n),
        }
    }

    pub fn new(linear: Matrix, offset: Vector) -> Self {
        Self { linear, offset }
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.linear * x + &self.offset
    }

    pub fn inverse(&self) -> crate::Result<Self> {
        let inv = self
            .linear
            .clone()
            .try_inverse()
            .ok_or_else(|| crate::Error::InvalidArgument("singular affine map".into()))?;
        let offset = -(&inv * &self.offset);
        Ok(Self {
            linear: inv,
            offset,
        })
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            linear: &self.linear * &other.linear,
            offset: &self.linear * &other.offset + &self.offset,
        }
    }
}

#[cfg(test)]
mod tests;
