//! Ellipsoids `E = c + T·B₂ⁿ` with symmetric positive definite shape `T`.

use nalgebra::DMatrix;

use super::polytope::{HPolytope, Matrix, Vector};
use crate::error::{Error, Result};
use crate::special::unit_ball_volume;

#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: Vector,
    shape: Matrix,
}

impl Ellipsoid {
    /// Construct from center and shape. The shape must be symmetric within
    /// 1e-12 (it is re-symmetrized) and positive definite.
    pub fn new(center: Vector, shape: Matrix) -> Result<Self> {
        let n = center.len();
        if shape.nrows() != n || shape.ncols() != n {
            return Err(Error::InvalidArgument(
                "shape matrix does not match center dimension".into(),
            ));
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * (1.0 + shape.amax()) {
            return Err(Error::InvalidArgument(format!(
                "shape matrix is not symmetric (asymmetry {asym:.3e})"
            )));
        }
        let sym = (&shape + shape.transpose()) * 0.5;
        let eig = sym.clone().symmetric_eigen();
        let min_eig = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "shape matrix is not positive definite (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self { center, shape: sym })
    }

    pub fn unit_ball(n: usize) -> Self {
        Self {
            center: Vector::zeros(n),
            shape: Matrix::identity(n, n),
        }
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        let n = center.len();
        Self::new(center, Matrix::identity(n, n) * radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn shape(&self) -> &Matrix {
        &self.shape
    }

    pub fn eigenvalues(&self) -> Vector {
        self.shape.clone().symmetric_eigen().eigenvalues
    }

    pub fn det(&self) -> f64 {
        self.shape.clone().lu().determinant()
    }

    /// Volume `det(T) · |B₂ⁿ|`.
    pub fn volume(&self) -> f64 {
        self.det() * unit_ball_volume(self.dim())
    }

    /// Containment test against an H-polytope: for every row,
    /// `‖T a‖ + ⟨a, c⟩ ≤ b + tol`.
    pub fn contained_in(&self, k: &HPolytope, tol: f64) -> bool {
        if k.is_degenerate() {
            return false;
        }
        k.rows().iter().all(|r| {
            (&self.shape * &r.normal).norm() + r.normal.dot(&self.center) <= r.offset + tol
        })
    }

    /// Image under `x ↦ M x + v`; the shape of the image is the symmetric
    /// square root of `M T² Mᵀ`.
    pub fn affine_image(&self, m: &Matrix, v: &Vector) -> Result<Ellipsoid> {
        let center = m * &self.center + v;
        let sq = m * &self.shape * &self.shape * m.transpose();
        let shape = sym_sqrt(&sq)?;
        Ellipsoid::new(center, shape)
    }

    /// The affine map `x ↦ T⁻¹(x − c)` sending this ellipsoid onto the unit
    /// ball, as `(linear, offset)`.
    pub fn map_to_unit_ball(&self) -> Result<(Matrix, Vector)> {
        let inv = self
            .shape
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("shape matrix is numerically singular".into()))?;
        let offset = -(&inv * &self.center);
        Ok((inv, offset))
    }
}

/// Symmetric square root of a symmetric positive semi-definite matrix.
pub fn sym_sqrt(a: &Matrix) -> Result<Matrix> {
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let lam = eig.eigenvalues[i];
        if lam < -1e-10 * (1.0 + a.amax()) {
            return Err(Error::Numerical(format!(
                "matrix has negative eigenvalue {lam:.3e}; no real square root"
            )));
        }
        d[(i, i)] = lam.max(0.0).sqrt();
    }
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}
