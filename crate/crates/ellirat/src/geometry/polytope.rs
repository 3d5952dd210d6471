//! Convex bodies as halfspace intersections and vertex hulls.
//!
//! `HPolytope` is the working representation for level sets: rows
//! `⟨a, x⟩ ≤ b` with unit normals, plus an explicit degenerate flag for
//! empty-interior levels (flat tops, the t = 1 level of a gauge power).
//! `VPolytope` is the dual view used by volumes and shadows.

use nalgebra::{DMatrix, DVector};

use super::hull;
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Maximum ambient dimension handled by the exact volume machinery.
pub const MAX_DIM: usize = 6;

/// Coincidence tolerance for vertex enumeration.
const VERTEX_TOL: f64 = 1e-9;

/// Closed halfspace `⟨normal, x⟩ ≤ offset` with `‖normal‖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

/// Bounded convex polytope in halfspace representation.
#[derive(Debug, Clone)]
pub struct HPolytope {
    rows: Vec<Halfspace>,
    dim: usize,
    /// Witness point for explicitly degenerate (empty-interior) bodies.
    degenerate: Option<Vector>,
}

impl HPolytope {
    /// Build from raw rows `(a, b)` meaning `⟨a, x⟩ ≤ b`. Normals are
    /// normalized to unit length; vacuous rows (`a ≈ 0`, `b ≥ 0`) are
    /// dropped and contradictory ones rejected.
    pub fn from_rows(dim: usize, raw: impl IntoIterator<Item = (Vector, f64)>) -> Result<Self> {
        let mut rows: Vec<Halfspace> = Vec::new();
        for (a, b) in raw {
            if a.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "row dimension {} does not match ambient dimension {}",
                    a.len(),
                    dim
                )));
            }
            let norm = a.norm();
            if norm <= 1e-14 {
                if b >= 0.0 {
                    continue;
                }
                return Err(Error::Infeasible);
            }
            let normal = a / norm;
            let offset = b / norm;
            // drop exact duplicates produced by repeated construction
            if rows.iter().any(|r| {
                (&r.normal - &normal).norm() <= 1e-12 && (r.offset - offset).abs() <= 1e-12
            }) {
                continue;
            }
            rows.push(Halfspace { normal, offset });
        }
        if rows.is_empty() {
            return Err(Error::InvalidArgument("no constraint rows".into()));
        }
        Ok(Self {
            rows,
            dim,
            degenerate: None,
        })
    }

    /// An explicitly degenerate body: the single point `point`.
    pub fn degenerate_point(point: Vector) -> Self {
        let dim = point.len();
        Self {
            rows: Vec::new(),
            dim,
            degenerate: Some(point),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Halfspace] {
        &self.rows
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate.is_some()
    }

    pub fn degenerate_witness(&self) -> Option<&Vector> {
        self.degenerate.as_ref()
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        if let Some(w) = &self.degenerate {
            return (x - w).norm() <= tol;
        }
        self.rows.iter().all(|r| r.normal.dot(x) <= r.offset + tol)
    }

    /// Gauge (Minkowski functional) of `x` with respect to this body, which
    /// must contain the origin strictly inside: `max_i ⟨a_i, x⟩ / b_i`.
    pub fn gauge_norm(&self, x: &Vector) -> Result<f64> {
        for (i, r) in self.rows.iter().enumerate() {
            if r.offset <= 0.0 {
                return Err(Error::OriginNotInterior {
                    row: i,
                    offset: r.offset,
                });
            }
        }
        let g = self
            .rows
            .iter()
            .map(|r| r.normal.dot(x) / r.offset)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(g.max(0.0))
    }

    /// Index of the facet attaining the gauge, plus the runner-up gap.
    /// Used by kink detection in the derivative checks.
    pub fn gauge_active_facet(&self, x: &Vector) -> Result<(usize, f64)> {
        self.gauge_norm(x)?; // validates offsets
        let vals: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r.normal.dot(x) / r.offset)
            .collect();
        let (best, _) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let runner_up = vals
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != best)
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((best, vals[best] - runner_up))
    }

    /// Dilation `λ·K` about the origin. Collapses to a degenerate point for
    /// vanishing `λ`.
    pub fn scale(&self, lambda: f64) -> Self {
        if let Some(w) = &self.degenerate {
            return Self::degenerate_point(w * lambda);
        }
        if lambda.abs() <= 1e-14 {
            return Self::degenerate_point(Vector::zeros(self.dim));
        }
        assert!(lambda > 0.0, "scale factor must be positive");
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| Halfspace {
                    normal: r.normal.clone(),
                    offset: r.offset * lambda,
                })
                .collect(),
            dim: self.dim,
            degenerate: None,
        }
    }

    /// Translate by `v`.
    pub fn translate(&self, v: &Vector) -> Self {
        if let Some(w) = &self.degenerate {
            return Self::degenerate_point(w + v);
        }
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| Halfspace {
                    normal: r.normal.clone(),
                    offset: r.offset + r.normal.dot(v),
                })
                .collect(),
            dim: self.dim,
            degenerate: None,
        }
    }

    /// Affine image `M·K + v` for invertible `M`.
    pub fn affine_image(&self, m: &Matrix, v: &Vector) -> Result<Self> {
        if let Some(w) = &self.degenerate {
            return Ok(Self::degenerate_point(m * w + v));
        }
        let mt = m.transpose();
        let lu = mt.lu();
        let mut rows = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let a = lu
                .solve(&r.normal)
                .ok_or_else(|| Error::InvalidArgument("singular affine map".into()))?;
            let b = r.offset + a.dot(v);
            rows.push((a, b));
        }
        Self::from_rows(self.dim, rows)
    }

    /// Whether every row has a mirrored partner `(−a, b)` within `tol`.
    pub fn is_origin_symmetric(&self, tol: f64) -> bool {
        if self.degenerate.is_some() {
            return false;
        }
        self.rows.iter().all(|r| {
            self.rows.iter().any(|q| {
                (&q.normal + &r.normal).norm() <= tol && (q.offset - r.offset).abs() <= tol
            })
        })
    }

    /// Chebyshev center: solves `max r` s.t. `⟨a_i, c⟩ + r ≤ b_i`.
    pub fn chebyshev_center(&self) -> Result<(Vector, f64)> {
        if let Some(w) = &self.degenerate {
            return Ok((w.clone(), 0.0));
        }
        let m = self.rows.len();
        let n = self.dim;
        let mut a = Matrix::zeros(m, n + 1);
        let mut b = Vector::zeros(m);
        for (i, r) in self.rows.iter().enumerate() {
            for j in 0..n {
                a[(i, j)] = r.normal[j];
            }
            a[(i, n)] = 1.0;
            b[i] = r.offset;
        }
        let mut c = Vector::zeros(n + 1);
        c[n] = 1.0;
        match lp::maximize(&c, &a, &b) {
            LpOutcome::Optimal { x, value } => {
                if value < -1e-12 {
                    return Err(Error::Infeasible);
                }
                Ok((x.rows(0, n).into_owned(), value.max(0.0)))
            }
            LpOutcome::Unbounded => Err(Error::Unbounded),
            LpOutcome::Infeasible => Err(Error::Infeasible),
        }
    }

    /// Inradius of the largest ball centered at the origin: `min_i b_i`.
    /// This is the centered inner radius (as opposed to the Chebyshev one).
    pub fn centered_inradius(&self) -> Result<f64> {
        for (i, r) in self.rows.iter().enumerate() {
            if r.offset < 0.0 {
                return Err(Error::OriginNotInterior {
                    row: i,
                    offset: r.offset,
                });
            }
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.offset)
            .fold(f64::INFINITY, f64::min))
    }

    /// Axis-aligned bounding box via 2n support LPs. Errors with
    /// [`Error::Unbounded`] when a recession direction exists.
    pub fn bounding_box(&self) -> Result<(Vector, Vector)> {
        if let Some(w) = &self.degenerate {
            return Ok((w.clone(), w.clone()));
        }
        let m = self.rows.len();
        let n = self.dim;
        let mut a = Matrix::zeros(m, n);
        let mut b = Vector::zeros(m);
        for (i, r) in self.rows.iter().enumerate() {
            for j in 0..n {
                a[(i, j)] = r.normal[j];
            }
            b[i] = r.offset;
        }
        let mut lo = Vector::zeros(n);
        let mut hi = Vector::zeros(n);
        for j in 0..n {
            for sign in [1.0f64, -1.0] {
                let mut c = Vector::zeros(n);
                c[j] = sign;
                match lp::maximize(&c, &a, &b) {
                    LpOutcome::Optimal { value, .. } => {
                        if sign > 0.0 {
                            hi[j] = value;
                        } else {
                            lo[j] = -value;
                        }
                    }
                    LpOutcome::Unbounded => return Err(Error::Unbounded),
                    LpOutcome::Infeasible => return Err(Error::Infeasible),
                }
            }
        }
        Ok((lo, hi))
    }

    /// Vertex set with the indices of the rows active at each vertex.
    ///
    /// Incremental double-description style cut: starts from a padded
    /// bounding box and intersects one halfspace at a time, generating new
    /// vertices on the crossing edges (adjacency decided by the rank of the
    /// shared active normals).
    pub fn vertices_with_active(&self) -> Result<Vec<(Vector, Vec<usize>)>> {
        if self.degenerate.is_some() {
            return Err(Error::EmptyInterior);
        }
        let n = self.dim;
        let (lo, hi) = self.bounding_box()?;
        let extent = (&hi - &lo).amax().max(1.0);
        let pad = 0.1 * extent + 1.0;
        let scale = extent + lo.amax().max(hi.amax()) + 1.0;
        let tol = VERTEX_TOL * scale;

        // box facets get pseudo-indices m .. m+2n
        let m = self.rows.len();
        struct Working {
            point: Vector,
            active: Vec<usize>,
        }
        let mut verts: Vec<Working> = (0..1usize << n)
            .map(|mask| {
                let mut p = Vector::zeros(n);
                let mut active = Vec::with_capacity(n);
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        p[i] = hi[i] + pad;
                        active.push(m + 2 * i);
                    } else {
                        p[i] = lo[i] - pad;
                        active.push(m + 2 * i + 1);
                    }
                }
                Working { point: p, active }
            })
            .collect();

        let row_normal = |idx: usize| -> Vector {
            if idx < m {
                self.rows[idx].normal.clone()
            } else {
                let axis = (idx - m) / 2;
                let mut e = Vector::zeros(n);
                e[axis] = if (idx - m).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                e
            }
        };

        for (i, row) in self.rows.iter().enumerate() {
            let slack: Vec<f64> = verts
                .iter()
                .map(|v| row.normal.dot(&v.point) - row.offset)
                .collect();
            if slack.iter().all(|&s| s <= tol) {
                continue;
            }
            if slack.iter().all(|&s| s > -tol) {
                return Err(Error::EmptyInterior);
            }
            let mut next: Vec<Working> = Vec::new();
            let inside: Vec<usize> = (0..verts.len()).filter(|&k| slack[k] <= tol).collect();
            let outside: Vec<usize> = (0..verts.len()).filter(|&k| slack[k] > tol).collect();
            for &ki in &inside {
                for &ko in &outside {
                    let shared: Vec<usize> = verts[ki]
                        .active
                        .iter()
                        .filter(|a| verts[ko].active.contains(a))
                        .cloned()
                        .collect();
                    if shared.len() + 1 < n {
                        continue;
                    }
                    if n >= 2 {
                        let mut mat = Matrix::zeros(shared.len(), n);
                        for (r, &idx) in shared.iter().enumerate() {
                            mat.row_mut(r).copy_from(&row_normal(idx).transpose());
                        }
                        if mat.rank(1e-7) < n - 1 {
                            continue;
                        }
                    }
                    let (si, so) = (slack[ki], slack[ko]);
                    let theta = si / (si - so);
                    let p = &verts[ki].point + (&verts[ko].point - &verts[ki].point) * theta;
                    let mut active = shared;
                    active.push(i);
                    active.sort_unstable();
                    next.push(Working { point: p, active });
                }
            }
            let mut merged: Vec<Working> = inside
                .into_iter()
                .map(|k| Working {
                    point: verts[k].point.clone(),
                    active: verts[k].active.clone(),
                })
                .collect();
            'cand: for cand in next {
                for existing in merged.iter_mut() {
                    if (&existing.point - &cand.point).norm() <= tol {
                        for a in cand.active {
                            if !existing.active.contains(&a) {
                                existing.active.push(a);
                            }
                        }
                        existing.active.sort_unstable();
                        continue 'cand;
                    }
                }
                merged.push(cand);
            }
            verts = merged;
        }

        // Final pass: recompute active sets against the real rows only, drop
        // anything still supported by an artificial box facet or of
        // deficient rank.
        let mut out: Vec<(Vector, Vec<usize>)> = Vec::new();
        'v: for v in verts {
            if v.active.iter().any(|&a| a >= m) {
                continue;
            }
            let active: Vec<usize> = (0..m)
                .filter(|&i| {
                    (self.rows[i].normal.dot(&v.point) - self.rows[i].offset).abs()
                        <= tol * (1.0 + self.rows[i].offset.abs())
                })
                .collect();
            if active.len() < n {
                continue;
            }
            if n >= 2 {
                let mut mat = Matrix::zeros(active.len(), n);
                for (r, &idx) in active.iter().enumerate() {
                    mat.row_mut(r).copy_from(&self.rows[idx].normal.transpose());
                }
                if mat.rank(1e-7) < n {
                    continue;
                }
            }
            if !self.contains(&v.point, 10.0 * tol) {
                continue;
            }
            for (q, _) in out.iter() {
                if (q - &v.point).norm() <= tol {
                    continue 'v;
                }
            }
            out.push((v.point, active));
        }
        if out.is_empty() {
            return Err(Error::EmptyInterior);
        }
        Ok(out)
    }

    /// Exact vertex enumeration.
    pub fn enumerate_vertices(&self) -> Result<VPolytope> {
        let verts = self.vertices_with_active()?;
        Ok(VPolytope::from_extreme_unchecked(
            self.dim,
            verts.into_iter().map(|(p, _)| p).collect(),
        ))
    }

    /// Exact volume by per-facet fan triangulation from the vertex centroid.
    pub fn volume(&self) -> Result<f64> {
        if self.degenerate.is_some() {
            return Ok(0.0);
        }
        if self.dim > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: self.dim,
                max: MAX_DIM,
            });
        }
        let verts = match self.vertices_with_active() {
            Ok(v) => v,
            Err(Error::EmptyInterior) => return Ok(0.0),
            Err(e) => return Err(e),
        };
        let n = self.dim;
        let points: Vec<Vector> = verts.iter().map(|(p, _)| p.clone()).collect();
        let centroid: Vector = points.iter().sum::<Vector>() / points.len() as f64;
        let mut vol = 0.0;
        let mut seen: Vec<(Vector, f64)> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let members: Vec<Vector> = verts
                .iter()
                .filter(|(_, act)| act.contains(&i))
                .map(|(p, _)| p.clone())
                .collect();
            if members.len() < n {
                continue;
            }
            // merge duplicate facet planes (repeated construction rows)
            if seen.iter().any(|(nrm, off)| {
                (nrm.dot(&row.normal) - 1.0).abs() < 1e-9 && (off - row.offset).abs() < 1e-9
            }) {
                continue;
            }
            seen.push((row.normal.clone(), row.offset));
            let area = facet_area(&row.normal, &members, n);
            let dist = (row.offset - row.normal.dot(&centroid)).max(0.0);
            vol += area * dist / n as f64;
        }
        Ok(vol)
    }

    /// Surface area: sum of the (n−1)-measures of the facets.
    pub fn surface_area(&self) -> Result<f64> {
        if self.degenerate.is_some() {
            return Ok(0.0);
        }
        if self.dim > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: self.dim,
                max: MAX_DIM,
            });
        }
        Ok(self.facet_areas()?.into_iter().map(|(_, a)| a).sum())
    }

    /// Per-row facet areas (rows that do not support a facet report zero
    /// and are omitted).
    pub fn facet_areas(&self) -> Result<Vec<(usize, f64)>> {
        let verts = self.vertices_with_active()?;
        let n = self.dim;
        let mut seen: Vec<(Vector, f64)> = Vec::new();
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let members: Vec<Vector> = verts
                .iter()
                .filter(|(_, act)| act.contains(&i))
                .map(|(p, _)| p.clone())
                .collect();
            if members.len() < n {
                continue;
            }
            if seen.iter().any(|(nrm, off)| {
                (nrm.dot(&row.normal) - 1.0).abs() < 1e-9 && (off - row.offset).abs() < 1e-9
            }) {
                continue;
            }
            seen.push((row.normal.clone(), row.offset));
            let area = facet_area(&row.normal, &members, n);
            if area > 0.0 || n == 1 {
                out.push((i, area));
            }
        }
        Ok(out)
    }

    /// Support value `max_{x∈K} ⟨d, x⟩`.
    pub fn support(&self, direction: &Vector) -> Result<f64> {
        if let Some(w) = &self.degenerate {
            return Ok(direction.dot(w));
        }
        let m = self.rows.len();
        let n = self.dim;
        let mut a = Matrix::zeros(m, n);
        let mut b = Vector::zeros(m);
        for (i, r) in self.rows.iter().enumerate() {
            for j in 0..n {
                a[(i, j)] = r.normal[j];
            }
            b[i] = r.offset;
        }
        match lp::maximize(direction, &a, &b) {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Unbounded => Err(Error::Unbounded),
            LpOutcome::Infeasible => Err(Error::Infeasible),
        }
    }
}

fn facet_area(normal: &Vector, members: &[Vector], n: usize) -> f64 {
    if n == 1 {
        return 1.0; // a 0-dimensional facet is a point of measure one
    }
    let basis = hull::orthonormal_complement(normal);
    let base = &members[0];
    let projected: Vec<Vector> = members
        .iter()
        .map(|p| basis.transpose() * (p - base))
        .collect();
    hull::hull_volume(&projected, n - 1)
}

/// Convex body given by its extreme points.
#[derive(Debug, Clone)]
pub struct VPolytope {
    vertices: Vec<Vector>,
    dim: usize,
}

impl VPolytope {
    /// Build from an arbitrary point cloud, pruning non-extreme points.
    pub fn from_points(dim: usize, points: Vec<Vector>) -> Self {
        let pts = hull::dedup_points(&points, 1e-12);
        let vertices = match dim {
            0 | 1 => {
                if pts.is_empty() {
                    pts
                } else if dim == 0 {
                    vec![pts[0].clone()]
                } else {
                    let lo = pts
                        .iter()
                        .min_by(|a, b| a[0].total_cmp(&b[0]))
                        .unwrap()
                        .clone();
                    let hi = pts
                        .iter()
                        .max_by(|a, b| a[0].total_cmp(&b[0]))
                        .unwrap()
                        .clone();
                    if (&hi - &lo).norm() < 1e-14 {
                        vec![lo]
                    } else {
                        vec![lo, hi]
                    }
                }
            }
            2 => hull::convex_hull_2d(&pts),
            _ => pts
                .iter()
                .enumerate()
                .filter(|(i, p)| is_extreme(&pts, *i, p))
                .map(|(_, p)| p.clone())
                .collect(),
        };
        Self { vertices, dim }
    }

    /// Wrap a point set already known to be extreme (solver output).
    pub fn from_extreme_unchecked(dim: usize, vertices: Vec<Vector>) -> Self {
        Self { vertices, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn centroid(&self) -> Vector {
        self.vertices.iter().sum::<Vector>() / self.vertices.len() as f64
    }

    /// Exact hull volume.
    pub fn volume(&self) -> Result<f64> {
        if self.dim > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: self.dim,
                max: MAX_DIM,
            });
        }
        Ok(hull::hull_volume(&self.vertices, self.dim))
    }

    /// Orthogonal shadow on `direction⊥`, expressed in an orthonormal basis
    /// of that hyperplane; the result lives in dimension n−1.
    pub fn project(&self, direction: &Vector) -> Result<VPolytope> {
        if direction.norm() <= 1e-14 {
            return Err(Error::ZeroDirection);
        }
        let basis = hull::orthonormal_complement(direction);
        let projected: Vec<Vector> = self
            .vertices
            .iter()
            .map(|v| basis.transpose() * v)
            .collect();
        Ok(VPolytope::from_points(self.dim - 1, projected))
    }

    /// Shadow volume without constructing the pruned shadow; used in the
    /// per-direction integrals where only the measure matters.
    pub fn shadow_volume(&self, direction: &Vector) -> Result<f64> {
        if direction.norm() <= 1e-14 {
            return Err(Error::ZeroDirection);
        }
        let basis = hull::orthonormal_complement(direction);
        let projected: Vec<Vector> = self
            .vertices
            .iter()
            .map(|v| basis.transpose() * v)
            .collect();
        Ok(hull::hull_volume(&projected, self.dim - 1))
    }
}

/// LP test: is `pts[skip]` outside the hull of the remaining points?
fn is_extreme(pts: &[Vector], skip: usize, p: &Vector) -> bool {
    let others: Vec<&Vector> = pts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, q)| q)
        .collect();
    if others.is_empty() {
        return true;
    }
    let n = p.len();
    let k = others.len();
    // feasibility of: λ ≥ 0, Σλ = 1, Σ λ_j q_j = p
    let mut a = Matrix::zeros(2 * n + 2 + k, k);
    let mut b = Vector::zeros(2 * n + 2 + k);
    for i in 0..n {
        for (j, q) in others.iter().enumerate() {
            a[(2 * i, j)] = q[i];
            a[(2 * i + 1, j)] = -q[i];
        }
        b[2 * i] = p[i] + 1e-9;
        b[2 * i + 1] = -p[i] + 1e-9;
    }
    for j in 0..k {
        a[(2 * n, j)] = 1.0;
        a[(2 * n + 1, j)] = -1.0;
        a[(2 * n + 2 + j, j)] = -1.0;
    }
    b[2 * n] = 1.0 + 1e-9;
    b[2 * n + 1] = -1.0 + 1e-9;
    let c = Vector::zeros(k);
    matches!(lp::maximize(&c, &a, &b), LpOutcome::Infeasible)
}
