//! Star bodies with positive radial functions, the dual mixed volume
//! `Ṽ₋₁` and the change of variables for homogeneous integrands.

use super::{convex_hull_2d, embedded_matrix, ConvexBody, SINGULAR_DET};
use crate::harmonics::{eval_harmonic, HarmonicIndex};
use crate::rotation::active_det;
use crate::sphere_quadrature::SphereQuadrature;
use crate::{Dim, Error, Mat3, Result, Vec3};

/// Star body with the origin in its interior; `radial` is homogeneous of
/// degree −1.
#[derive(Debug, Clone, PartialEq)]
pub enum StarBody {
    Ball {
        dim: Dim,
        center: Vec3,
        radius: f64,
    },
    /// `{x : xᵀ M⁻¹ x ≤ 1}`, stored through `M⁻¹`.
    Ellipsoid {
        dim: Dim,
        inverse_shape: Mat3,
    },
    /// Counter-clockwise convex polygon; each edge as (outer normal, offset).
    Polygon {
        vertices: Vec<Vec3>,
        edges: Vec<(Vec3, f64)>,
    },
    LinearImage {
        matrix: Mat3,
        inverse: Mat3,
        base: Box<StarBody>,
    },
}

impl StarBody {
    /// Star body of a convex body containing the origin in its interior.
    pub fn from_convex(body: &ConvexBody) -> Result<Self> {
        match body {
            ConvexBody::Ball { dim, center, radius } => {
                if center.norm() >= *radius {
                    return Err(Error::Precondition("origin is not interior to the ball".into()));
                }
                Ok(StarBody::Ball { dim: *dim, center: *center, radius: *radius })
            }
            ConvexBody::Ellipsoid { dim, shape } => {
                let inverse_shape = match dim {
                    Dim::Two => {
                        let det = shape[(0, 0)] * shape[(1, 1)] - shape[(0, 1)] * shape[(1, 0)];
                        Mat3::new(
                            shape[(1, 1)] / det,
                            -shape[(0, 1)] / det,
                            0.0,
                            -shape[(1, 0)] / det,
                            shape[(0, 0)] / det,
                            0.0,
                            0.0,
                            0.0,
                            0.0,
                        )
                    }
                    Dim::Three => shape.try_inverse().ok_or(Error::SingularMatrix { det: shape.determinant() })?,
                };
                Ok(StarBody::Ellipsoid { dim: *dim, inverse_shape })
            }
            ConvexBody::Polytope { dim: Dim::Two, vertices } => StarBody::polygon(vertices),
            ConvexBody::LinearImage { matrix, base } => StarBody::from_convex(base)?.linear_image(matrix),
            other => Err(Error::InvalidArgument(format!(
                "no radial function available for this body variant (dimension {})",
                other.dim()
            ))),
        }
    }

    pub fn polygon(points: &[Vec3]) -> Result<Self> {
        if points.iter().any(|p| p.z != 0.0) {
            return Err(Error::InvalidArgument("polygon vertices must be planar".into()));
        }
        let vertices = convex_hull_2d(points);
        if vertices.len() < 3 {
            return Err(Error::Precondition("polygon is degenerate".into()));
        }
        let mut edges = Vec::with_capacity(vertices.len());
        for (k, a) in vertices.iter().enumerate() {
            let b = vertices[(k + 1) % vertices.len()];
            let d = b - a;
            let normal = Vec3::new(d.y, -d.x, 0.0).normalize();
            let offset = normal.dot(a);
            if !(offset > 0.0) {
                return Err(Error::Precondition("origin is not interior to the polygon".into()));
            }
            edges.push((normal, offset));
        }
        Ok(StarBody::Polygon { vertices, edges })
    }

    /// `A K`.
    pub fn linear_image(self, matrix: &Mat3) -> Result<Self> {
        let dim = self.dim();
        let matrix = embedded_matrix(dim, matrix)?;
        let det = active_det(dim, &matrix);
        if !(det.abs() > SINGULAR_DET) {
            return Err(Error::SingularMatrix { det });
        }
        let inverse = matrix.try_inverse().ok_or(Error::SingularMatrix { det })?;
        Ok(StarBody::LinearImage { matrix, inverse, base: Box::new(self) })
    }

    pub fn dim(&self) -> Dim {
        match self {
            StarBody::Ball { dim, .. } | StarBody::Ellipsoid { dim, .. } => *dim,
            StarBody::Polygon { .. } => Dim::Two,
            StarBody::LinearImage { base, .. } => base.dim(),
        }
    }

    /// `ρ(K, x) = max{λ ≥ 0 : λx ∈ K}`.
    pub fn radial(&self, x: &Vec3) -> f64 {
        match self {
            StarBody::Ball { center, radius, .. } => {
                let r = x.norm();
                let u = x / r;
                let cu = center.dot(&u);
                (cu + (cu * cu - center.norm_squared() + radius * radius).sqrt()) / r
            }
            StarBody::Ellipsoid { inverse_shape, .. } => 1.0 / x.dot(&(inverse_shape * x)).sqrt(),
            StarBody::Polygon { edges, .. } => edges
                .iter()
                .filter_map(|(n, d)| {
                    let s = n.dot(x);
                    (s > 0.0).then(|| d / s)
                })
                .fold(f64::INFINITY, f64::min),
            StarBody::LinearImage { inverse, base, .. } => base.radial(&(inverse * x)),
        }
    }
}

/// `Ṽ₋₁(K, L) = (1/n) ∫ ρ_K^{n+1} ρ_L^{−1} dσ`.
pub fn dual_mixed_volume_minus1(k: &StarBody, l: &StarBody, q: &SphereQuadrature) -> Result<f64> {
    let dim = q.dim();
    if k.dim() != dim || l.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim.get(), found: k.dim().get() });
    }
    let n = dim.get() as i32;
    let mut values = Vec::with_capacity(q.len());
    for u in q.nodes() {
        let (rk, rl) = (k.radial(u), l.radial(u));
        for r in [rk, rl] {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::NonPositiveRadial { value: r, direction: (*u).into() });
            }
        }
        values.push(rk.powi(n + 1) / rl);
    }
    Ok(q.integrate_samples(&values) / n as f64)
}

/// Both sides of the change of variables for `h(K, ·)` (degree 1) against
/// `Y̌_{mj}(x) = ‖x‖^{−(n+1)} Y_{mj}(x/‖x‖)` (degree −(n+1)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Check {
    /// `∫ h(K, Av) Y̌(v) dσ(v)`.
    pub lhs: f64,
    /// `|det A|⁻¹ ∫ h(K, v) Y̌(A⁻¹v) dσ(v)`.
    pub rhs: f64,
}

impl Lemma2Check {
    pub fn abs_error(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    /// `|lhs − rhs| / max(|lhs|, |rhs|)`, or 0 when both vanish.
    pub fn rel_error(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.abs_error() / scale
        }
    }
}

pub fn verify_lemma2(
    body: &ConvexBody,
    m: usize,
    j: usize,
    matrix: &Mat3,
    q: &SphereQuadrature,
) -> Result<Lemma2Check> {
    let dim = body.dim();
    if q.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim.get(), found: q.dim().get() });
    }
    let idx = HarmonicIndex::new(dim, m, j)?;
    let a = embedded_matrix(dim, matrix)?;
    let det = active_det(dim, &a);
    if !(det.abs() > SINGULAR_DET) {
        return Err(Error::SingularMatrix { det });
    }
    let inv = a.try_inverse().ok_or(Error::SingularMatrix { det })?;
    let power = dim.get() as i32 + 1;
    let y_check = |x: &Vec3| {
        let r = x.norm();
        eval_harmonic(dim, idx, &(x / r)).expect("index validated") / r.powi(power)
    };
    let lhs = q.integrate(|v| body.support(&(a * v)) * y_check(v));
    let rhs = q.integrate(|v| body.support(v) * y_check(&(inv * v))) / det.abs();
    Ok(Lemma2Check { lhs, rhs })
}
