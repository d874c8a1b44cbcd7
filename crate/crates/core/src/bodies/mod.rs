//! Convex bodies described by their support functions.
//!
//! Every variant evaluates `h(K, x) = max{⟨x, y⟩ : y ∈ K}` in closed form,
//! extended positively homogeneously to all of `R^n`. Linear images and
//! Minkowski combinations defer to their constituents, so they are exact for
//! every base variant.

mod spec;
mod star;

pub use spec::{BodySpec, PartSpec, RotationSpec, TermSpec};
pub use star::{dual_mixed_volume_minus1, verify_lemma2, Lemma2Check, StarBody};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::sync::Arc;

use crate::harmonics::HarmonicExpansion;
use crate::rotation::{active_det, embed_rows};
use crate::{Dim, Error, Mat3, Result, Rotation, Vec3};

/// Slack allowed in `h(u + v) ≤ h(u) + h(v)`, relative to `max(1, |h(u)| + |h(v)|)`.
pub const SUBLINEARITY_SLACK: f64 = 1e-10;

const SINGULAR_DET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    /// Convex hull of finitely many points.
    Polytope {
        dim: Dim,
        vertices: Vec<Vec3>,
    },
    Ball {
        dim: Dim,
        center: Vec3,
        radius: f64,
    },
    /// `h(u) = √(uᵀ M u)` for a symmetric positive definite `M`.
    Ellipsoid {
        dim: Dim,
        shape: Mat3,
    },
    Segment {
        dim: Dim,
        endpoints: [Vec3; 2],
    },
    /// `h = c + Σ a_{mj} Y_{mj}`; only constructed after a convexity check.
    Harmonic(HarmonicBody),
    /// `Σ λ_k θ_k K_k`, `λ_k ≥ 0`.
    Minkowski {
        dim: Dim,
        parts: Vec<Summand>,
    },
    /// `A K` for invertible `A`.
    LinearImage {
        matrix: Mat3,
        base: Arc<ConvexBody>,
    },
    /// A planar body placed in the `x₁x₂`-plane of space.
    Embedded {
        base: Arc<ConvexBody>,
    },
    /// Orthogonal projection of a spatial body onto the plane spanned by
    /// two coordinate axes, as a planar body.
    Shadow {
        axes: [usize; 2],
        base: Arc<ConvexBody>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicBody {
    constant: f64,
    terms: HarmonicExpansion,
}

impl HarmonicBody {
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &HarmonicExpansion {
        &self.terms
    }

    /// The full expansion of `h`, with `c` folded into the order-0 coefficient.
    pub fn expansion(&self) -> HarmonicExpansion {
        let mut e = self.terms.clone();
        let idx = crate::HarmonicIndex { m: 0, j: 1 };
        let c0 = self.constant * e.dim().sphere_measure().sqrt();
        e.set(idx, e.get(idx) + c0).expect("order-0 slot exists");
        e
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summand {
    pub weight: f64,
    pub rotation: Rotation,
    pub body: Arc<ConvexBody>,
}

impl ConvexBody {
    pub fn polytope(dim: Dim, vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("polytope needs at least one vertex".into()));
        }
        for v in &vertices {
            check_point(dim, v)?;
        }
        Ok(ConvexBody::Polytope { dim, vertices })
    }

    /// Polytope from coordinate lists; the dimension is the common length.
    pub fn polytope_from_points(points: &[Vec<f64>]) -> Result<Self> {
        let first =
            points.first().ok_or_else(|| Error::InvalidArgument("polytope needs at least one vertex".into()))?;
        let dim = Dim::new(first.len())?;
        let vertices = points.iter().map(|p| point(dim, p)).collect::<Result<_>>()?;
        ConvexBody::polytope(dim, vertices)
    }

    pub fn ball(dim: Dim, center: Vec3, radius: f64) -> Result<Self> {
        check_point(dim, &center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexBody::Ball { dim, center, radius })
    }

    pub fn unit_ball(dim: Dim) -> Self {
        ConvexBody::Ball { dim, center: Vec3::zeros(), radius: 1.0 }
    }

    /// Ellipsoid with support `√(uᵀMu)`, i.e. `{x : xᵀ M⁻¹ x ≤ 1}`.
    pub fn ellipsoid(dim: Dim, shape: Mat3) -> Result<Self> {
        let shape = active_block(dim, &shape);
        if (shape - shape.transpose()).abs().max() > 1e-12 * shape.abs().max().max(1.0) {
            return Err(Error::InvalidArgument("ellipsoid shape matrix is not symmetric".into()));
        }
        if !positive_definite(dim, &shape) {
            return Err(Error::InvalidArgument("ellipsoid shape matrix is not positive definite".into()));
        }
        Ok(ConvexBody::Ellipsoid { dim, shape })
    }

    pub fn ellipsoid_from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = Dim::new(rows.len())?;
        ConvexBody::ellipsoid(dim, embed_rows(dim, rows)?)
    }

    pub fn segment(dim: Dim, a: Vec3, b: Vec3) -> Result<Self> {
        check_point(dim, &a)?;
        check_point(dim, &b)?;
        Ok(ConvexBody::Segment { dim, endpoints: [a, b] })
    }

    /// `h = c + Σ a_{mj} Y_{mj}`, rejected unless sublinear on the check grid.
    pub fn harmonic(constant: f64, terms: HarmonicExpansion) -> Result<Self> {
        if !constant.is_finite() {
            return Err(Error::InvalidArgument("harmonic body constant must be finite".into()));
        }
        let body = ConvexBody::Harmonic(HarmonicBody { constant, terms });
        body.check_sublinear()?;
        Ok(body)
    }

    /// `c + Y` with `c` the smallest of `{1, 2, 4, …, 64} · max|Y|` that yields a
    /// convex body.
    pub fn harmonic_with_minimal_constant(terms: HarmonicExpansion) -> Result<Self> {
        let dim = terms.dim();
        let grid = crate::sphere_quadrature::SphereQuadrature::new(dim, 4 * terms.max_order() + 64);
        let peak = grid.nodes().iter().map(|u| terms.evaluate(u).abs()).fold(0.0, f64::max);
        let mut last_err = Error::InvalidArgument("harmonic terms are all zero".into());
        if peak == 0.0 {
            return ConvexBody::harmonic(1.0, terms);
        }
        for factor in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            match ConvexBody::harmonic(factor * peak, terms.clone()) {
                Ok(body) => return Ok(body),
                Err(e) => last_err = e,
            }
        }
        Err(last_err)
    }

    pub fn minkowski(dim: Dim, parts: Vec<Summand>) -> Result<Self> {
        for (k, p) in parts.iter().enumerate() {
            if !(p.weight >= 0.0 && p.weight.is_finite()) {
                return Err(Error::InvalidArgument(format!("part {k} has weight {}", p.weight)));
            }
            if p.body.dim() != dim || p.rotation.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim.get(), found: p.body.dim().get() });
            }
        }
        Ok(ConvexBody::Minkowski { dim, parts })
    }

    /// `A K` for an invertible `A` (embedded as `diag(A, 1)` in the plane).
    pub fn linear_image(matrix: Mat3, base: ConvexBody) -> Result<Self> {
        let dim = base.dim();
        let matrix = embedded_matrix(dim, &matrix)?;
        let det = active_det(dim, &matrix);
        if !(det.abs() > SINGULAR_DET) {
            return Err(Error::SingularMatrix { det });
        }
        Ok(ConvexBody::LinearImage { matrix, base: Arc::new(base) })
    }

    pub fn dim(&self) -> Dim {
        match self {
            ConvexBody::Polytope { dim, .. }
            | ConvexBody::Ball { dim, .. }
            | ConvexBody::Ellipsoid { dim, .. }
            | ConvexBody::Segment { dim, .. }
            | ConvexBody::Minkowski { dim, .. } => *dim,
            ConvexBody::Harmonic(h) => h.terms.dim(),
            ConvexBody::LinearImage { base, .. } => base.dim(),
            ConvexBody::Embedded { .. } => Dim::Three,
            ConvexBody::Shadow { .. } => Dim::Two,
        }
    }

    /// `h(K, x)`, positively homogeneous of degree 1 in `x`.
    pub fn support(&self, x: &Vec3) -> f64 {
        match self {
            ConvexBody::Polytope { vertices, .. } => {
                vertices.iter().map(|v| v.dot(x)).fold(f64::NEG_INFINITY, f64::max)
            }
            ConvexBody::Ball { center, radius, .. } => radius * x.norm() + center.dot(x),
            ConvexBody::Ellipsoid { shape, .. } => x.dot(&(shape * x)).max(0.0).sqrt(),
            ConvexBody::Segment { endpoints: [a, b], .. } => a.dot(x).max(b.dot(x)),
            ConvexBody::Harmonic(h) => {
                let r = x.norm();
                if r == 0.0 {
                    0.0
                } else {
                    r * (h.constant + h.terms.evaluate(&(x / r)))
                }
            }
            ConvexBody::Minkowski { parts, .. } => {
                parts.iter().map(|p| p.weight * p.body.support(&p.rotation.apply_inverse(x))).sum()
            }
            ConvexBody::LinearImage { matrix, base } => base.support(&matrix.tr_mul(x)),
            ConvexBody::Embedded { base } => base.support(&Vec3::new(x.x, x.y, 0.0)),
            ConvexBody::Shadow { axes: [i, j], base } => {
                let mut y = Vec3::zeros();
                y[*i] = x.x;
                y[*j] = x.y;
                base.support(&y)
            }
        }
    }

    /// `h(AK, u) = h(K, Aᵀu)`.
    pub fn linear_image_support(&self, matrix: &Mat3, u: &Vec3) -> Result<f64> {
        let matrix = embedded_matrix(self.dim(), matrix)?;
        let det = active_det(self.dim(), &matrix);
        if !(det.abs() > SINGULAR_DET) {
            return Err(Error::SingularMatrix { det });
        }
        Ok(self.support(&matrix.tr_mul(u)))
    }

    pub fn rotated(&self, rotation: &Rotation) -> Self {
        ConvexBody::Minkowski {
            dim: self.dim(),
            parts: vec![Summand { weight: 1.0, rotation: *rotation, body: Arc::new(self.clone()) }],
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        ConvexBody::minkowski(
            self.dim(),
            vec![Summand { weight: factor, rotation: Rotation::identity(self.dim()), body: Arc::new(self.clone()) }],
        )
    }

    /// `K + t`.
    pub fn translated(&self, t: &Vec3) -> Result<Self> {
        let dim = self.dim();
        let id = Rotation::identity(dim);
        let point = ConvexBody::polytope(dim, vec![*t])?;
        ConvexBody::minkowski(
            dim,
            vec![
                Summand { weight: 1.0, rotation: id, body: Arc::new(self.clone()) },
                Summand { weight: 1.0, rotation: id, body: Arc::new(point) },
            ],
        )
    }

    /// `K + L`.
    pub fn plus(&self, other: &ConvexBody) -> Result<Self> {
        let id = Rotation::identity(self.dim());
        ConvexBody::minkowski(
            self.dim(),
            vec![
                Summand { weight: 1.0, rotation: id, body: Arc::new(self.clone()) },
                Summand { weight: 1.0, rotation: id, body: Arc::new(other.clone()) },
            ],
        )
    }

    /// Largest value of `h(u + v) − h(u) − h(v)` (scaled by the slack
    /// normalizer) over the fixed check set of direction pairs, with the
    /// offending pair.
    pub fn sublinearity_defect(&self) -> (f64, Vec3, Vec3) {
        let mut worst = (f64::NEG_INFINITY, Vec3::zeros(), Vec3::zeros());
        for (u, v) in sublinearity_pairs(self.dim()) {
            let (hu, hv) = (self.support(&u), self.support(&v));
            let excess = (self.support(&(u + v)) - hu - hv) / (hu.abs() + hv.abs()).max(1.0);
            if excess > worst.0 {
                worst = (excess, u, v);
            }
        }
        worst
    }

    pub fn check_sublinear(&self) -> Result<()> {
        let (excess, u, v) = self.sublinearity_defect();
        if excess > SUBLINEARITY_SLACK || excess.is_nan() {
            return Err(Error::NotSublinear { violation: excess, u: u.into(), v: v.into() });
        }
        Ok(())
    }

    /// The same point set inside the `x₁x₂`-plane of space.
    pub fn embed_2d_in_3d(&self) -> Result<Self> {
        if self.dim() != Dim::Two {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim().get() });
        }
        Ok(match self {
            ConvexBody::Polytope { vertices, .. } => {
                ConvexBody::Polytope { dim: Dim::Three, vertices: vertices.clone() }
            }
            ConvexBody::Segment { endpoints, .. } => ConvexBody::Segment { dim: Dim::Three, endpoints: *endpoints },
            other => ConvexBody::Embedded { base: Arc::new(other.clone()) },
        })
    }

    /// Shadow on the plane of coordinate axes `i < j` (0-based), as a planar body.
    pub fn project_to_plane(&self, axes: [usize; 2]) -> Result<Self> {
        if self.dim() != Dim::Three {
            return Err(Error::DimensionMismatch { expected: 3, found: self.dim().get() });
        }
        let [i, j] = axes;
        if !(i < j && j < 3) {
            return Err(Error::InvalidArgument(format!("invalid coordinate plane {axes:?}")));
        }
        let flat = |p: &Vec3| Vec3::new(p[i], p[j], 0.0);
        Ok(match self {
            ConvexBody::Polytope { vertices, .. } => ConvexBody::Polytope {
                dim: Dim::Two,
                vertices: convex_hull_2d(&vertices.iter().map(flat).collect::<Vec<_>>()),
            },
            ConvexBody::Segment { endpoints: [a, b], .. } => {
                ConvexBody::Segment { dim: Dim::Two, endpoints: [flat(a), flat(b)] }
            }
            ConvexBody::Embedded { base } if axes == [0, 1] => (**base).clone(),
            other => ConvexBody::Shadow { axes, base: Arc::new(other.clone()) },
        })
    }

    /// Number of parts, 1 for atoms.
    pub fn part_count(&self) -> usize {
        match self {
            ConvexBody::Minkowski { parts, .. } => parts.len(),
            _ => 1,
        }
    }
}

/// Direction pairs used by the sublinearity check: neighbours at several
/// separations on a fixed grid plus seeded random pairs (over 10⁴ in total).
fn sublinearity_pairs(dim: Dim) -> Vec<(Vec3, Vec3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut pairs = Vec::new();
    match dim {
        Dim::Two => {
            let n = 2048;
            let dir = |t: f64| Vec3::new(t.cos(), t.sin(), 0.0);
            for i in 0..n {
                let t = TAU * i as f64 / n as f64;
                for step in [1usize, 2, 4, 16, 64, 256, 1024] {
                    pairs.push((dir(t), dir(t + TAU * step as f64 / n as f64)));
                }
            }
            for _ in 0..2000 {
                pairs.push((dir(rng.random_range(0.0..TAU)), dir(rng.random_range(0.0..TAU))));
            }
        }
        Dim::Three => {
            // Fibonacci-sphere base points, each paired with nearby and far
            // directions along a random tangent.
            let n = 2000;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            for i in 0..n {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let u = Vec3::new(r * (golden * i as f64).cos(), r * (golden * i as f64).sin(), z);
                let helper = Rotation::random(Dim::Three, &mut rng).apply(&Vec3::x());
                let tangent = (helper - u * u.dot(&helper)).normalize();
                for angle in [3e-3, 2e-2, 0.1, 0.5, 1.5, 3.0] {
                    let v = u * f64::cos(angle) + tangent * f64::sin(angle);
                    pairs.push((u, v));
                }
            }
            for _ in 0..2000 {
                let u = Rotation::random(dim, &mut rng).apply(&Vec3::z());
                let v = Rotation::random(dim, &mut rng).apply(&Vec3::z());
                pairs.push((u, v));
            }
        }
    }
    pairs
}

fn point(dim: Dim, coords: &[f64]) -> Result<Vec3> {
    if coords.len() != dim.get() {
        return Err(Error::DimensionMismatch { expected: dim.get(), found: coords.len() });
    }
    let mut p = Vec3::zeros();
    for (slot, &x) in p.iter_mut().zip(coords) {
        if !x.is_finite() {
            return Err(Error::InvalidArgument("coordinates must be finite".into()));
        }
        *slot = x;
    }
    Ok(p)
}

pub(crate) fn point_from_slice(dim: Dim, coords: &[f64]) -> Result<Vec3> {
    point(dim, coords)
}

pub(crate) fn coords(dim: Dim, p: &Vec3) -> Vec<f64> {
    p.iter().take(dim.get()).copied().collect()
}

fn check_point(dim: Dim, p: &Vec3) -> Result<()> {
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("coordinates must be finite".into()));
    }
    if dim == Dim::Two && p.z != 0.0 {
        return Err(Error::InvalidArgument("planar point has a nonzero third coordinate".into()));
    }
    Ok(())
}

/// Zeroes everything outside the active block.
fn active_block(dim: Dim, m: &Mat3) -> Mat3 {
    let mut out = *m;
    if dim == Dim::Two {
        out[(0, 2)] = 0.0;
        out[(1, 2)] = 0.0;
        out[(2, 0)] = 0.0;
        out[(2, 1)] = 0.0;
        out[(2, 2)] = 0.0;
    }
    out
}

/// Checks the planar embedding `diag(A, 1)` and finiteness.
pub(crate) fn embedded_matrix(dim: Dim, m: &Mat3) -> Result<Mat3> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix entries must be finite".into()));
    }
    if dim == Dim::Two {
        let off = m[(0, 2)].abs() + m[(1, 2)].abs() + m[(2, 0)].abs() + m[(2, 1)].abs() + (m[(2, 2)] - 1.0).abs();
        if off != 0.0 {
            return Err(Error::InvalidArgument("planar matrix must be embedded as diag(A, 1)".into()));
        }
    }
    Ok(*m)
}

fn positive_definite(dim: Dim, m: &Mat3) -> bool {
    match dim {
        Dim::Two => m[(0, 0)] > 0.0 && m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] > 0.0,
        Dim::Three => m.cholesky().is_some(),
    }
}

/// Vertices of the convex hull of planar points, counter-clockwise, without
/// collinear points.
pub fn convex_hull_2d(points: &[Vec3]) -> Vec<Vec3> {
    let mut pts: Vec<Vec3> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &Vec3, a: &Vec3, b: &Vec3| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Vec3> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec3>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::HarmonicExpansion;

    fn u(phi: f64) -> Vec3 {
        Vec3::new(phi.cos(), phi.sin(), 0.0)
    }

    #[test]
    fn segment_and_ball_support() {
        let s = ConvexBody::segment(Dim::Two, Vec3::new(-1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
        for k in 0..50 {
            let phi = 0.13 * k as f64;
            assert!((s.support(&u(phi)) - phi.cos().abs()).abs() < 1e-15);
        }
        let c = Vec3::new(0.3, -0.2, 0.0);
        let b = ConvexBody::ball(Dim::Two, c, 2.0).unwrap();
        assert!((b.support(&u(0.4)) - (2.0 + c.dot(&u(0.4)))).abs() < 1e-15);
    }

    #[test]
    fn minkowski_sum_adds_supports() {
        let k = ConvexBody::polytope_from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let l = ConvexBody::ellipsoid_from_rows(&[vec![2.0, 0.3], vec![0.3, 0.5]]).unwrap();
        let sum = k.plus(&l).unwrap();
        for i in 0..40 {
            let x = u(0.17 * i as f64);
            assert!((sum.support(&x) - k.support(&x) - l.support(&x)).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_image_examples() {
        let disc = ConvexBody::unit_ball(Dim::Two);
        let lambda = 0.4;
        let a = Mat3::new(1.0, 0.0, 0.0, 0.0, lambda, 0.0, 0.0, 0.0, 1.0);
        for i in 0..20 {
            let x = u(0.31 * i as f64);
            let expected = (x.x * x.x + lambda * lambda * x.y * x.y).sqrt();
            assert!((disc.linear_image_support(&a, &x).unwrap() - expected).abs() < 1e-15);
            assert_eq!(disc.linear_image_support(&Mat3::identity(), &x).unwrap(), disc.support(&x));
        }
        let singular = Mat3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(disc.linear_image_support(&singular, &u(0.0)), Err(Error::SingularMatrix { .. })));
        assert!(ConvexBody::linear_image(singular, disc.clone()).is_err());
        // rotation: Aᵀ = A⁻¹
        let t = ConvexBody::segment(Dim::Two, Vec3::zeros(), Vec3::new(1.0, 0.5, 0.0)).unwrap();
        let r = Rotation::planar(0.7);
        for i in 0..20 {
            let x = u(0.29 * i as f64);
            let via_image = t.linear_image_support(r.matrix(), &x).unwrap();
            assert!((via_image - t.rotated(&r).support(&x)).abs() < 1e-15);
        }
    }

    #[test]
    fn constructors_validate() {
        assert!(ConvexBody::ball(Dim::Two, Vec3::zeros(), 0.0).is_err());
        assert!(ConvexBody::polytope(Dim::Two, vec![]).is_err());
        assert!(ConvexBody::polytope(Dim::Two, vec![Vec3::new(0.0, 0.0, 1.0)]).is_err());
        assert!(ConvexBody::ellipsoid_from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(ConvexBody::ellipsoid_from_rows(&[vec![1.0, 0.2], vec![0.0, 1.0]]).is_err());
        assert!(ConvexBody::polytope_from_points(&[vec![0.0, 0.0], vec![1.0]]).is_err());
    }

    #[test]
    fn harmonic_body_requires_convexity() {
        // 1 + a cos 3φ is convex iff 1 − 8a ≥ 0.
        let terms =
            |a: f64| HarmonicExpansion::from_terms(Dim::Two, 3, [(3, 1, a * std::f64::consts::PI.sqrt())]).unwrap();
        assert!(ConvexBody::harmonic(1.0, terms(0.1)).is_ok());
        assert!(matches!(ConvexBody::harmonic(1.0, terms(0.2)), Err(Error::NotSublinear { .. })));
        let b = ConvexBody::harmonic_with_minimal_constant(terms(0.2)).unwrap();
        match b {
            ConvexBody::Harmonic(h) => {
                // peak is 0.2, so c ∈ {0.2, 0.4, 0.8, 1.6}; 1.6 is the first convex one
                assert!((h.constant() - 1.6).abs() < 1e-9, "{}", h.constant());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let pts = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.5, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(0.2, 0.3, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let h = convex_hull_2d(&pts);
        assert_eq!(h.len(), 4);
        assert_eq!(h[0], Vec3::new(0.0, 0.0, 0.0));
        assert_eq!(h[1], Vec3::new(1.0, 0.0, 0.0));
    }
}
