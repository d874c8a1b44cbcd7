//! Harmonic projections of support functions and the quantities read off
//! them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::ConvexBody;
use crate::harmonics::{basis_len, dimension_count, fill_basis_values, order_offset, order_values, HarmonicExpansion};
use crate::io::fmt_f64;
use crate::sphere_quadrature::{gauss_legendre, SphereQuadrature};
use crate::{compensated_sum, Dim, Error, Result, Rotation, Vec3};

/// Extra polynomial degree demanded of a sphere rule beyond `2m`.
pub const DEGREE_HEADROOM: usize = 8;
pub const DEFAULT_TAU: f64 = 1e-8;
pub const DEFAULT_M_MAX: usize = 12;

pub fn required_degree(m: usize) -> usize {
    2 * m + DEGREE_HEADROOM
}

fn check_rule(body: &ConvexBody, m: usize, q: &SphereQuadrature) -> Result<()> {
    if q.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim().get(), found: q.dim().get() });
    }
    if q.exact_degree() < required_degree(m) {
        return Err(Error::QuadratureTooCoarse { order: m, required: required_degree(m), available: q.exact_degree() });
    }
    Ok(())
}

/// `(a_{m1}, …, a_{mN})` with `a_{mj} = (h_K, Y_{mj})`.
pub fn project(body: &ConvexBody, m: usize, q: &SphereQuadrature) -> Result<Vec<f64>> {
    check_rule(body, m, q)?;
    let h = q.sample(|u| body.support(u));
    let dim = q.dim();
    let n = dimension_count(dim, m);
    let per_node: Vec<Vec<f64>> = q.nodes().par_iter().map(|u| order_values(dim, m, u)).collect();
    Ok((0..n)
        .map(|j| compensated_sum(q.weights().iter().zip(&h).zip(&per_node).map(|((w, h), y)| w * h * y[j])))
        .collect())
}

/// Weighted inner products of node values with every basis function up to
/// `max_order`. Chunks are reduced in a fixed order, so results do not
/// depend on thread scheduling.
pub(crate) fn inner_products(dim: Dim, max_order: usize, q: &SphereQuadrature, values: &[f64]) -> Vec<f64> {
    const CHUNK: usize = 2048;
    let len = basis_len(dim, max_order);
    let nodes = q.nodes();
    let weights = q.weights();
    let partials: Vec<Vec<f64>> = (0..nodes.len().div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; len];
            let mut comp = vec![0.0; len];
            let mut y = vec![0.0; len];
            for k in c * CHUNK..((c + 1) * CHUNK).min(nodes.len()) {
                fill_basis_values(dim, max_order, &nodes[k], &mut y);
                let wv = weights[k] * values[k];
                for ((a, e), yi) in acc.iter_mut().zip(comp.iter_mut()).zip(&y) {
                    let x = wv * yi;
                    let t = *a + x;
                    *e += if a.abs() >= x.abs() { (*a - t) + x } else { (x - t) + *a };
                    *a = t;
                }
            }
            acc.iter().zip(&comp).map(|(a, e)| a + e).collect()
        })
        .collect();
    (0..len).map(|i| compensated_sum(partials.iter().map(|p| p[i]))).collect()
}

/// `π_0 h_K, …, π_{m_max} h_K` as one expansion; `h_K` is sampled once.
pub fn expand(body: &ConvexBody, m_max: usize, q: &SphereQuadrature) -> Result<HarmonicExpansion> {
    check_rule(body, m_max, q)?;
    let h = q.sample(|u| body.support(u));
    expansion_from_samples(q, m_max, &h)
}

pub(crate) fn expansion_from_samples(q: &SphereQuadrature, m_max: usize, values: &[f64]) -> Result<HarmonicExpansion> {
    let dim = q.dim();
    let flat = inner_products(dim, m_max, q, values);
    let blocks = (0..=m_max)
        .map(|m| {
            let start = order_offset(dim, m);
            flat[start..start + dimension_count(dim, m)].to_vec()
        })
        .collect();
    HarmonicExpansion::from_blocks(dim, blocks)
}

/// `b(K) = (2/ω_n) ∫ h_K dσ`.
pub fn mean_width(body: &ConvexBody, q: &SphereQuadrature) -> f64 {
    2.0 / q.dim().sphere_measure() * q.integrate(|u| body.support(u))
}

/// `s(K) = (n/ω_n) ∫ h_K(u) u dσ(u)`.
pub fn steiner_point(body: &ConvexBody, q: &SphereQuadrature) -> Vec3 {
    let h = q.sample(|u| body.support(u));
    let scale = q.dim().get() as f64 / q.dim().sphere_measure();
    let mut s = Vec3::zeros();
    for axis in 0..q.dim().get() {
        s[axis] = scale * compensated_sum(q.weights().iter().zip(&h).zip(q.nodes()).map(|((w, h), u)| w * h * u[axis]));
    }
    s
}

/// Closed-form Steiner point and mean width where one is known: balls,
/// segments, and planar polytopes (vertices weighted by exterior angle over
/// `2π`; width = perimeter / `π`). `None` otherwise.
pub fn closed_form_steiner_and_width(body: &ConvexBody) -> Option<(Vec3, f64)> {
    use std::f64::consts::{PI, TAU};
    let points: Vec<Vec3> = match body {
        ConvexBody::Ball { center, radius, .. } => return Some((*center, 2.0 * radius)),
        ConvexBody::Segment { dim: Dim::Three, endpoints } => {
            return Some(((endpoints[0] + endpoints[1]) / 2.0, (endpoints[1] - endpoints[0]).norm() / 2.0))
        }
        ConvexBody::Polytope { dim: Dim::Two, vertices } => vertices.clone(),
        ConvexBody::Segment { dim: Dim::Two, endpoints } => endpoints.to_vec(),
        _ => return None,
    };
    let hull = crate::bodies::convex_hull_2d(&points);
    let k = hull.len();
    if k == 1 {
        return Some((hull[0], 0.0));
    }
    let mut steiner = Vec3::zeros();
    let mut perimeter = 0.0;
    for i in 0..k {
        let prev = hull[(i + k - 1) % k];
        let next = hull[(i + 1) % k];
        let (a, b) = (hull[i] - prev, next - hull[i]);
        // A segment turns by π at both ends.
        let turn = if k == 2 { PI } else { (a.x * b.y - a.y * b.x).atan2(a.dot(&b)).rem_euclid(TAU) };
        steiner += hull[i] * (turn / TAU);
        perimeter += b.norm();
    }
    Some((steiner, perimeter / PI))
}

/// Per-order norms `‖π_m h_K‖₂` with the (central) universality verdicts
/// they imply at threshold `τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniversalityCertificate {
    pub body_id: String,
    pub dimension: Dim,
    pub m_max: usize,
    pub tau: f64,
    /// `norms[m] = ‖π_m h_K‖₂`.
    pub norms: Vec<f64>,
    pub verdict_universal: bool,
    pub verdict_centrally_universal: bool,
}

impl UniversalityCertificate {
    pub fn from_expansion(body_id: impl Into<String>, e: &HarmonicExpansion, tau: f64) -> Result<Self> {
        let norms = (0..=e.max_order()).map(|m| e.order_norm(m)).collect();
        UniversalityCertificate::from_norms(body_id, e.dim(), norms, tau)
    }

    /// `norms[m]` for `m = 0, …, m_max`.
    pub fn from_norms(body_id: impl Into<String>, dimension: Dim, norms: Vec<f64>, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidArgument(format!("threshold must be positive, got {tau}")));
        }
        if norms.is_empty() {
            return Err(Error::InvalidArgument("certificate needs at least the order-0 norm".into()));
        }
        Ok(UniversalityCertificate {
            body_id: body_id.into(),
            dimension,
            m_max: norms.len() - 1,
            tau,
            verdict_universal: norms.iter().all(|&x| x > tau),
            verdict_centrally_universal: norms.iter().step_by(2).all(|&x| x > tau),
            norms,
        })
    }

    /// Orders whose norm is at most `τ`.
    pub fn vanishing_orders(&self) -> Vec<usize> {
        (0..=self.m_max).filter(|&m| !(self.norms[m] > self.tau)).collect()
    }

    /// Whether every odd order other than 1 vanishes, the harmonic signature
    /// of an origin-symmetric body up to translation.
    pub fn odd_orders_vanish(&self) -> bool {
        (3..=self.m_max).step_by(2).all(|m| !(self.norms[m] > self.tau))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,norm\n");
        for (m, n) in self.norms.iter().enumerate() {
            out.push_str(&format!("{m},{}\n", fmt_f64(*n)));
        }
        out
    }
}

pub fn certify(body: &ConvexBody, m_max: usize, tau: f64, q: &SphereQuadrature) -> Result<UniversalityCertificate> {
    certify_named("body", body, m_max, tau, q)
}

pub fn certify_named(
    body_id: &str,
    body: &ConvexBody,
    m_max: usize,
    tau: f64,
    q: &SphereQuadrature,
) -> Result<UniversalityCertificate> {
    UniversalityCertificate::from_expansion(body_id, &expand(body, m_max, q)?, tau)
}

/// Eigenvalue `a_m` of the cosine transform `f ↦ ∫ |⟨·, v⟩| f(v) dσ(v)` on
/// degree-`m` harmonics; 0 for odd `m`.
///
/// The transform is integrated in a frame that puts the kink of `|⟨u, v⟩|`
/// on the boundary between two smooth pieces, each handled by a Gauss rule
/// of degree `q.exact_degree()`.
pub fn cosine_multiplier(dim: Dim, m: usize, q: &SphereQuadrature) -> Result<f64> {
    if q.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim.get(), found: q.dim().get() });
    }
    if m % 2 == 1 {
        return Ok(0.0);
    }
    if q.exact_degree() < m + 1 {
        return Err(Error::QuadratureTooCoarse { order: m, required: m + 1, available: q.exact_degree() });
    }
    let split = split_rule(dim, q.exact_degree() + 2);
    let probes = probe_directions(dim);
    let mut ty = Vec::new();
    let mut yy = Vec::new();
    for u in &probes {
        let frame = Rotation::aligning(dim, &pole(dim), u);
        let y = order_values(dim, m, u)[0];
        let t = compensated_sum(
            split.iter().map(|(v, w)| w * v[axis(dim)].abs() * order_values(dim, m, &frame.apply(v))[0]),
        );
        ty.push(t);
        yy.push(y);
    }
    let num: f64 = ty.iter().zip(&yy).map(|(t, y)| t * y).sum();
    let den: f64 = yy.iter().map(|y| y * y).sum();
    let a = num / den;
    let spread = ty.iter().zip(&yy).map(|(t, y)| (t - a * y).abs()).fold(0.0, f64::max);
    if spread > 1e-8 * a.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "cosine transform of order {m} is not a multiple of the harmonic (spread {spread:e})"
        )));
    }
    Ok(a)
}

fn pole(dim: Dim) -> Vec3 {
    match dim {
        Dim::Two => Vec3::x(),
        Dim::Three => Vec3::z(),
    }
}

fn axis(dim: Dim) -> usize {
    match dim {
        Dim::Two => 0,
        Dim::Three => 2,
    }
}

fn probe_directions(dim: Dim) -> Vec<Vec3> {
    match dim {
        Dim::Two => [0.1, 0.7, 1.9, 2.6, 4.0].iter().map(|t: &f64| Vec3::new(t.cos(), t.sin(), 0.0)).collect(),
        Dim::Three => [(0.3, 0.2), (1.1, 2.5), (2.0, 4.4), (0.7, 5.6), (2.6, 1.3)]
            .iter()
            .map(|&(th, ph): &(f64, f64)| Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()))
            .collect(),
    }
}

/// Rule on the sphere split along the great circle orthogonal to the pole.
fn split_rule(dim: Dim, degree: usize) -> Vec<(Vec3, f64)> {
    match dim {
        Dim::Two => {
            let (x, w) = gauss_legendre(degree + 16);
            let half = std::f64::consts::FRAC_PI_2;
            let mut out = Vec::with_capacity(2 * x.len());
            for centre in [0.0, std::f64::consts::PI] {
                for (xi, wi) in x.iter().zip(&w) {
                    let t = centre + half * xi;
                    out.push((Vec3::new(t.cos(), t.sin(), 0.0), half * wi));
                }
            }
            out
        }
        Dim::Three => {
            let q = SphereQuadrature::new(Dim::Three, degree);
            q.nodes().iter().copied().zip(q.weights().iter().copied()).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_polygon_quantities_match_quadrature() {
        let p = |x, y| Vec3::new(x, y, 0.0);
        let square = ConvexBody::polytope(Dim::Two, vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]).unwrap();
        let (s, b) = closed_form_steiner_and_width(&square).unwrap();
        assert!((s - p(0.5, 0.5)).norm() < 1e-15 && (b - 4.0 / PI).abs() < 1e-15);
        let q = SphereQuadrature::new(Dim::Two, 1 << 16);
        for body in [
            ConvexBody::polytope(Dim::Two, vec![p(0.0, 0.0), p(1.0, 0.0), p(0.5, 1.0), p(-0.2, 0.7)]).unwrap(),
            ConvexBody::segment(Dim::Two, p(-0.4, 0.1), p(0.9, 0.6)).unwrap(),
        ] {
            let (s, b) = closed_form_steiner_and_width(&body).unwrap();
            assert!((s - steiner_point(&body, &q)).norm() < 1e-8);
            assert!((b - mean_width(&body, &q)).abs() < 1e-8);
        }
        let q3 = SphereQuadrature::new(Dim::Three, 64);
        for body in [
            ConvexBody::ball(Dim::Three, Vec3::new(0.1, 0.2, -0.3), 0.7).unwrap(),
            ConvexBody::segment(Dim::Three, Vec3::new(0.1, 0.2, -0.3), Vec3::new(1.0, -0.5, 0.4)).unwrap(),
        ] {
            let (s, b) = closed_form_steiner_and_width(&body).unwrap();
            assert!((s - steiner_point(&body, &q3)).norm() < 1e-4, "{body:?}");
            assert!((b - mean_width(&body, &q3)).abs() < 1e-4, "{body:?}");
        }
    }

    #[test]
    fn ball_projections_vanish() {
        for dim in [Dim::Two, Dim::Three] {
            let q = SphereQuadrature::new(dim, 40);
            let b = ConvexBody::unit_ball(dim);
            for m in 1..=8 {
                assert!(project(&b, m, &q).unwrap().iter().all(|a| a.abs() < 1e-12));
            }
            assert!((mean_width(&b, &q) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_rule_is_rejected() {
        let q = SphereQuadrature::new(Dim::Two, 10);
        let b = ConvexBody::unit_ball(Dim::Two);
        assert!(matches!(project(&b, 5, &q), Err(Error::QuadratureTooCoarse { .. })));
    }

    #[test]
    fn multipliers_in_the_plane() {
        let q = SphereQuadrature::new(Dim::Two, 32);
        for m in (0..=12).step_by(2) {
            let expected = 4.0 * (-1f64).powi(m as i32 / 2 + 1) / ((m * m) as f64 - 1.0);
            let a = cosine_multiplier(Dim::Two, m, &q).unwrap();
            assert!((a - expected).abs() < 1e-12, "m={m}: {a} vs {expected}");
        }
        assert_eq!(cosine_multiplier(Dim::Two, 3, &q).unwrap(), 0.0);
    }

    #[test]
    fn multipliers_in_space() {
        // Funk–Hecke: a_m = 2π ∫ |t| P_m(t) dt; a_0 = 2π, a_2 = π/2.
        let q = SphereQuadrature::new(Dim::Three, 32);
        assert!((cosine_multiplier(Dim::Three, 0, &q).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((cosine_multiplier(Dim::Three, 2, &q).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((cosine_multiplier(Dim::Three, 4, &q).unwrap() + PI / 12.0).abs() < 1e-12);
    }

    #[test]
    fn certificate_verdicts() {
        let e =
            HarmonicExpansion::from_terms(Dim::Two, 3, [(0, 1, 1.0), (1, 1, 0.5), (2, 2, 0.3), (3, 1, 1e-12)]).unwrap();
        let c = UniversalityCertificate::from_expansion("x", &e, 1e-8).unwrap();
        assert!(!c.verdict_universal);
        assert!(c.verdict_centrally_universal);
        assert_eq!(c.vanishing_orders(), vec![3]);
        assert!(c.odd_orders_vanish());
        assert!(UniversalityCertificate::from_expansion("x", &e, 0.0).is_err());
    }
}
