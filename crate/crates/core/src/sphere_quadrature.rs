//! Deterministic product quadrature on `S^{n-1}` and on `SO(n)`.
//!
//! Sphere rules integrate every polynomial of degree `≤ exact_degree`
//! (restricted to the sphere) exactly:
//!
//! * `n = 2`: `M > exact_degree` equally spaced angles (even `M`).
//! * `n = 3`: Gauss–Legendre in `z = cos θ` on each hemisphere, times `M`
//!   equally spaced azimuths. Splitting at the equator keeps every kink of
//!   `|z|` on a panel boundary.
//!
//! Rotation rules carry the normalized Haar measure and are exact for all
//! products `t^m_{ij} t^{m'}_{kl}` with `m, m' ≤ exact_order`.

use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use crate::{compensated_sum, Dim, Result, Rotation, Vec3};

/// Weighted nodes on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    dim: Dim,
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
    exact_degree: usize,
}

impl SphereQuadrature {
    pub fn build(dimension: usize, exact_degree: usize) -> Result<Self> {
        Ok(Self::new(Dim::new(dimension)?, exact_degree))
    }

    pub fn new(dim: Dim, exact_degree: usize) -> Self {
        match dim {
            Dim::Two => {
                let count = even_at_least(exact_degree + 1);
                let w = TAU / count as f64;
                let nodes = (0..count)
                    .map(|k| {
                        let phi = TAU * k as f64 / count as f64;
                        Vec3::new(phi.cos(), phi.sin(), 0.0)
                    })
                    .collect();
                SphereQuadrature { dim, nodes, weights: vec![w; count], exact_degree }
            }
            Dim::Three => {
                let per_half = exact_degree / 2 + 1;
                let (x, w) = gauss_legendre(per_half);
                let azimuths = even_at_least(exact_degree + 1);
                let dphi = TAU / azimuths as f64;
                let mut nodes = Vec::with_capacity(2 * per_half * azimuths);
                let mut weights = Vec::with_capacity(2 * per_half * azimuths);
                for sign in [-1.0, 1.0] {
                    for (xi, wi) in x.iter().zip(&w) {
                        // Map [-1, 1] onto the hemisphere z ∈ [0, 1] (or its mirror).
                        let z = sign * 0.5 * (xi + 1.0);
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        for k in 0..azimuths {
                            let phi = dphi * k as f64;
                            nodes.push(Vec3::new(r * phi.cos(), r * phi.sin(), z));
                            weights.push(0.5 * wi * dphi);
                        }
                    }
                }
                SphereQuadrature { dim, nodes, weights, exact_degree }
            }
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exact_degree(&self) -> usize {
        self.exact_degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values of `f` at the nodes, in node order.
    pub fn sample<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&Vec3) -> f64 + Sync + Send,
    {
        self.nodes.par_iter().map(f).collect()
    }

    /// `Σ w_i f(u_i)`.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&Vec3) -> f64 + Sync + Send,
    {
        self.integrate_samples(&self.sample(f))
    }

    /// Weighted sum of precomputed node values.
    pub fn integrate_samples(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        compensated_sum(self.weights.iter().zip(values).map(|(w, v)| w * v))
    }
}

/// Weighted rotations approximating the normalized Haar measure.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationQuadrature {
    dim: Dim,
    elements: Vec<Rotation>,
    weights: Vec<f64>,
    exact_order: usize,
}

impl RotationQuadrature {
    pub fn build(dimension: usize, exact_order: usize) -> Result<Self> {
        Ok(Self::new(Dim::new(dimension)?, exact_order))
    }

    /// Smallest product rule of the documented shape with the given order.
    pub fn new(dim: Dim, exact_order: usize) -> Self {
        match dim {
            Dim::Two => Self::planar(2 * exact_order + 1),
            Dim::Three => Self::euler(2 * exact_order + 1, exact_order + 1, 2 * exact_order + 1),
        }
    }

    /// `count` equally spaced planar rotations `α_r = 2πr/count`.
    pub fn planar(count: usize) -> Self {
        let count = count.max(1);
        let elements = (0..count).map(|r| Rotation::planar(TAU * r as f64 / count as f64)).collect();
        RotationQuadrature {
            dim: Dim::Two,
            elements,
            weights: vec![1.0 / count as f64; count],
            exact_order: (count - 1) / 2,
        }
    }

    /// ZYZ Euler product rule: equally spaced `α` and `γ`, Gauss–Legendre in
    /// `cos β` (which carries the `sin β` Haar density).
    pub fn euler(alpha_count: usize, beta_count: usize, gamma_count: usize) -> Self {
        let (alpha_count, beta_count, gamma_count) = (alpha_count.max(1), beta_count.max(1), gamma_count.max(1));
        let (x, w) = gauss_legendre(beta_count);
        let mut elements = Vec::with_capacity(alpha_count * beta_count * gamma_count);
        let mut weights = Vec::with_capacity(elements.capacity());
        let norm = 1.0 / (2.0 * alpha_count as f64 * gamma_count as f64);
        for a in 0..alpha_count {
            let alpha = TAU * a as f64 / alpha_count as f64;
            for (xb, wb) in x.iter().zip(&w) {
                let beta = xb.clamp(-1.0, 1.0).acos();
                for g in 0..gamma_count {
                    let gamma = TAU * g as f64 / gamma_count as f64;
                    elements.push(Rotation::euler_zyz(alpha, beta, gamma));
                    weights.push(wb * norm);
                }
            }
        }
        let exact_order = ((alpha_count - 1) / 2).min(beta_count - 1).min((gamma_count - 1) / 2);
        RotationQuadrature { dim: Dim::Three, elements, weights, exact_order }
    }

    /// Rule with roughly `count` elements: `count` angles in the plane,
    /// `k³` Euler triples with `k = round(count^{1/3})` in space.
    pub fn with_count(dim: Dim, count: usize) -> Self {
        match dim {
            Dim::Two => Self::planar(count),
            Dim::Three => {
                let k = ((count.max(1) as f64).cbrt().round() as usize).max(1);
                Self::euler(k, k, k)
            }
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn elements(&self) -> &[Rotation] {
        &self.elements
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exact_order(&self) -> usize {
        self.exact_order
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&Rotation) -> f64 + Sync + Send,
    {
        let values: Vec<f64> = self.elements.par_iter().map(f).collect();
        compensated_sum(self.weights.iter().zip(&values).map(|(w, v)| w * v))
    }
}

fn even_at_least(n: usize) -> usize {
    let n = n.max(2);
    n + n % 2
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn weights_sum_to_sphere_measure() {
        let q2 = SphereQuadrature::build(2, 8).unwrap();
        let q3 = SphereQuadrature::build(3, 8).unwrap();
        assert!(rel(q2.weights().iter().sum(), TAU) < 1e-12);
        assert!(rel(q3.weights().iter().sum(), 2.0 * TAU) < 1e-12);
        assert!(q2.weights().iter().chain(q3.weights()).all(|&w| w > 0.0));
    }

    #[test]
    fn unsupported_dimension_is_an_error() {
        assert!(SphereQuadrature::build(4, 3).is_err());
        assert!(RotationQuadrature::build(1, 3).is_err());
    }

    #[test]
    fn circle_rule_examples() {
        let q = SphereQuadrature::build(2, 8).unwrap();
        assert!(q.integrate(|u| (4.0 * u.y.atan2(u.x)).cos()).abs() < 1e-12);
        assert!((q.integrate(|_| 1.0) - TAU).abs() < 1e-12);
        assert!((q.integrate(|u| u.x * u.x) - PI).abs() < 1e-12);
    }

    #[test]
    fn abs_cos_integral_on_dense_circle() {
        // ∫|cos φ| dφ = 4; the uniform rule has an O(M^-2) aliasing error here.
        let q = SphereQuadrature::build(2, 1 << 16).unwrap();
        assert!((q.integrate(|u| u.x.abs()) - 4.0).abs() < 1e-8);
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
        let (x, w) = gauss_legendre(400);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    // ∫_{S²} x^a y^b z^c dσ = 2 Γ(α)Γ(β)Γ(γ)/Γ(α+β+γ), α = (a+1)/2 etc.,
    // zero unless all exponents are even.
    fn sphere_monomial(a: u32, b: u32, c: u32) -> f64 {
        if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
            return 0.0;
        }
        // Γ of half-integers via double factorials.
        let dfact = |k: u32| -> f64 { (1..=k).rev().step_by(2).map(f64::from).product() };
        let num = dfact(a.saturating_sub(1)) * dfact(b.saturating_sub(1)) * dfact(c.saturating_sub(1));
        let den = dfact(a + b + c + 1);
        4.0 * PI * num / den
    }

    #[test]
    fn sphere_rule_is_exact_on_monomials() {
        let d = 10;
        let q = SphereQuadrature::build(3, d).unwrap();
        for a in 0..=d as u32 {
            for b in 0..=(d as u32 - a) {
                for c in 0..=(d as u32 - a - b) {
                    let approx = q.integrate(|u| u.x.powi(a as i32) * u.y.powi(b as i32) * u.z.powi(c as i32));
                    let exact = sphere_monomial(a, b, c);
                    assert!((approx - exact).abs() < 1e-12 * exact.abs().max(1.0), "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn planar_rotation_rule_examples() {
        let rq = RotationQuadrature::planar(16);
        assert!((rq.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        let rq = RotationQuadrature::build(2, 6).unwrap();
        for m in 1..=6 {
            let v = rq.integrate(|r| (m as f64 * r.angles()[0]).cos());
            assert!(v.abs() < 1e-12, "m={m} -> {v}");
        }
    }

    #[test]
    fn euler_rule_has_unit_mass() {
        let rq = RotationQuadrature::build(3, 4).unwrap();
        assert!((rq.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(rq.exact_order(), 4);
        assert_eq!(RotationQuadrature::with_count(Dim::Three, 4096).len(), 4096);
    }
}
