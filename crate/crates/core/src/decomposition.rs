//! Writes a band-limited target `L` as `L + T₁ = T₂`, where `T₁` and `T₂`
//! are nonnegative combinations of rotated copies of a generator `K`.
//!
//! With `c_{mj} = (h_K, Y_{mj})`, target coefficients `a_{mi}` and an index
//! `j(m)` with `c_{m j(m)} ≠ 0`, the density
//!
//! ```text
//! g(θ) = Σ_m N(n,m) Σ_i a_{mi} / c_{m j(m)} · t^m_{i j(m)}(θ)
//! ```
//!
//! satisfies `∫ h(θK, ·) g(θ) dν(θ) = h_L` in space. In the plane the order-m
//! representations (m ≥ 1) commute with a quarter turn `J`, and the Haar
//! averages are instead
//!
//! ```text
//! ∫ θf · t^m_{ij}(θ) dν(θ) = ½ [ c_j Y_{mi} + (Jᵀc)_j (JᵀY_m)_i ],
//! ```
//!
//! so `g` uses every generator coefficient of the order:
//! `N(n,m) Σ_{i,j} a_{mi} c_{mj} / ‖c_m‖² · t^m_{ij}`. Splitting `g = g⁺ − g⁻` at the
//! nodes of a rotation rule gives `T₂ = Σ w_r g⁺(θ_r) θ_r K` and
//! `T₁ = Σ w_r g⁻(θ_r) θ_r K`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::analysis::expand;
use crate::bodies::{ConvexBody, Summand};
use crate::harmonics::{dimension_count, HarmonicExpansion, Representation};
use crate::sphere_quadrature::{RotationQuadrature, SphereQuadrature};
use crate::{compensated_sum, Dim, Error, Result, Rotation};

/// Which orders a generator must carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileVariant {
    /// Every order up to `m_max`.
    Universal,
    /// Every even order; odd orders are used when present.
    Central,
}

#[derive(Debug, Clone)]
pub struct GeneratorProfile {
    pub generator: ConvexBody,
    pub variant: ProfileVariant,
    pub tau: f64,
    /// `c_{mj} = (h_K, Y_{mj})`.
    pub coefficients: HarmonicExpansion,
    /// `j(m)` (1-based), `None` where every `|c_{mj}| ≤ τ`.
    pub j_select: Vec<Option<usize>>,
    /// `|c_{m j(m)}|`, 0 where absent.
    pub conditioning: Vec<f64>,
}

impl GeneratorProfile {
    pub fn m_max(&self) -> usize {
        self.coefficients.max_order()
    }

    pub fn dim(&self) -> Dim {
        self.coefficients.dim()
    }

    /// Orders the generator can serve.
    pub fn profiled_orders(&self) -> Vec<usize> {
        (0..=self.m_max()).filter(|&m| self.j_select[m].is_some()).collect()
    }
}

pub fn profile_generator(
    generator: &ConvexBody,
    m_max: usize,
    tau: f64,
    variant: ProfileVariant,
    q: &SphereQuadrature,
) -> Result<GeneratorProfile> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {tau}")));
    }
    let coefficients = expand(generator, m_max, q)?;
    profile_from_coefficients(generator.clone(), coefficients, tau, variant)
}

/// Profile from precomputed generator coefficients.
pub fn profile_from_coefficients(
    generator: ConvexBody,
    coefficients: HarmonicExpansion,
    tau: f64,
    variant: ProfileVariant,
) -> Result<GeneratorProfile> {
    let mut j_select = Vec::new();
    let mut conditioning = Vec::new();
    for m in 0..=coefficients.max_order() {
        let (j, largest) = coefficients.block(m).iter().enumerate().fold((0, -1.0), |best, (k, c)| {
            if c.abs() > best.1 {
                (k + 1, c.abs())
            } else {
                best
            }
        });
        let required = match variant {
            ProfileVariant::Universal => true,
            ProfileVariant::Central => m % 2 == 0,
        };
        if largest > tau {
            j_select.push(Some(j));
            conditioning.push(largest);
        } else if required {
            return Err(Error::DegenerateGenerator { order: m, largest, tau });
        } else {
            j_select.push(None);
            conditioning.push(0.0);
        }
    }
    Ok(GeneratorProfile { generator, variant, tau, coefficients, j_select, conditioning })
}

/// `[(j, N(n,m)·b_{ij} for each i)]` for one order `m`.
type Columns = Vec<(usize, Vec<f64>)>;

/// The density `g` on the rotation group.
#[derive(Debug, Clone)]
pub struct RotationDensity {
    dim: Dim,
    terms: Vec<(usize, Columns)>,
    representation: Representation,
    g_condition: f64,
}

impl RotationDensity {
    pub fn eval(&self, rotation: &Rotation) -> f64 {
        compensated_sum(self.terms.iter().flat_map(|(m, cols)| {
            cols.iter().flat_map(move |(j, coef)| {
                let col = self.representation.column(*m, *j, rotation);
                coef.iter().zip(col).map(|(c, t)| c * t).collect::<Vec<_>>()
            })
        }))
    }

    /// Orders carried by `g`.
    pub fn orders(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.0).collect()
    }

    /// `Σ_m N(n,m) Σ_i |a_{mi}| / |c_{m j(m)}|`, a bound on `sup |g|` up to
    /// basis normalization.
    pub fn g_condition(&self) -> f64 {
        self.g_condition
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }
}

pub fn synthesize_g(profile: &GeneratorProfile, target: &HarmonicExpansion) -> Result<RotationDensity> {
    let dim = profile.dim();
    if target.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim.get(), found: target.dim().get() });
    }
    let mut terms = Vec::new();
    let mut g_condition = 0.0;
    for m in 0..=target.max_order() {
        let a = target.block(m);
        if a.iter().all(|&x| x == 0.0) {
            continue;
        }
        let present = target.order_norm(m) > profile.tau;
        let j = match profile.j_select.get(m).copied().flatten() {
            Some(j) => j,
            None if present => return Err(Error::OrderNotProfiled { order: m }),
            // Below threshold and unusable: dropped.
            None => continue,
        };
        let cm = profile.coefficients.block(m);
        let c = cm[j - 1];
        let n = dimension_count(dim, m) as f64;
        if dim == Dim::Two && m > 0 {
            // Planar order-m representations are of complex type, so the
            // density must use both generator coefficients.
            let norm2: f64 = cm.iter().map(|x| x * x).sum();
            let cols = (1..=cm.len()).map(|jj| (jj, a.iter().map(|x| n * x * cm[jj - 1] / norm2).collect())).collect();
            terms.push((m, cols));
        } else {
            terms.push((m, vec![(j, a.iter().map(|x| n * x / c).collect())]));
        }
        g_condition += n * a.iter().map(|x| x.abs()).sum::<f64>() / c.abs();
    }
    let top = terms.iter().map(|t| t.0).max().unwrap_or(0);
    Ok(RotationDensity { dim, terms, representation: Representation::new(dim, top), g_condition })
}

/// Which side of `L + T₁ = T₂` a rotated copy belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    T1,
    T2,
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub t1: ConvexBody,
    pub t2: ConvexBody,
    pub residual_sup: f64,
    pub residual_l2: f64,
    pub rotation_count: usize,
    pub g_condition: f64,
    /// `g(θ_r)` at every node of the rotation rule, in rule order.
    pub g_values: Vec<f64>,
}

impl DecompositionResult {
    /// `(rotation, weight, side)` for every nonzero part.
    pub fn parts(&self) -> Vec<(Rotation, f64, Side)> {
        let mut out = Vec::new();
        for (body, side) in [(&self.t1, Side::T1), (&self.t2, Side::T2)] {
            if let ConvexBody::Minkowski { parts, .. } = body {
                out.extend(parts.iter().map(|p| (p.rotation, p.weight, side)));
            }
        }
        out
    }

    pub fn check_tolerance(&self, tolerance: f64) -> Result<()> {
        if self.residual_sup > tolerance || self.residual_sup.is_nan() {
            return Err(Error::ResidualTooLarge {
                sup: self.residual_sup,
                tolerance,
                g_condition: self.g_condition,
                rotations: self.rotation_count,
            });
        }
        Ok(())
    }
}

pub fn decompose(
    profile: &GeneratorProfile,
    target: &HarmonicExpansion,
    rq: &RotationQuadrature,
    test_grid: &SphereQuadrature,
) -> Result<DecompositionResult> {
    let dim = profile.dim();
    if rq.dim() != dim || test_grid.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim.get(), found: rq.dim().get() });
    }
    if rq.exact_order() < target.max_order() {
        return Err(Error::QuadratureTooCoarse {
            order: target.max_order(),
            required: target.max_order(),
            available: rq.exact_order(),
        });
    }
    let g = synthesize_g(profile, target)?;
    let g_values: Vec<f64> = rq.elements().par_iter().map(|r| g.eval(r)).collect();
    let generator = Arc::new(profile.generator.clone());
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for ((rotation, w), gv) in rq.elements().iter().zip(rq.weights()).zip(&g_values) {
        let part = |weight: f64| Summand { weight, rotation: *rotation, body: Arc::clone(&generator) };
        if *gv > 0.0 {
            plus.push(part(w * gv));
        } else if *gv < 0.0 {
            minus.push(part(-w * gv));
        }
    }
    let t1 = ConvexBody::minkowski(dim, minus)?;
    let t2 = ConvexBody::minkowski(dim, plus)?;
    let (residual_sup, residual_l2) = residual_norms(test_grid, |u| target.evaluate(u) + t1.support(u) - t2.support(u));
    Ok(DecompositionResult {
        t1,
        t2,
        residual_sup,
        residual_l2,
        rotation_count: rq.len(),
        g_condition: g.g_condition(),
        g_values,
    })
}

/// `(sup, L²)` norms of `h_L + h_{T₁} − h_{T₂}` over the grid.
pub fn residual_report(result: &DecompositionResult, target: &ConvexBody, grid: &SphereQuadrature) -> (f64, f64) {
    residual_norms(grid, |u| target.support(u) + result.t1.support(u) - result.t2.support(u))
}

fn residual_norms<F>(grid: &SphereQuadrature, f: F) -> (f64, f64)
where
    F: Fn(&crate::Vec3) -> f64 + Sync + Send,
{
    let r = grid.sample(f);
    let sup = r.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let sq: Vec<f64> = r.iter().map(|x| x * x).collect();
    (sup, grid.integrate_samples(&sq).max(0.0).sqrt())
}

/// Errors of the Haar averages `∫ h(θK, u) t^m_{ij}(θ) dν(θ)` over a grid of
/// directions, against `N(n,m)⁻¹ c_j Y_{mi}(u)` (`textbook`) and against the
/// form valid in the ambient dimension (`effective`; the two agree in space
/// and at order 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionCheck {
    pub order: usize,
    pub textbook: f64,
    pub effective: f64,
}

pub fn projection_identity_check(
    body: &ConvexBody,
    m: usize,
    rq: &RotationQuadrature,
    coefficient_rule: &SphereQuadrature,
    grid: &[crate::Vec3],
) -> Result<ProjectionCheck> {
    let dim = body.dim();
    if rq.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim.get(), found: rq.dim().get() });
    }
    let c = crate::analysis::project(body, m, coefficient_rule)?;
    let n = dimension_count(dim, m);
    let rep = Representation::new(dim, m);
    let t: Vec<_> = rq.elements().iter().map(|r| rep.matrix(m, r)).collect();
    let complex_type = dim == Dim::Two && m > 0;
    let errors: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|u| {
            let h: Vec<f64> = rq.elements().iter().map(|r| body.support(&r.apply_inverse(u))).collect();
            let y = crate::harmonics::order_values(dim, m, u);
            let (mut textbook, mut effective) = (0.0f64, 0.0f64);
            for i in 1..=n {
                for j in 1..=n {
                    let lhs =
                        compensated_sum(rq.weights().iter().zip(&h).zip(&t).map(|((w, h), t)| w * h * t.get(i, j)));
                    let stated = c[j - 1] * y[i - 1] / n as f64;
                    let valid = if complex_type {
                        let jc = [c[1], -c[0]];
                        let jy = [y[1], -y[0]];
                        0.5 * (c[j - 1] * y[i - 1] + jc[j - 1] * jy[i - 1])
                    } else {
                        stated
                    };
                    textbook = textbook.max((lhs - stated).abs());
                    effective = effective.max((lhs - valid).abs());
                }
            }
            (textbook, effective)
        })
        .collect();
    let (textbook, effective) = errors.iter().fold((0.0f64, 0.0f64), |a, e| (a.0.max(e.0), a.1.max(e.1)));
    Ok(ProjectionCheck { order: m, textbook, effective })
}
