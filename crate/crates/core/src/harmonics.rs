//! Real orthonormal spherical-harmonic bases, the representation matrices
//! `t^m(θ)` and coefficient containers.
//!
//! # Basis convention
//!
//! The basis is fixed once and never changes; expansions index into it.
//!
//! * `n = 2`: `Y_{0,1} = 1/√(2π)`; for `m ≥ 1`, `Y_{m,1} = cos(mφ)/√π` and
//!   `Y_{m,2} = sin(mφ)/√π`.
//! * `n = 3`: `Y_{m,j}` with `k = j − 1 − m ∈ [−m, m]`. For `k > 0` the
//!   function is `√2 N_m^k(z) Re (x + iy)^k`, for `k < 0` it is
//!   `√2 N_m^{|k|}(z) Im (x + iy)^{|k|}` and `k = 0` gives `N_m^0(z)`, where
//!   `N_m^k(z) = √((2m+1)/(4π) (m−k)!/(m+k)!) P_m^k(z) / sin^k θ` (no
//!   Condon–Shortley phase).
//!
//! Both bases are orthonormal for `(f, g) = ∫ f g dσ`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use crate::sphere_quadrature::SphereQuadrature;
use crate::{compensated_sum, Dim, Error, Result, Rotation, Vec3};

/// `N(n, m)`, the dimension of the space of order-`m` harmonics.
pub fn dimension_count(dim: Dim, m: usize) -> usize {
    match (dim, m) {
        (Dim::Two, 0) => 1,
        (Dim::Two, _) => 2,
        (Dim::Three, m) => 2 * m + 1,
    }
}

/// Position of the first order-`m` function in a flattened basis vector.
pub fn order_offset(dim: Dim, m: usize) -> usize {
    match (dim, m) {
        (_, 0) => 0,
        (Dim::Two, m) => 2 * m - 1,
        (Dim::Three, m) => m * m,
    }
}

/// Number of basis functions of order `≤ max_order`.
pub fn basis_len(dim: Dim, max_order: usize) -> usize {
    order_offset(dim, max_order + 1)
}

/// `(m, j)` with `1 ≤ j ≤ N(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub m: usize,
    pub j: usize,
}

impl HarmonicIndex {
    pub fn new(dim: Dim, m: usize, j: usize) -> Result<Self> {
        if j == 0 || j > dimension_count(dim, m) {
            return Err(Error::InvalidIndex { dim: dim.get(), m, j });
        }
        Ok(HarmonicIndex { m, j })
    }
}

/// Value of the basis function `Y_{m,j}` at the direction of `u`.
pub fn eval_harmonic(dim: Dim, idx: HarmonicIndex, u: &Vec3) -> Result<f64> {
    let idx = HarmonicIndex::new(dim, idx.m, idx.j)?;
    Ok(order_values(dim, idx.m, u)[idx.j - 1])
}

/// All order-`m` basis functions at the direction of `u`.
pub fn order_values(dim: Dim, m: usize, u: &Vec3) -> Vec<f64> {
    let all = basis_values(dim, m, u);
    all[order_offset(dim, m)..].to_vec()
}

/// All basis functions of order `≤ max_order` at the direction of `u`,
/// flattened in ascending `(m, j)`.
pub fn basis_values(dim: Dim, max_order: usize, u: &Vec3) -> Vec<f64> {
    let mut out = vec![0.0; basis_len(dim, max_order)];
    fill_basis_values(dim, max_order, u, &mut out);
    out
}

/// As [`basis_values`], writing into `out` (length `basis_len`).
pub fn fill_basis_values(dim: Dim, max_order: usize, u: &Vec3, out: &mut [f64]) {
    let r = match dim {
        Dim::Two => u.x.hypot(u.y),
        Dim::Three => u.norm(),
    };
    let (x, y, z) = (u.x / r, u.y / r, if dim == Dim::Three { u.z / r } else { 0.0 });
    // (x + iy)^k by repeated multiplication.
    let mut re = vec![1.0; max_order + 1];
    let mut im = vec![0.0; max_order + 1];
    for k in 1..=max_order {
        re[k] = re[k - 1] * x - im[k - 1] * y;
        im[k] = re[k - 1] * y + im[k - 1] * x;
    }
    match dim {
        Dim::Two => {
            out[0] = 1.0 / TAU.sqrt();
            let s = 1.0 / PI.sqrt();
            for m in 1..=max_order {
                out[2 * m - 1] = s * re[m];
                out[2 * m] = s * im[m];
            }
        }
        Dim::Three => {
            let table = normalized_legendre(max_order, z);
            let sqrt2 = std::f64::consts::SQRT_2;
            for l in 0..=max_order {
                let base = l * l + l; // position of k = 0
                out[base] = table[l][0];
                for k in 1..=l {
                    out[base + k] = sqrt2 * table[l][k] * re[k];
                    out[base - k] = sqrt2 * table[l][k] * im[k];
                }
            }
        }
    }
}

/// `table[l][k] = N_l^k(z)` for `0 ≤ k ≤ l ≤ max_order`.
fn normalized_legendre(max_order: usize, z: f64) -> Vec<Vec<f64>> {
    let mut t: Vec<Vec<f64>> = (0..=max_order).map(|l| vec![0.0; l + 1]).collect();
    let mut diag = 1.0 / (4.0 * PI).sqrt();
    for k in 0..=max_order {
        if k > 0 {
            let kf = k as f64;
            diag *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt();
        }
        t[k][k] = diag;
        if k < max_order {
            t[k + 1][k] = z * (2.0 * k as f64 + 3.0).sqrt() * diag;
        }
        for l in k + 2..=max_order {
            let (lf, kf) = (l as f64, k as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - kf * kf)).sqrt();
            let b = (((lf - 1.0).powi(2) - kf * kf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            t[l][k] = a * (z * t[l - 1][k] - b * t[l - 2][k]);
        }
    }
    t
}

/// Coefficients `a_{mj}` of `Σ a_{mj} Y_{mj}` for `m ≤ max_order`, stored
/// in one block per order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExpansionRepr", into = "ExpansionRepr")]
pub struct HarmonicExpansion {
    dim: Dim,
    blocks: Vec<Vec<f64>>,
}

impl HarmonicExpansion {
    pub fn zeros(dim: Dim, max_order: usize) -> Self {
        let blocks = (0..=max_order).map(|m| vec![0.0; dimension_count(dim, m)]).collect();
        HarmonicExpansion { dim, blocks }
    }

    pub fn from_blocks(dim: Dim, blocks: Vec<Vec<f64>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("expansion needs at least the order-0 block".into()));
        }
        for (m, b) in blocks.iter().enumerate() {
            let n = dimension_count(dim, m);
            if b.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: b.len() });
            }
            if b.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite coefficient at order {m}")));
            }
        }
        Ok(HarmonicExpansion { dim, blocks })
    }

    /// Builds an expansion from `(m, j, a)` triples; unspecified entries are 0.
    pub fn from_terms<I>(dim: Dim, max_order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut e = HarmonicExpansion::zeros(dim, max_order);
        for (m, j, a) in terms {
            if m > max_order {
                return Err(Error::InvalidArgument(format!("order {m} exceeds max_order {max_order}")));
            }
            e.set(HarmonicIndex::new(dim, m, j)?, a)?;
        }
        Ok(e)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    /// Order-`m` coefficients; an empty slice above `max_order`.
    pub fn block(&self, m: usize) -> &[f64] {
        self.blocks.get(m).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn get(&self, idx: HarmonicIndex) -> f64 {
        self.blocks.get(idx.m).and_then(|b| b.get(idx.j.wrapping_sub(1))).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, idx: HarmonicIndex, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument("coefficient must be finite".into()));
        }
        let dim = self.dim;
        let slot = self
            .blocks
            .get_mut(idx.m)
            .and_then(|b| b.get_mut(idx.j.wrapping_sub(1)))
            .ok_or(Error::InvalidIndex { dim: dim.get(), m: idx.m, j: idx.j })?;
        *slot = value;
        Ok(())
    }

    /// `‖π_m f‖₂ = (Σ_j a_{mj}²)^{1/2}`, independent of the basis choice.
    pub fn order_norm(&self, m: usize) -> f64 {
        self.block(m).iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn evaluate(&self, u: &Vec3) -> f64 {
        let values = basis_values(self.dim, self.max_order(), u);
        compensated_sum(self.blocks.iter().flatten().zip(&values).map(|(a, y)| a * y))
    }

    /// `(index, coefficient)` in ascending `(m, j)`.
    pub fn iter(&self) -> impl Iterator<Item = (HarmonicIndex, f64)> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(m, b)| b.iter().enumerate().map(move |(j, &a)| (HarmonicIndex { m, j: j + 1 }, a)))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        HarmonicExpansion {
            dim: self.dim,
            blocks: self.blocks.iter().map(|b| b.iter().map(|a| a * factor).collect()).collect(),
        }
    }

    pub fn truncated(&self, max_order: usize) -> Self {
        let mut e = HarmonicExpansion::zeros(self.dim, max_order);
        for (m, b) in self.blocks.iter().enumerate().take(max_order + 1) {
            e.blocks[m].clone_from(b);
        }
        e
    }

    /// Coefficients of `θf`, `(θf)(u) = f(θ⁻¹u)`: each block is multiplied
    /// by `t^m(θ)`.
    pub fn rotated(&self, rotation: &Rotation) -> Result<Self> {
        check_dim(self.dim, rotation.dim())?;
        let rep = Representation::new(self.dim, self.max_order());
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(m, b)| {
                let t = rep.matrix(m, rotation);
                (t.entries() * nalgebra::DVector::from_column_slice(b)).as_slice().to_vec()
            })
            .collect();
        Ok(HarmonicExpansion { dim: self.dim, blocks })
    }

    /// CSV with a `# dimension=n` line, a header and rows `m,j,a_mj` in
    /// ascending `(m, j)`, floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# dimension={}\nm,j,coefficient\n", self.dim);
        for (idx, a) in self.iter() {
            let _ = writeln!(out, "{},{},{}", idx.m, idx.j, crate::io::fmt_f64(a));
        }
        out
    }

    /// Inverse of [`to_csv`](Self::to_csv). The dimension comes from the
    /// `# dimension=` line or, failing that, from `dim_hint`. Rows may come in
    /// any order; missing entries are zero.
    pub fn from_csv(text: &str, dim_hint: Option<Dim>) -> Result<Self> {
        let mut dim = dim_hint;
        let mut rows = Vec::new();
        let mut seen_header = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let at = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(value) = comment.trim().strip_prefix("dimension=") {
                    let n: usize = value.trim().parse().map_err(|_| at(format!("bad dimension {value:?}")))?;
                    let d = Dim::new(n).map_err(|e| at(e.to_string()))?;
                    if dim.is_some_and(|h| h != d) {
                        return Err(at(format!("dimension {n} conflicts with the expected {}", dim.unwrap())));
                    }
                    dim = Some(d);
                }
                continue;
            }
            if !seen_header && line.replace(' ', "") == "m,j,coefficient" {
                seen_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(at(format!("expected 3 fields, found {}", fields.len())));
            }
            let m: usize = fields[0].parse().map_err(|_| at(format!("bad order {:?}", fields[0])))?;
            let j: usize = fields[1].parse().map_err(|_| at(format!("bad index {:?}", fields[1])))?;
            let a: f64 = fields[2].parse().map_err(|_| at(format!("bad coefficient {:?}", fields[2])))?;
            if !a.is_finite() {
                return Err(at("coefficient is not finite".into()));
            }
            if m > MAX_CSV_ORDER {
                return Err(at(format!("order {m} exceeds the supported maximum {MAX_CSV_ORDER}")));
            }
            rows.push((lineno + 1, m, j, a));
        }
        let dim = dim.ok_or_else(|| Error::Parse("missing '# dimension=' line".into()))?;
        let max_order = rows.iter().map(|r| r.1).max().unwrap_or(0);
        let mut e = HarmonicExpansion::zeros(dim, max_order);
        for (lineno, m, j, a) in rows {
            let idx = HarmonicIndex::new(dim, m, j).map_err(|err| Error::Parse(format!("line {lineno}: {err}")))?;
            e.set(idx, a)?;
        }
        Ok(e)
    }
}

/// Upper bound on orders accepted from text input.
pub const MAX_CSV_ORDER: usize = 512;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpansionRepr {
    dimension: usize,
    max_order: usize,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    m: usize,
    j: usize,
    coefficient: f64,
}

impl TryFrom<ExpansionRepr> for HarmonicExpansion {
    type Error = Error;

    fn try_from(r: ExpansionRepr) -> Result<Self> {
        if r.max_order > MAX_CSV_ORDER {
            return Err(Error::InvalidArgument(format!("max_order {} is too large", r.max_order)));
        }
        HarmonicExpansion::from_terms(
            Dim::new(r.dimension)?,
            r.max_order,
            r.terms.into_iter().map(|t| (t.m, t.j, t.coefficient)),
        )
    }
}

impl From<HarmonicExpansion> for ExpansionRepr {
    fn from(e: HarmonicExpansion) -> Self {
        ExpansionRepr {
            dimension: e.dim.get(),
            max_order: e.max_order(),
            terms: e
                .iter()
                .filter(|(_, a)| *a != 0.0)
                .map(|(idx, coefficient)| TermRepr { m: idx.m, j: idx.j, coefficient })
                .collect(),
        }
    }
}

/// The matrix `t^m(θ)` with `θY_{mj} = Σ_i t^m_{ij}(θ) Y_{mi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    order: usize,
    entries: DMatrix<f64>,
}

impl RotationMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1, j - 1)]
    }
}

/// `t^m(θ)`; closed form in the plane, quadrature projection in space.
pub fn rotation_matrix(dim: Dim, m: usize, rotation: &Rotation) -> Result<RotationMatrix> {
    check_dim(dim, rotation.dim())?;
    Ok(Representation::new(dim, m).matrix(m, rotation))
}

/// As [`rotation_matrix`] for a raw `n × n` matrix, validating it first.
pub fn rotation_matrix_from_rows(m: usize, rows: &[Vec<f64>]) -> Result<RotationMatrix> {
    let rotation = Rotation::from_rows(rows)?;
    rotation_matrix(rotation.dim(), m, &rotation)
}

/// Reusable evaluator of `t^m(θ)` for all `m ≤ max_order`.
///
/// In space, `t^m_{ij}(θ) = ∫ Y_{mj}(θ⁻¹u) Y_{mi}(u) dσ(u)` is computed with
/// a sphere rule exact to degree `2·max_order`, so the result is exact up to
/// rounding.
#[derive(Debug, Clone)]
pub struct Representation {
    dim: Dim,
    max_order: usize,
    quadrature: Option<SphereQuadrature>,
    // Basis values at the quadrature nodes, one row per node.
    node_values: Vec<Vec<f64>>,
}

impl Representation {
    pub fn new(dim: Dim, max_order: usize) -> Self {
        match dim {
            Dim::Two => Representation { dim, max_order, quadrature: None, node_values: Vec::new() },
            Dim::Three => {
                let q = SphereQuadrature::new(dim, 2 * max_order);
                let node_values = q.nodes().iter().map(|u| basis_values(dim, max_order, u)).collect();
                Representation { dim, max_order, quadrature: Some(q), node_values }
            }
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn matrix(&self, m: usize, rotation: &Rotation) -> RotationMatrix {
        assert!(m <= self.max_order, "order {m} above representation limit {}", self.max_order);
        let n = dimension_count(self.dim, m);
        let entries = match self.dim {
            Dim::Two => {
                if m == 0 {
                    DMatrix::from_element(1, 1, 1.0)
                } else {
                    let (c, s) = planar_power(rotation, m);
                    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
                }
            }
            Dim::Three => {
                let q = self.quadrature.as_ref().expect("spatial representation has a quadrature");
                let off = order_offset(self.dim, m);
                let mut t = DMatrix::zeros(n, n);
                for ((u, w), here) in q.nodes().iter().zip(q.weights()).zip(&self.node_values) {
                    let moved = order_values(self.dim, m, &rotation.apply_inverse(u));
                    for i in 0..n {
                        let wi = w * here[off + i];
                        for j in 0..n {
                            t[(i, j)] += wi * moved[j];
                        }
                    }
                }
                t
            }
        };
        RotationMatrix { order: m, entries }
    }

    /// Column `j` (1-based) of `t^m(θ)`.
    pub fn column(&self, m: usize, j: usize, rotation: &Rotation) -> Vec<f64> {
        assert!(m <= self.max_order);
        match self.dim {
            Dim::Two => {
                if m == 0 {
                    return vec![1.0];
                }
                let (c, s) = planar_power(rotation, m);
                if j == 1 {
                    vec![c, s]
                } else {
                    vec![-s, c]
                }
            }
            Dim::Three => {
                let q = self.quadrature.as_ref().expect("spatial representation has a quadrature");
                let n = dimension_count(self.dim, m);
                let off = order_offset(self.dim, m);
                let mut col = vec![0.0; n];
                for ((u, w), here) in q.nodes().iter().zip(q.weights()).zip(&self.node_values) {
                    let moved = order_values(self.dim, m, &rotation.apply_inverse(u))[j - 1];
                    for (i, c) in col.iter_mut().enumerate() {
                        *c += w * moved * here[off + i];
                    }
                }
                col
            }
        }
    }
}

// (cos mα, sin mα) for a planar rotation by α.
fn planar_power(rotation: &Rotation, m: usize) -> (f64, f64) {
    let r = rotation.matrix();
    let (c1, s1) = (r[(0, 0)], r[(1, 0)]);
    let (mut c, mut s) = (1.0, 0.0);
    for _ in 0..m {
        (c, s) = (c * c1 - s * s1, c * s1 + s * c1);
    }
    (c, s)
}

fn check_dim(expected: Dim, found: Dim) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected: expected.get(), found: found.get() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_unit(dim: Dim, rng: &mut ChaCha8Rng) -> Vec3 {
        Rotation::random(dim, rng).apply(&Rotation::random(dim, rng).apply(&Vec3::x()))
    }

    #[test]
    fn counts() {
        assert_eq!(dimension_count(Dim::Two, 0), 1);
        assert_eq!(dimension_count(Dim::Two, 5), 2);
        assert_eq!(dimension_count(Dim::Three, 4), 9);
        assert_eq!(basis_len(Dim::Three, 3), 16);
        assert_eq!(basis_len(Dim::Two, 3), 7);
    }

    #[test]
    fn planar_examples() {
        let y0 = eval_harmonic(Dim::Two, HarmonicIndex { m: 0, j: 1 }, &Vec3::new(0.6, 0.8, 0.0)).unwrap();
        assert!((y0 - 1.0 / TAU.sqrt()).abs() < 1e-15);
        assert!((y0 - 0.398_942_280_401_432_7).abs() < 1e-15);
        let y21 = eval_harmonic(Dim::Two, HarmonicIndex { m: 2, j: 1 }, &Vec3::x()).unwrap();
        assert!((y21 - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!(eval_harmonic(Dim::Two, HarmonicIndex { m: 2, j: 3 }, &Vec3::x()).is_err());
        assert!(eval_harmonic(Dim::Three, HarmonicIndex { m: 1, j: 0 }, &Vec3::x()).is_err());
    }

    #[test]
    fn spatial_low_orders_match_closed_forms() {
        let u = Vec3::new(0.48, -0.6, 0.64);
        let v = basis_values(Dim::Three, 2, &u);
        let c0 = 0.5 / PI.sqrt();
        let c1 = (3.0 / (4.0 * PI)).sqrt();
        assert!((v[0] - c0).abs() < 1e-15);
        // order 1 spans the coordinate functions
        assert!((v[1] - c1 * u.y).abs() < 1e-15);
        assert!((v[2] - c1 * u.z).abs() < 1e-15);
        assert!((v[3] - c1 * u.x).abs() < 1e-15);
        let c2 = 0.5 * (15.0 / PI).sqrt();
        assert!((v[4] - c2 * u.x * u.y).abs() < 1e-14);
        assert!((v[6] - 0.25 * (5.0 / PI).sqrt() * (3.0 * u.z * u.z - 1.0)).abs() < 1e-14);
        assert!((v[8] - 0.5 * c2 * (u.x * u.x - u.y * u.y)).abs() < 1e-14);
    }

    #[test]
    fn planar_rotation_matrix_is_rotation_by_m_alpha() {
        let alpha = 0.37;
        let t = rotation_matrix(Dim::Two, 3, &Rotation::planar(alpha)).unwrap();
        let (c, s) = ((3.0 * alpha).cos(), (3.0 * alpha).sin());
        assert!((t.get(1, 1) - c).abs() < 1e-14 && (t.get(2, 1) - s).abs() < 1e-14);
        assert!((t.get(1, 2) + s).abs() < 1e-14 && (t.get(2, 2) - c).abs() < 1e-14);
        // pointwise oracle on a φ grid
        for k in 0..64 {
            let phi = TAU * k as f64 / 64.0;
            let u = Vec3::new(phi.cos(), phi.sin(), 0.0);
            let moved = order_values(Dim::Two, 3, &Rotation::planar(alpha).apply_inverse(&u));
            let here = order_values(Dim::Two, 3, &u);
            for j in 0..2 {
                let rhs = t.entries()[(0, j)] * here[0] + t.entries()[(1, j)] * here[1];
                assert!((moved[j] - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_gives_identity_matrix() {
        for dim in [Dim::Two, Dim::Three] {
            for m in 0..5 {
                let t = rotation_matrix(dim, m, &Rotation::identity(dim)).unwrap();
                let n = dimension_count(dim, m);
                assert!((t.entries() - DMatrix::identity(n, n)).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn spatial_rotation_matrices_satisfy_defining_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rep = Representation::new(Dim::Three, 8);
        for _ in 0..3 {
            let theta = Rotation::random(Dim::Three, &mut rng);
            for m in 0..=8 {
                let t = rep.matrix(m, &theta);
                let n = 2 * m + 1;
                let gram = t.entries() * t.entries().transpose();
                assert!((gram - DMatrix::identity(n, n)).abs().max() < 1e-10);
                for _ in 0..20 {
                    let u = random_unit(Dim::Three, &mut rng);
                    let moved = order_values(Dim::Three, m, &theta.apply_inverse(&u));
                    let here = order_values(Dim::Three, m, &u);
                    for j in 0..n {
                        let rhs: f64 = (0..n).map(|i| t.entries()[(i, j)] * here[i]).sum();
                        assert!((moved[j] - rhs).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [Dim::Two, Dim::Three] {
            let rep = Representation::new(dim, 6);
            for _ in 0..5 {
                let a = Rotation::random(dim, &mut rng);
                let b = Rotation::random(dim, &mut rng);
                for m in 0..=6 {
                    let lhs = rep.matrix(m, &a.compose(&b));
                    let rhs = rep.matrix(m, &a).entries() * rep.matrix(m, &b).entries();
                    assert!((lhs.entries() - rhs).abs().max() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rotated_expansion_evaluates_at_inverse_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [Dim::Two, Dim::Three] {
            let k = 5;
            let mut e = HarmonicExpansion::zeros(dim, k);
            for m in 0..=k {
                for j in 1..=dimension_count(dim, m) {
                    e.set(HarmonicIndex { m, j }, rand::Rng::random_range(&mut rng, -1.0..1.0)).unwrap();
                }
            }
            let theta = Rotation::random(dim, &mut rng);
            let r = e.rotated(&theta).unwrap();
            for _ in 0..30 {
                let u = random_unit(dim, &mut rng);
                assert!((r.evaluate(&u) - e.evaluate(&theta.apply_inverse(&u))).abs() < 1e-9);
            }
            assert!((e.rotated(&Rotation::identity(dim)).unwrap().blocks()[k][0] - e.blocks()[k][0]).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let e = HarmonicExpansion::from_terms(Dim::Three, 2, [(0, 1, 1.5), (2, 4, -0.1 / 3.0)]).unwrap();
        let text = e.to_csv();
        assert_eq!(HarmonicExpansion::from_csv(&text, None).unwrap(), e);
        assert!(HarmonicExpansion::from_csv("m,j,coefficient\n0,1,1\n", None).is_err());
        assert!(HarmonicExpansion::from_csv("# dimension=2\n1,3,0.5\n", None).is_err());
        assert!(HarmonicExpansion::from_csv("# dimension=2\n1,1\n", None).is_err());
        assert!(HarmonicExpansion::from_csv("# dimension=2\n1,1,nan\n", None).is_err());
        let e2 = HarmonicExpansion::from_csv("2,2,0.25\n", Some(Dim::Two)).unwrap();
        assert_eq!(e2.get(HarmonicIndex { m: 2, j: 2 }), 0.25);
    }
}
