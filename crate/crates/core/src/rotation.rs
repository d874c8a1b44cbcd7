//! Proper rotations of the plane and of space.

use nalgebra::{Rotation3, UnitQuaternion};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Dim, Error, Mat3, Result, Vec3};

const ORTHOGONALITY_TOL: f64 = 1e-9;

/// An element of `SO(n)`, `n ∈ {2, 3}`, stored as an orthogonal 3×3 matrix
/// (planar rotations act on the first two coordinates).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RotationRepr", into = "RotationRepr")]
pub struct Rotation {
    dim: Dim,
    matrix: Mat3,
}

impl Rotation {
    pub fn identity(dim: Dim) -> Self {
        Rotation { dim, matrix: Mat3::identity() }
    }

    /// Counter-clockwise rotation of the plane by `angle`.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation { dim: Dim::Two, matrix: Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0) }
    }

    /// `R_z(alpha) R_y(beta) R_z(gamma)`.
    pub fn euler_zyz(alpha: f64, beta: f64, gamma: f64) -> Self {
        let rz = |t: f64| {
            let (s, c) = t.sin_cos();
            Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
        };
        let (sb, cb) = beta.sin_cos();
        let ry = Mat3::new(cb, 0.0, sb, 0.0, 1.0, 0.0, -sb, 0.0, cb);
        Rotation { dim: Dim::Three, matrix: rz(alpha) * ry * rz(gamma) }
    }

    /// Validates orthogonality and `det = 1`. Planar matrices must be
    /// embedded as `diag(R, 1)`.
    pub fn from_matrix(dim: Dim, matrix: Mat3) -> Result<Self> {
        if dim == Dim::Two {
            let off = matrix[(0, 2)].abs()
                + matrix[(1, 2)].abs()
                + matrix[(2, 0)].abs()
                + matrix[(2, 1)].abs()
                + (matrix[(2, 2)] - 1.0).abs();
            if off > ORTHOGONALITY_TOL {
                return Err(Error::InvalidRotation("planar rotation must not touch the third coordinate".into()));
            }
        }
        let defect = (matrix * matrix.transpose() - Mat3::identity()).abs().max();
        if !(defect <= ORTHOGONALITY_TOL) {
            return Err(Error::InvalidRotation(format!("R Rᵀ deviates from the identity by {defect:e}")));
        }
        let det = matrix.determinant();
        if (det - 1.0).abs() > ORTHOGONALITY_TOL {
            return Err(Error::InvalidRotation(format!("determinant is {det}")));
        }
        Ok(Rotation { dim, matrix })
    }

    /// Builds a rotation from the rows of an `n × n` matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = Dim::new(rows.len())?;
        Rotation::from_matrix(dim, embed_rows(dim, rows)?)
    }

    /// Haar-distributed random rotation.
    pub fn random<R: Rng + ?Sized>(dim: Dim, rng: &mut R) -> Self {
        match dim {
            Dim::Two => Rotation::planar(rng.random_range(0.0..std::f64::consts::TAU)),
            Dim::Three => {
                // Shoemake's uniform quaternion.
                let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
                let tau = std::f64::consts::TAU;
                let a = (1.0 - u1).sqrt();
                let b = u1.sqrt();
                let q = nalgebra::Quaternion::new(
                    b * (tau * u3).cos(),
                    a * (tau * u2).sin(),
                    a * (tau * u2).cos(),
                    b * (tau * u3).sin(),
                );
                let unit = UnitQuaternion::from_quaternion(q);
                Rotation { dim, matrix: *unit.to_rotation_matrix().matrix() }
            }
        }
    }

    /// A rotation taking the unit vector `from` to the unit vector `to`.
    pub fn aligning(dim: Dim, from: &Vec3, to: &Vec3) -> Self {
        match dim {
            Dim::Two => Rotation::planar(to.y.atan2(to.x) - from.y.atan2(from.x)),
            Dim::Three => match Rotation3::rotation_between(from, to) {
                Some(r) => Rotation { dim, matrix: *r.matrix() },
                None => {
                    // Antiparallel: half turn about any axis orthogonal to `from`.
                    let helper = if from.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
                    let axis = nalgebra::Unit::new_normalize(from.cross(&helper));
                    let r = Rotation3::from_axis_angle(&axis, std::f64::consts::PI);
                    Rotation { dim, matrix: *r.matrix() }
                }
            },
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.matrix * v
    }

    pub fn apply_inverse(&self, v: &Vec3) -> Vec3 {
        self.matrix.tr_mul(v)
    }

    pub fn inverse(&self) -> Self {
        Rotation { dim: self.dim, matrix: self.matrix.transpose() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Rotation) -> Self {
        Rotation { dim: self.dim, matrix: self.matrix * other.matrix }
    }

    /// Angle for planar rotations, ZYZ Euler angles in space.
    pub fn angles(&self) -> Vec<f64> {
        let m = &self.matrix;
        match self.dim {
            Dim::Two => vec![m[(1, 0)].atan2(m[(0, 0)])],
            Dim::Three => {
                let beta = m[(2, 2)].clamp(-1.0, 1.0).acos();
                if beta.sin().abs() > 1e-12 {
                    let alpha = m[(1, 2)].atan2(m[(0, 2)]);
                    let gamma = m[(2, 1)].atan2(-m[(2, 0)]);
                    vec![alpha, beta, gamma]
                } else {
                    // Gimbal lock: only alpha ± gamma is determined.
                    let alpha = m[(1, 0)].atan2(m[(0, 0)]);
                    vec![alpha, beta, 0.0]
                }
            }
        }
    }

    /// The active `n × n` block, row-major.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        active_rows(self.dim, &self.matrix)
    }
}

#[derive(Serialize, Deserialize)]
struct RotationRepr {
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<RotationRepr> for Rotation {
    type Error = Error;

    fn try_from(r: RotationRepr) -> Result<Self> {
        Rotation::from_rows(&r.matrix)
    }
}

impl From<Rotation> for RotationRepr {
    fn from(r: Rotation) -> Self {
        RotationRepr { matrix: r.rows() }
    }
}

/// Embeds the rows of an `n × n` matrix into a 3×3 matrix (`diag(A, 1)` for
/// `n = 2`).
pub fn embed_rows(dim: Dim, rows: &[Vec<f64>]) -> Result<Mat3> {
    let n = dim.get();
    if rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
    }
    let mut m = Mat3::identity();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::InvalidArgument(format!("matrix entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = x;
        }
    }
    Ok(m)
}

pub fn active_rows(dim: Dim, m: &Mat3) -> Vec<Vec<f64>> {
    let n = dim.get();
    (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
}

/// Determinant of the active block.
pub fn active_det(dim: Dim, m: &Mat3) -> f64 {
    match dim {
        Dim::Two => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        Dim::Three => m.determinant(),
    }
}

/// Spectral norm of the active block.
pub fn operator_norm(dim: Dim, m: &Mat3) -> f64 {
    match dim {
        Dim::Two => {
            let block = nalgebra::Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            block.singular_values().max()
        }
        Dim::Three => m.singular_values().max(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn euler_angles_round_trip() {
        let r = Rotation::euler_zyz(0.4, 1.1, -2.3);
        let a = r.angles();
        let back = Rotation::euler_zyz(a[0], a[1], a[2]);
        assert!((back.matrix() - r.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn rejects_reflections_and_non_orthogonal() {
        assert!(Rotation::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).is_err());
        assert!(Rotation::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).is_err());
        assert!(Rotation::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).is_ok());
    }

    #[test]
    fn aligning_maps_source_to_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [Dim::Two, Dim::Three] {
            for _ in 0..20 {
                let a = Rotation::random(dim, &mut rng).apply(&Vec3::x());
                let b = Rotation::random(dim, &mut rng).apply(&Vec3::x());
                let r = Rotation::aligning(dim, &a, &b);
                assert!((r.apply(&a) - b).norm() < 1e-12);
                assert!(Rotation::from_matrix(dim, *r.matrix()).is_ok());
            }
            let r = Rotation::aligning(dim, &Vec3::x(), &(-Vec3::x()));
            assert!((r.apply(&Vec3::x()) + Vec3::x()).norm() < 1e-12);
        }
    }

    #[test]
    fn random_rotations_are_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let r = Rotation::random(Dim::Three, &mut rng);
            assert!(Rotation::from_matrix(Dim::Three, *r.matrix()).is_ok());
        }
    }
}
