//! Fixtures and closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotminkowski::bodies::convex_hull_2d;
use rotminkowski::{ConvexBody, Dim, HarmonicExpansion, Vec3};
use std::f64::consts::{PI, TAU};

pub fn p2(x: f64, y: f64) -> Vec3 {
    Vec3::new(x, y, 0.0)
}

pub fn dir2(phi: f64) -> Vec3 {
    Vec3::new(phi.cos(), phi.sin(), 0.0)
}

/// Triangle with an angle of `arctan 2` at the origin.
pub fn irrational_triangle() -> ConvexBody {
    ConvexBody::polytope(Dim::Two, vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(0.5, 1.0)]).unwrap()
}

pub fn right_triangle() -> ConvexBody {
    ConvexBody::polytope(Dim::Two, vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0)]).unwrap()
}

/// Five points with radii in `[0.5, 1]` at sorted random angles, redrawn
/// until all five are hull vertices.
pub fn random_pentagon(seed: u64) -> ConvexBody {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut angles: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let pts: Vec<Vec3> = angles.iter().map(|&a| dir2(a) * rng.random_range(0.5..1.0)).collect();
        if convex_hull_2d(&pts).len() == 5 {
            return ConvexBody::polytope(Dim::Two, pts).unwrap();
        }
    }
}

/// `h = 1 + 0.1 cos 3φ`, a body of constant width.
pub fn constant_width() -> ConvexBody {
    let terms = HarmonicExpansion::from_terms(Dim::Two, 3, [(3, 1, 0.1 * PI.sqrt())]).unwrap();
    ConvexBody::harmonic(1.0, terms).unwrap()
}

pub fn vertices(body: &ConvexBody) -> Vec<Vec3> {
    match body {
        ConvexBody::Polytope { vertices, .. } => convex_hull_2d(vertices),
        ConvexBody::Segment { endpoints, .. } => endpoints.to_vec(),
        _ => panic!("not a polygon"),
    }
}

/// Hull vertices with the arcs `[start, end]` of outer normal angles on
/// which each is the maximizer.
fn normal_cones(verts: &[Vec3]) -> Vec<(Vec3, f64, f64)> {
    let k = verts.len();
    if k == 1 {
        return vec![(verts[0], 0.0, TAU)];
    }
    let normal_angle = |a: &Vec3, b: &Vec3| {
        let d = b - a;
        d.y.atan2(d.x) - PI / 2.0
    };
    (0..k)
        .map(|i| {
            let prev = &verts[(i + k - 1) % k];
            let next = &verts[(i + 1) % k];
            let start = normal_angle(prev, &verts[i]);
            let mut end = normal_angle(&verts[i], next);
            while end <= start {
                end += TAU;
            }
            (verts[i], start, end)
        })
        .collect()
}

// ∫_a^b cos(kφ) dφ and ∫_a^b sin(kφ) dφ for integer k (possibly ≤ 0).
fn int_cos(k: i64, a: f64, b: f64) -> f64 {
    if k == 0 {
        b - a
    } else {
        let k = k as f64;
        ((k * b).sin() - (k * a).sin()) / k
    }
}

fn int_sin(k: i64, a: f64, b: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        let k = k as f64;
        ((k * a).cos() - (k * b).cos()) / k
    }
}

/// `(∫ h cos mφ dφ, ∫ h sin mφ dφ)` for a convex polygon, in closed form.
pub fn polygon_fourier(verts: &[Vec3], m: usize) -> (f64, f64) {
    let m = m as i64;
    let (mut c, mut s) = (0.0, 0.0);
    for (v, a, b) in normal_cones(verts) {
        // h = x cos φ + y sin φ on the cone.
        c += v.x * 0.5 * (int_cos(m - 1, a, b) + int_cos(m + 1, a, b))
            + v.y * 0.5 * (int_sin(m + 1, a, b) - int_sin(m - 1, a, b));
        s += v.x * 0.5 * (int_sin(m + 1, a, b) + int_sin(m - 1, a, b))
            + v.y * 0.5 * (int_cos(m - 1, a, b) - int_cos(m + 1, a, b));
    }
    (c, s)
}

/// `(h, Y_{mj})` for a polygon in the fixed planar basis.
pub fn polygon_coefficients(verts: &[Vec3], m: usize) -> Vec<f64> {
    let (c, s) = polygon_fourier(verts, m);
    if m == 0 {
        vec![c / TAU.sqrt()]
    } else {
        vec![c / PI.sqrt(), s / PI.sqrt()]
    }
}

/// Steiner point of a polygon: vertices weighted by their normal-cone angle.
pub fn polygon_steiner(verts: &[Vec3]) -> Vec3 {
    normal_cones(verts).iter().map(|(v, a, b)| v * ((b - a) / TAU)).sum()
}

/// Mean width of a polygon: perimeter / π.
pub fn polygon_mean_width(verts: &[Vec3]) -> f64 {
    let k = verts.len();
    let perimeter: f64 = (0..k).map(|i| (verts[(i + 1) % k] - verts[i]).norm()).sum();
    perimeter / PI
}
