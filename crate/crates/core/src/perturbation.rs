//! Linear maps near the identity that make a body (centrally) universal.
//!
//! Three searches are offered: a scan along `A(λ) = diag(1, λ, …, λ)`, a
//! seeded random search over `Id + E` with `‖E‖ ≤ ε`, and, for spatial
//! bodies, a planar search on a non-symmetric shadow followed by a scan in
//! the remaining axis. Every candidate is certified a posteriori.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::analysis::{expand, steiner_point, UniversalityCertificate};
use crate::bodies::ConvexBody;
use crate::harmonics::{eval_harmonic, HarmonicIndex};
use crate::rotation::{active_det, active_rows, operator_norm};
use crate::sphere_quadrature::SphereQuadrature;
use crate::{compensated_sum, Dim, Error, Mat3, Result, Rotation, Vec3};

pub const DEFAULT_SAMPLE_COUNT: usize = 64;
pub const DEFAULT_INTERVAL_END: f64 = 2.0;

/// Diagonal scaling family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `diag(1, λ, …, λ)`.
    AxisScale1,
    /// `diag(1, 1, λ, …, λ)`; spatial bodies only.
    AxisScale2,
    /// `Id + E` with random `E`.
    RandomNearIdentity,
}

impl Family {
    /// `A(λ)` for the axis families.
    pub fn matrix(self, dim: Dim, lambda: f64) -> Result<Mat3> {
        match (self, dim) {
            (Family::AxisScale1, Dim::Two) => Ok(Mat3::from_diagonal(&Vec3::new(1.0, lambda, 1.0))),
            (Family::AxisScale1, Dim::Three) => Ok(Mat3::from_diagonal(&Vec3::new(1.0, lambda, lambda))),
            (Family::AxisScale2, Dim::Three) => Ok(Mat3::from_diagonal(&Vec3::new(1.0, 1.0, lambda))),
            (Family::AxisScale2, Dim::Two) => Err(Error::InvalidArgument("diag(1, 1, λ) needs dimension 3".into())),
            (Family::RandomNearIdentity, _) => {
                Err(Error::InvalidArgument("the random family has no scalar parameter".into()))
            }
        }
    }
}

/// Orders a search must make nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    /// All orders.
    Universal,
    /// Even orders.
    Central,
}

impl Goal {
    fn required(self, m: usize) -> bool {
        match self {
            Goal::Universal => true,
            Goal::Central => m % 2 == 0,
        }
    }

    fn passes(self, norms: &[f64], tau: f64) -> bool {
        norms.iter().enumerate().all(|(m, &x)| !self.required(m) || x > tau)
    }

    fn failing(self, norms: &[f64], tau: f64) -> Vec<usize> {
        (0..norms.len()).filter(|&m| self.required(m) && !(norms[m] > tau)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sample {
    /// `λ` for the axis families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    /// Row-major matrix in the input frame.
    pub matrix: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Winner {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    pub matrix: Vec<Vec<f64>>,
    pub certificate: UniversalityCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSearchReport {
    pub body_id: String,
    pub family: Family,
    pub goal: Goal,
    pub m_max: usize,
    pub tau: f64,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Rotation applied before scaling (axis families), row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alignment: Option<Vec<Vec<f64>>>,
    /// Draws discarded for `‖E‖ > ε` or `det ≤ 0` (random family).
    #[serde(default)]
    pub rejected_draws: usize,
    pub samples: Vec<Sample>,
    pub winner: Option<Winner>,
    /// Operator-norm distance of the winner to the identity.
    pub distance_to_identity: Option<f64>,
}

impl PerturbationSearchReport {
    /// The winner, or an error naming the orders that failed in the sample
    /// closest to passing.
    pub fn require_winner(&self) -> Result<&Winner> {
        self.winner.as_ref().ok_or_else(|| {
            let best = self
                .samples
                .iter()
                .map(|s| self.goal.failing(&s.norms, self.tau))
                .min_by_key(|f| f.len())
                .unwrap_or_default();
            Error::NoPasser(format!(
                "{} samples, none certified at tau = {:e}; best sample fails orders {best:?}",
                self.samples.len(),
                self.tau
            ))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `sample,parameter,m,norm` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample,parameter,m,norm\n");
        for (k, s) in self.samples.iter().enumerate() {
            let p = s.parameter.map(crate::io::fmt_f64).unwrap_or_default();
            for (m, n) in s.norms.iter().enumerate() {
                out.push_str(&format!("{k},{p},{m},{}\n", crate::io::fmt_f64(*n)));
            }
        }
        out
    }
}

/// `(h_{A(λ)K}, Y_{mj})`.
pub fn f_mj(body: &ConvexBody, m: usize, j: usize, lambda: f64, family: Family, q: &SphereQuadrature) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("λ must be positive, got {lambda}")));
    }
    let dim = body.dim();
    let idx = HarmonicIndex::new(dim, m, j)?;
    let a = family.matrix(dim, lambda)?;
    Ok(q.integrate(|u| body.support(&a.tr_mul(u)) * eval_harmonic(dim, idx, u).expect("validated")))
}

/// Whether `K` is centrally symmetric, tested as
/// `h(u) − ⟨s, u⟩ = h(−u) + ⟨s, u⟩` on the nodes of `q` with `s` the Steiner
/// point.
pub fn is_symmetric(body: &ConvexBody, q: &SphereQuadrature) -> bool {
    let s = steiner_point(body, q);
    let h = q.sample(|u| body.support(u));
    let scale = h.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    q.nodes().iter().zip(&h).all(|(u, hu)| (hu - s.dot(u) - body.support(&-u) - s.dot(u)).abs() <= 1e-9 * scale)
}

/// Rotation taking the direction of largest width to `e₁` (identity when
/// `e₁` already attains it), and that width.
fn widest_alignment(body: &ConvexBody, q: &SphereQuadrature) -> (Rotation, f64) {
    let dim = body.dim();
    let width = |u: &Vec3| body.support(u) + body.support(&-u);
    let (best, w) = q.nodes().iter().map(|u| (*u, width(u))).fold((Vec3::x(), f64::NEG_INFINITY), |acc, x| {
        if x.1 > acc.1 {
            x
        } else {
            acc
        }
    });
    let w1 = width(&Vec3::x());
    if w1 >= w - 1e-12 {
        (Rotation::identity(dim), w1)
    } else {
        (Rotation::aligning(dim, &best, &Vec3::x()), w)
    }
}

fn norms_of(body: &ConvexBody, m_max: usize, q: &SphereQuadrature) -> Result<Vec<f64>> {
    let e = expand(body, m_max, q)?;
    Ok((0..=m_max).map(|m| e.order_norm(m)).collect())
}

pub struct ScanOptions {
    pub goal: Goal,
    pub family: Family,
    pub m_max: usize,
    pub tau: f64,
    pub epsilon: f64,
    /// Right end `a` of the admissible interval `(0, a)`.
    pub interval_end: f64,
    pub sample_count: usize,
}

impl ScanOptions {
    pub fn new(goal: Goal, m_max: usize, tau: f64, epsilon: f64) -> Self {
        ScanOptions {
            goal,
            family: Family::AxisScale1,
            m_max,
            tau,
            epsilon,
            interval_end: DEFAULT_INTERVAL_END,
            sample_count: DEFAULT_SAMPLE_COUNT,
        }
    }
}

/// Equispaced `λ` in `[1 − ε, 1 + ε] ∩ (0, a)`.
pub fn lambda_samples(epsilon: f64, interval_end: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = (1.0 - epsilon, 1.0 + epsilon);
    let grid: Vec<f64> = match count {
        0 => vec![],
        1 => vec![1.0],
        _ => (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect(),
    };
    grid.into_iter().filter(|&l| l > 0.0 && l < interval_end).collect()
}

/// Scans `λ ↦ A(λ)K` and picks the certified `λ` closest to 1.
///
/// The body is first rotated so that its widest direction is `e₁`; the
/// reported matrices are conjugated back to the input frame.
pub fn scan_lambda(body: &ConvexBody, opts: &ScanOptions, q: &SphereQuadrature) -> Result<PerturbationSearchReport> {
    let dim = body.dim();
    if !(opts.epsilon > 0.0) || !(opts.tau > 0.0) {
        return Err(Error::InvalidArgument("ε and τ must be positive".into()));
    }
    if !(opts.interval_end > 1.0) {
        return Err(Error::InvalidArgument(format!("interval end must exceed 1, got {}", opts.interval_end)));
    }
    if opts.goal == Goal::Central && !is_symmetric(body, q) {
        return Err(Error::Precondition(
            "the even-order scan expects a centrally symmetric body; use the random search for other bodies".into(),
        ));
    }
    let (align, width) = widest_alignment(body, q);
    if !(width > 1e-12) {
        return Err(Error::Precondition("the body's shadow on its widest axis is a single point".into()));
    }
    let aligned = ConvexBody::linear_image(*align.matrix(), body.clone())?;
    let mut samples = Vec::new();
    for lambda in lambda_samples(opts.epsilon, opts.interval_end, opts.sample_count) {
        let a = opts.family.matrix(dim, lambda)?;
        let image = ConvexBody::linear_image(a, aligned.clone())?;
        let norms = norms_of(&image, opts.m_max, q)?;
        let back = align.matrix().transpose() * a * align.matrix();
        samples.push(Sample {
            parameter: Some(lambda),
            matrix: active_rows(dim, &back),
            passed: opts.goal.passes(&norms, opts.tau),
            norms,
        });
    }
    let best = samples
        .iter()
        .filter(|s| s.passed)
        .min_by(|a, b| (a.parameter.unwrap() - 1.0).abs().total_cmp(&(b.parameter.unwrap() - 1.0).abs()));
    let (winner, distance) = match best {
        Some(s) => {
            let cert = UniversalityCertificate::from_norms("winner", dim, s.norms.clone(), opts.tau)?;
            let lambda = s.parameter.unwrap();
            (
                Some(Winner { parameter: Some(lambda), matrix: s.matrix.clone(), certificate: cert }),
                Some((lambda - 1.0).abs()),
            )
        }
        None => (None, None),
    };
    Ok(PerturbationSearchReport {
        body_id: "body".into(),
        family: opts.family,
        goal: opts.goal,
        m_max: opts.m_max,
        tau: opts.tau,
        epsilon: opts.epsilon,
        seed: None,
        alignment: (align != Rotation::identity(dim)).then(|| align.rows()),
        rejected_draws: 0,
        samples,
        winner,
        distance_to_identity: distance,
    })
}

pub struct RandomSearchOptions {
    pub goal: Goal,
    pub m_max: usize,
    pub tau: f64,
    pub epsilon: f64,
    pub attempts: usize,
    pub seed: u64,
}

/// Certifies `Id`, then `Id + E` with entries of `E` uniform in `[−ε, ε]`,
/// until one passes. Draws with `‖E‖ > ε` or `det(Id + E) ≤ 0` are
/// discarded and do not count as attempts.
pub fn find_universal_image(
    body: &ConvexBody,
    opts: &RandomSearchOptions,
    q: &SphereQuadrature,
) -> Result<PerturbationSearchReport> {
    let dim = body.dim();
    if !(opts.epsilon > 0.0) || !(opts.tau > 0.0) {
        return Err(Error::InvalidArgument("ε and τ must be positive".into()));
    }
    if opts.attempts == 0 {
        return Err(Error::InvalidArgument("at least one attempt is needed".into()));
    }
    match opts.goal {
        Goal::Universal if is_symmetric(body, q) => {
            return Err(Error::Precondition(
                "the body is centrally symmetric, so every linear image of it has vanishing odd orders \
                 m >= 3 and none is universal; the universal goal needs a non-symmetric body"
                    .into(),
            ))
        }
        _ => {}
    }
    if !(crate::analysis::mean_width(body, q) > 1e-12) {
        return Err(Error::Precondition("the body is a single point".into()));
    }
    let n = dim.get();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples = Vec::new();
    let mut rejected = 0usize;
    let mut winner = None;
    let max_draws = 1000 * opts.attempts;
    let mut draws = 0;
    while samples.len() < opts.attempts {
        let a = if samples.is_empty() {
            Mat3::identity()
        } else {
            if draws >= max_draws {
                break;
            }
            draws += 1;
            let mut e = Mat3::zeros();
            for i in 0..n {
                for j in 0..n {
                    e[(i, j)] = rng.random_range(-opts.epsilon..=opts.epsilon);
                }
            }
            let a = Mat3::identity() + e;
            if operator_norm(dim, &e) > opts.epsilon || active_det(dim, &a) <= 0.0 {
                rejected += 1;
                continue;
            }
            a
        };
        let image = ConvexBody::linear_image(a, body.clone())?;
        let norms = norms_of(&image, opts.m_max, q)?;
        let passed = opts.goal.passes(&norms, opts.tau);
        let rows = active_rows(dim, &a);
        if passed {
            let cert = UniversalityCertificate::from_norms("winner", dim, norms.clone(), opts.tau)?;
            winner = Some((
                Winner { parameter: None, matrix: rows.clone(), certificate: cert },
                operator_norm(dim, &(a - Mat3::identity())),
            ));
        }
        samples.push(Sample { parameter: None, matrix: rows, norms, passed });
        if passed {
            break;
        }
    }
    let (winner, distance) = match winner {
        Some((w, d)) => (Some(w), Some(d)),
        None => (None, None),
    };
    Ok(PerturbationSearchReport {
        body_id: "body".into(),
        family: Family::RandomNearIdentity,
        goal: opts.goal,
        m_max: opts.m_max,
        tau: opts.tau,
        epsilon: opts.epsilon,
        seed: Some(opts.seed),
        alignment: None,
        rejected_draws: rejected,
        samples,
        winner,
        distance_to_identity: distance,
    })
}

/// Shadow of a spatial body on a coordinate plane.
pub fn project_to_plane(body: &ConvexBody, axes: [usize; 2]) -> Result<ConvexBody> {
    body.project_to_plane(axes)
}

/// Result of the planar search followed by the scan in the remaining axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub axes: [usize; 2],
    pub planar: PerturbationSearchReport,
    pub lift: PerturbationSearchReport,
}

/// Universal image of a spatial body: find a coordinate plane with a
/// non-symmetric shadow, make the shadow universal by a planar map `B`
/// (budget `ε/3`), then scan `λ` on the remaining axis of `B ⊕ λ`
/// (budget `ε/3`).
pub fn find_universal_image_lifted(
    body: &ConvexBody,
    opts: &RandomSearchOptions,
    q3: &SphereQuadrature,
    q2: &SphereQuadrature,
) -> Result<LiftReport> {
    if body.dim() != Dim::Three || q3.dim() != Dim::Three || q2.dim() != Dim::Two {
        return Err(Error::InvalidArgument(
            "the lifted search needs a spatial body, a spatial and a planar rule".into(),
        ));
    }
    let axes = [[0, 1], [0, 2], [1, 2]]
        .into_iter()
        .find(|&ax| body.project_to_plane(ax).map(|s| !is_symmetric(&s, q2)).unwrap_or(false))
        .ok_or_else(|| {
            Error::Precondition("every coordinate shadow of the body is symmetric; rotate the body first".into())
        })?;
    let shadow = body.project_to_plane(axes)?;
    let planar_opts = RandomSearchOptions { goal: Goal::Universal, epsilon: opts.epsilon / 3.0, ..*opts };
    let planar = find_universal_image(&shadow, &planar_opts, q2)?;
    let b = planar.require_winner()?.matrix.clone();
    let k = 3 - axes[0] - axes[1];
    let mut base = Mat3::identity();
    for (r, &i) in axes.iter().enumerate() {
        for (c, &j) in axes.iter().enumerate() {
            base[(i, j)] = b[r][c];
        }
    }
    let eps = opts.epsilon / 3.0;
    let mut samples = Vec::new();
    for lambda in lambda_samples(eps, DEFAULT_INTERVAL_END, DEFAULT_SAMPLE_COUNT) {
        let mut a = base;
        a[(k, k)] = lambda;
        let image = ConvexBody::linear_image(a, body.clone())?;
        let norms = norms_of(&image, opts.m_max, q3)?;
        samples.push(Sample {
            parameter: Some(lambda),
            matrix: active_rows(Dim::Three, &a),
            passed: opts.goal.passes(&norms, opts.tau),
            norms,
        });
    }
    let best = samples
        .iter()
        .filter(|s| s.passed)
        .min_by(|a, b| (a.parameter.unwrap() - 1.0).abs().total_cmp(&(b.parameter.unwrap() - 1.0).abs()));
    let (winner, distance) = match best {
        Some(s) => {
            let cert = UniversalityCertificate::from_norms("winner", Dim::Three, s.norms.clone(), opts.tau)?;
            let a = crate::rotation::embed_rows(Dim::Three, &s.matrix)?;
            let d = operator_norm(Dim::Three, &(a - Mat3::identity()));
            (Some(Winner { parameter: s.parameter, matrix: s.matrix.clone(), certificate: cert }), Some(d))
        }
        None => (None, None),
    };
    let lift = PerturbationSearchReport {
        body_id: "body".into(),
        family: Family::AxisScale2,
        goal: opts.goal,
        m_max: opts.m_max,
        tau: opts.tau,
        epsilon: opts.epsilon,
        seed: Some(opts.seed),
        alignment: None,
        rejected_draws: 0,
        samples,
        winner,
        distance_to_identity: distance,
    };
    Ok(LiftReport { axes, planar, lift })
}

/// `F_m(K, A) = ∫ h(AK, φ) e^{imφ} dφ` as `(re, im)`, for planar `K` and
/// `det A > 0`.
///
/// Evaluated after the substitution `v ↦ A⁻ᵀv`, which keeps the kinks of
/// `h(K, ·)` at fixed nodes as `A` varies:
/// `F_m(K, A) = det(A)⁻¹ ∫ h(K, v) Y̌(A⁻ᵀ v) dσ(v)` with
/// `Y̌(x) = |x|⁻³ (x/|x|)^m` in complex notation.
pub fn f_m(body: &ConvexBody, a: &Mat3, m: usize, q: &SphereQuadrature) -> Result<(f64, f64)> {
    let (det, inv_t) = planar_setup(body, a, q)?;
    let h = q.sample(|v| body.support(v));
    let mut re = Vec::with_capacity(q.len());
    let mut im = Vec::with_capacity(q.len());
    for (v, hv) in q.nodes().iter().zip(&h) {
        let x = inv_t * v;
        let r = x.norm();
        let (c, s) = power(x.x / r, x.y / r, m);
        let scale = hv / r.powi(3);
        re.push(scale * c);
        im.push(scale * s);
    }
    Ok((q.integrate_samples(&re) / det, q.integrate_samples(&im) / det))
}

/// `F_m` evaluated without the substitution, `∫ h(K, Aᵀu_φ) e^{imφ} dφ`.
pub fn f_m_direct(body: &ConvexBody, a: &Mat3, m: usize, q: &SphereQuadrature) -> Result<(f64, f64)> {
    planar_setup(body, a, q)?;
    let h = q.sample(|u| body.support(&a.tr_mul(u)));
    let (re, im): (Vec<f64>, Vec<f64>) = q
        .nodes()
        .iter()
        .zip(&h)
        .map(|(u, hv)| {
            let (c, s) = power(u.x, u.y, m);
            (hv * c, hv * s)
        })
        .unzip();
    Ok((q.integrate_samples(&re), q.integrate_samples(&im)))
}

fn planar_setup(body: &ConvexBody, a: &Mat3, q: &SphereQuadrature) -> Result<(f64, Mat3)> {
    if body.dim() != Dim::Two || q.dim() != Dim::Two {
        return Err(Error::InvalidArgument("F_m is defined for planar bodies".into()));
    }
    let a = crate::bodies::embedded_matrix(Dim::Two, a)?;
    let det = active_det(Dim::Two, &a);
    if !(det > 0.0) {
        return Err(Error::Precondition(format!("F_m needs det A > 0, got {det}")));
    }
    let inv_t = a.try_inverse().ok_or(Error::SingularMatrix { det })?.transpose();
    Ok((det, inv_t))
}

// Real and imaginary parts of (x + iy)^m.
fn power(x: f64, y: f64, m: usize) -> (f64, f64) {
    let (mut c, mut s) = (1.0, 0.0);
    for _ in 0..m {
        (c, s) = (c * x - s * y, c * y + s * x);
    }
    (c, s)
}

/// Central difference of `λ ↦ F_m(K, diag(1, λ))` at `λ = 1` against the
/// closed-form derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    /// `(F_m(1 + h) − F_m(1 − h)) / 2h`.
    pub lhs: (f64, f64),
    /// `2 F_m(K, Id) + integral_term`.
    pub rhs: (f64, f64),
    /// `−∫ h(K,ψ)[(3/2)e^{imψ} + ((3−m)/4)e^{i(m−2)ψ} + ((3+m)/4)e^{i(m+2)ψ}] dψ`.
    pub integral_term: (f64, f64),
    /// `F_m(K, Id)`.
    pub base_value: (f64, f64),
}

impl DerivativeCheck {
    pub fn error(&self) -> f64 {
        (self.lhs.0 - self.rhs.0).hypot(self.lhs.1 - self.rhs.1)
    }
}

/// Derivative of `F_m(K, diag(1, λ))` at `λ = 1`, numerically and in closed
/// form.
///
/// Differentiating `λ² ∫ h(K,ψ) (λ cos ψ + i sin ψ)^m (λ² cos²ψ + sin²ψ)^{−(m+3)/2} dψ`
/// gives `2 F_m(K, Id)` from the prefactor plus the integral term.
pub fn derivative_identity_check(
    body: &ConvexBody,
    m: usize,
    step: f64,
    q: &SphereQuadrature,
) -> Result<DerivativeCheck> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::InvalidArgument(format!("step must lie in (0, 1), got {step}")));
    }
    if m % 2 == 0 {
        return Err(Error::InvalidArgument(format!("the derivative check takes odd m, got {m}")));
    }
    let diag = |l: f64| Mat3::from_diagonal(&Vec3::new(1.0, l, 1.0));
    let fp = f_m(body, &diag(1.0 + step), m, q)?;
    let fm = f_m(body, &diag(1.0 - step), m, q)?;
    let base_value = f_m(body, &Mat3::identity(), m, q)?;
    let lhs = ((fp.0 - fm.0) / (2.0 * step), (fp.1 - fm.1) / (2.0 * step));
    let h = q.sample(|v| body.support(v));
    let mf = m as f64;
    let (c0, cm, cp) = (1.5, (3.0 - mf) / 4.0, (3.0 + mf) / 4.0);
    let mut re = Vec::with_capacity(q.len());
    let mut im = Vec::with_capacity(q.len());
    for (u, hv) in q.nodes().iter().zip(&h) {
        let psi = u.y.atan2(u.x);
        let wave = |k: f64| ((k * psi).cos(), (k * psi).sin());
        let (a, b, c) = (wave(mf), wave(mf - 2.0), wave(mf + 2.0));
        re.push(-hv * (c0 * a.0 + cm * b.0 + cp * c.0));
        im.push(-hv * (c0 * a.1 + cm * b.1 + cp * c.1));
    }
    let integral_term = (q.integrate_samples(&re), q.integrate_samples(&im));
    let rhs = (2.0 * base_value.0 + integral_term.0, 2.0 * base_value.1 + integral_term.1);
    Ok(DerivativeCheck { lhs, rhs, integral_term, base_value })
}

/// `|F_m(K, Id)|²` and `π (a_{m1}² + a_{m2}²)` (`2π a_{01}²` for `m = 0`).
pub fn f_m_consistency(body: &ConvexBody, m: usize, q: &SphereQuadrature) -> Result<(f64, f64)> {
    let (re, im) = f_m(body, &Mat3::identity(), m, q)?;
    let coeffs = crate::analysis::project(body, m, q)?;
    let scale = if m == 0 { 2.0 * PI } else { PI };
    Ok((re * re + im * im, scale * compensated_sum(coeffs.iter().map(|a| a * a))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_grid() {
        let g = lambda_samples(0.1, 2.0, 64);
        assert_eq!(g.len(), 64);
        assert!((g[0] - 0.9).abs() < 1e-15 && (g[63] - 1.1).abs() < 1e-15);
        assert!(lambda_samples(1.5, 2.0, 5).iter().all(|&l| l > 0.0 && l < 2.0));
    }

    #[test]
    fn segment_is_fixed_by_axis_scaling() {
        let s = ConvexBody::segment(Dim::Two, Vec3::new(-1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let q = SphereQuadrature::new(Dim::Two, 1 << 12);
        let f1 = f_mj(&s, 2, 1, 1.0, Family::AxisScale1, &q).unwrap();
        let f2 = f_mj(&s, 2, 1, 0.6, Family::AxisScale1, &q).unwrap();
        assert_eq!(f1, f2);
        assert!(f_mj(&s, 2, 1, 0.0, Family::AxisScale1, &q).is_err());
    }

    #[test]
    fn symmetry_test() {
        let q = SphereQuadrature::new(Dim::Two, 256);
        let square =
            ConvexBody::polytope_from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]])
                .unwrap();
        assert!(is_symmetric(&square, &q));
        let tri = ConvexBody::polytope_from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!is_symmetric(&tri, &q));
    }

    #[test]
    fn ball_rejected_for_universal_goal() {
        let q = SphereQuadrature::new(Dim::Two, 64);
        let opts =
            RandomSearchOptions { goal: Goal::Universal, m_max: 8, tau: 1e-8, epsilon: 0.1, attempts: 10, seed: 1 };
        assert!(matches!(
            find_universal_image(&ConvexBody::unit_ball(Dim::Two), &opts, &q),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn f_m_routes_agree_and_reject_bad_det() {
        let k = ConvexBody::harmonic_with_minimal_constant(
            crate::HarmonicExpansion::from_terms(Dim::Two, 3, [(2, 1, 0.2), (3, 2, 0.1)]).unwrap(),
        )
        .unwrap();
        let q = SphereQuadrature::new(Dim::Two, 512);
        let a = Mat3::new(1.1, 0.2, 0.0, -0.1, 0.95, 0.0, 0.0, 0.0, 1.0);
        for m in 0..6 {
            let p = f_m(&k, &a, m, &q).unwrap();
            let d = f_m_direct(&k, &a, m, &q).unwrap();
            assert!((p.0 - d.0).abs() < 1e-12 && (p.1 - d.1).abs() < 1e-12, "m={m}");
        }
        let flip = Mat3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0));
        assert!(f_m(&k, &flip, 2, &q).is_err());
    }
}
