//! Command-line front end for `rotminkowski`.
//!
//! A run is described by a [`RunConfig`], assembled from an optional JSON
//! config file and command-line flags (flags win). [`run`] resolves
//! defaults, executes the command and returns the rendered output together
//! with an exit code: 0 on success, 1 for input errors, 2 when the
//! computation ran but a tolerance or search goal was not met.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rotminkowski::analysis::{
    certify_named, closed_form_steiner_and_width, expand, mean_width, project, required_degree, steiner_point,
    DEFAULT_M_MAX, DEFAULT_TAU,
};
use rotminkowski::bodies::verify_lemma2;
use rotminkowski::decomposition::{
    decompose, profile_generator, projection_identity_check, residual_report, ProfileVariant,
};
use rotminkowski::harmonics::order_values;
use rotminkowski::io::{fmt_f64, parse_matrix};
use rotminkowski::perturbation::{find_universal_image, scan_lambda, Family, Goal, RandomSearchOptions, ScanOptions};
use rotminkowski::rotation::embed_rows;
use rotminkowski::{ConvexBody, Dim, Error, RotationQuadrature, SphereQuadrature, Vec3};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const DEFAULT_EPSILON: f64 = 0.1;
const DEFAULT_ATTEMPTS: usize = 100;
const DEFAULT_PLANAR_DEGREE: usize = 1 << 14;
const MIN_SPATIAL_DEGREE: usize = 64;
const DEFAULT_PLANAR_ROTATIONS: usize = 1024;
const DEFAULT_DECOMPOSE_TOLERANCE: f64 = 1e-3;
const DEFAULT_VERIFY_TOLERANCE: f64 = 1e-6;
const DEFAULT_ORDER: usize = 2;
const FORM1_PLANAR_GRID: usize = 360;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Expand,
    Certify,
    Decompose,
    Perturb,
    ScanF,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Lemma2,
    Form1,
    Steiner,
    Meanwidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GoalArg {
    Universal,
    Central,
}

impl From<GoalArg> for Goal {
    fn from(g: GoalArg) -> Goal {
        match g {
            GoalArg::Universal => Goal::Universal,
            GoalArg::Central => Goal::Central,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    /// diag(1, λ[, λ])
    AxisScale1,
    /// diag(1, 1, λ)
    AxisScale2,
}

/// Everything a run needs. Absent fields take command-specific defaults;
/// the resolved config is echoed into every output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<GoalArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            command,
            check,
            body,
            generator,
            target,
            m_max,
            tau,
            epsilon,
            seed,
            attempts,
            rotations,
            sphere_degree,
            out,
            format,
            goal,
            family,
            matrix,
            m,
            j,
            tolerance
        )
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rotmink",
    version,
    about = "Harmonic analysis and rotational Minkowski decompositions of convex bodies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandArg>,
    /// JSON run config; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum CommandArg {
    /// Spherical-harmonic coefficients of a body.
    Expand,
    /// Per-order norms and universality verdicts.
    Certify,
    /// Write a target as L + T1 = T2 from rotated copies of a generator.
    Decompose,
    /// Random search for a (centrally) universal linear image near the identity.
    Perturb,
    /// Scan the diagonal family A(λ) for a (centrally) universal image.
    ScanF,
    /// Check an identity numerically.
    Verify {
        #[arg(value_enum)]
        check: Check,
    },
}

#[derive(Debug, Default, Args)]
pub struct Options {
    /// Body JSON file.
    #[arg(long, global = true)]
    pub body: Option<PathBuf>,
    /// Generator body JSON file (decompose).
    #[arg(long, global = true)]
    pub generator: Option<PathBuf>,
    /// Target body JSON file (decompose).
    #[arg(long, global = true)]
    pub target: Option<PathBuf>,
    /// Highest harmonic order.
    #[arg(long, global = true)]
    pub m_max: Option<usize>,
    /// Threshold below which an order norm counts as zero.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Search radius around the identity.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Random search seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random search sample count.
    #[arg(long, global = true)]
    pub attempts: Option<usize>,
    /// Rotation rule size (planar angles, or about this many Euler triples).
    #[arg(long, global = true)]
    pub rotations: Option<usize>,
    /// Exact polynomial degree of the sphere rule.
    #[arg(long, global = true)]
    pub sphere_degree: Option<usize>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Which certificate the search must pass.
    #[arg(long, global = true, value_enum)]
    pub goal: Option<GoalArg>,
    /// Diagonal family for scan-f.
    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyArg>,
    /// Square matrix, rows separated by ';' and entries by ',' (e.g. "1,0;0,1.3").
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// Order for verify lemma2 and the highest order for verify form1.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Basis index for verify lemma2.
    #[arg(long, global = true)]
    pub j: Option<usize>,
    /// Pass threshold for decompose and verify.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

impl Cli {
    /// The config file (if any) overlaid with the flags.
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::from_json(&read(path)?)?,
            None => RunConfig::default(),
        };
        let (command, check) = match &self.command {
            None => (None, None),
            Some(CommandArg::Expand) => (Some(Command::Expand), None),
            Some(CommandArg::Certify) => (Some(Command::Certify), None),
            Some(CommandArg::Decompose) => (Some(Command::Decompose), None),
            Some(CommandArg::Perturb) => (Some(Command::Perturb), None),
            Some(CommandArg::ScanF) => (Some(Command::ScanF), None),
            Some(CommandArg::Verify { check }) => (Some(Command::Verify), Some(*check)),
        };
        let o = &self.options;
        Ok(base.merged(RunConfig {
            command,
            check,
            body: o.body.clone(),
            generator: o.generator.clone(),
            target: o.target.clone(),
            m_max: o.m_max,
            tau: o.tau,
            epsilon: o.epsilon,
            seed: o.seed,
            attempts: o.attempts,
            rotations: o.rotations,
            sphere_degree: o.sphere_degree,
            out: o.out.clone(),
            format: o.format,
            goal: o.goal,
            family: o.family,
            matrix: o.matrix.clone(),
            m: o.m,
            j: o.j,
            tolerance: o.tolerance,
        }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, unreadable or malformed files, violated preconditions.
    Input(String),
    /// The computation ran but missed its tolerance or goal.
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Tolerance(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Tolerance(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResidualTooLarge { .. } | Error::NoPasser(_) => CliError::Tolerance(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Rendered output of a run. `failure` is set when the output is complete
/// but the run must still exit non-zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub config: RunConfig,
    pub text: String,
    pub failure: Option<CliError>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, CliError::exit_code)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Reads and builds a body spec; errors name the file and the failing
/// line/column or field path.
pub fn load_body(path: &Path) -> Result<ConvexBody, CliError> {
    ConvexBody::from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
    value.as_ref().ok_or_else(|| CliError::Input(format!("missing --{flag}")))
}

fn sphere_rule(dim: Dim, m_max: usize, degree: Option<usize>) -> SphereQuadrature {
    let floor = required_degree(m_max);
    let degree = degree.unwrap_or(match dim {
        Dim::Two => DEFAULT_PLANAR_DEGREE,
        Dim::Three => MIN_SPATIAL_DEGREE,
    });
    SphereQuadrature::new(dim, degree.max(floor))
}

fn rotation_rule(dim: Dim, min_order: usize, count: Option<usize>) -> RotationQuadrature {
    match (count, dim) {
        (Some(c), _) => RotationQuadrature::with_count(dim, c),
        (None, Dim::Two) => RotationQuadrature::planar(DEFAULT_PLANAR_ROTATIONS.max(2 * min_order + 1)),
        (None, Dim::Three) => RotationQuadrature::new(dim, min_order + 8),
    }
}

fn body_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| "body".into(), |s| s.to_string_lossy().into_owned())
}

/// Fills in defaults for the fields the command uses and checks ranges.
pub fn resolve(mut c: RunConfig) -> Result<RunConfig, CliError> {
    let command = *required(&c.command, "command (or a subcommand)")?;
    c.format.get_or_insert(Format::Text);
    let positive = |v: Option<f64>, name: &str| match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Input(format!("--{name} must be positive, got {x}"))),
        _ => Ok(()),
    };
    positive(c.tau, "tau")?;
    positive(c.epsilon, "epsilon")?;
    positive(c.tolerance, "tolerance")?;
    match command {
        Command::Expand => {
            c.m_max.get_or_insert(DEFAULT_M_MAX);
        }
        Command::Certify => {
            c.m_max.get_or_insert(DEFAULT_M_MAX);
            c.tau.get_or_insert(DEFAULT_TAU);
        }
        Command::Decompose => {
            c.m_max.get_or_insert(DEFAULT_M_MAX);
            c.tau.get_or_insert(DEFAULT_TAU);
            c.tolerance.get_or_insert(DEFAULT_DECOMPOSE_TOLERANCE);
        }
        Command::Perturb => {
            c.m_max.get_or_insert(DEFAULT_M_MAX);
            c.tau.get_or_insert(DEFAULT_TAU);
            c.epsilon.get_or_insert(DEFAULT_EPSILON);
            c.seed.get_or_insert(0);
            c.attempts.get_or_insert(DEFAULT_ATTEMPTS);
            c.goal.get_or_insert(GoalArg::Universal);
        }
        Command::ScanF => {
            c.m_max.get_or_insert(DEFAULT_M_MAX);
            c.tau.get_or_insert(DEFAULT_TAU);
            c.epsilon.get_or_insert(DEFAULT_EPSILON);
            c.goal.get_or_insert(GoalArg::Universal);
            c.family.get_or_insert(FamilyArg::AxisScale1);
        }
        Command::Verify => {
            let check = *required(&c.check, "check (lemma2, form1, steiner or meanwidth)")?;
            c.tolerance.get_or_insert(DEFAULT_VERIFY_TOLERANCE);
            match check {
                Check::Lemma2 => {
                    c.m.get_or_insert(DEFAULT_ORDER);
                    c.j.get_or_insert(1);
                }
                Check::Form1 => {
                    c.m.get_or_insert(DEFAULT_ORDER);
                }
                Check::Steiner | Check::Meanwidth => {}
            }
        }
    }
    Ok(c)
}

/// Resolves, runs and renders. Input errors come back as `Err`; a run that
/// completes but misses its tolerance returns its output with `failure`
/// set.
pub fn run(config: RunConfig) -> Result<RunOutput, CliError> {
    let c = resolve(config)?;
    let mut doc = Doc::new(&c);
    let failure = match c.command.expect("resolved") {
        Command::Expand => run_expand(&c, &mut doc)?,
        Command::Certify => run_certify(&c, &mut doc)?,
        Command::Decompose => run_decompose(&c, &mut doc)?,
        Command::Perturb => run_perturb(&c, &mut doc)?,
        Command::ScanF => run_scan(&c, &mut doc)?,
        Command::Verify => run_verify(&c, &mut doc)?,
    };
    Ok(RunOutput { text: doc.finish(), config: c, failure })
}

/// Output document: a two-line comment header (version and effective
/// config) followed by `key: value` lines or CSV rows.
struct Doc {
    format: Format,
    out: String,
}

impl Doc {
    fn new(c: &RunConfig) -> Self {
        let out = format!("# rotmink {VERSION}\n# config {}\n", c.to_json());
        Doc { format: c.format.expect("resolved"), out }
    }

    fn text(&self) -> bool {
        self.format == Format::Text
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        if self.text() {
            let _ = writeln!(self.out, "{key}: {value}");
        }
    }

    fn num(&mut self, key: &str, x: f64) {
        self.kv(key, fmt_f64(x));
    }

    fn vector(&mut self, key: &str, v: &[f64]) {
        self.kv(key, v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", "));
    }

    fn csv(&mut self, body: &str) {
        if !self.text() {
            self.out.push_str(body);
        }
    }

    fn raw(&mut self, body: &str) {
        self.out.push_str(body);
        if !body.ends_with('\n') {
            self.out.push('\n');
        }
    }

    fn finish(self) -> String {
        self.out
    }
}

/// Fails on NaN as well as on values above the tolerance.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn tolerance_failure(what: &str, value: f64, tolerance: f64) -> Option<CliError> {
    (!(value <= tolerance)).then(|| CliError::Tolerance(format!("{what} {value:e} exceeds tolerance {tolerance:e}")))
}

fn run_expand(c: &RunConfig, doc: &mut Doc) -> Result<Option<CliError>, CliError> {
    let path = required(&c.body, "body")?;
    let body = load_body(path)?;
    let m_max = c.m_max.expect("resolved");
    let q = sphere_rule(body.dim(), m_max, c.sphere_degree);
    let e = expand(&body, m_max, &q)?;
    doc.kv("body", body_id(path));
    doc.kv("dimension", body.dim());
    doc.kv("sphere_degree", q.exact_degree());
    for m in 0..=m_max {
        doc.vector(&format!("order {m}"), e.block(m));
    }
    doc.csv(&e.to_csv());
    Ok(None)
}

fn run_certify(c: &RunConfig, doc: &mut Doc) -> Result<Option<CliError>, CliError> {
    let path = required(&c.body, "body")?;
    let body = load_body(path)?;
    let m_max = c.m_max.expect("resolved");
    let q = sphere_rule(body.dim(), m_max, c.sphere_degree);
    let cert = certify_named(&body_id(path), &body, m_max, c.tau.expect("resolved"), &q)?;
    doc.kv("body", &cert.body_id);
    doc.kv("dimension", cert.dimension);
    doc.kv("sphere_degree", q.exact_degree());
    for (m, n) in cert.norms.iter().enumerate() {
        doc.num(&format!("norm {m}"), *n);
    }
    doc.kv("vanishing_orders", format!("{:?}", cert.vanishing_orders()));
    doc.kv("verdict_universal", cert.verdict_universal);
    doc.kv("verdict_centrally_universal", cert.verdict_centrally_universal);
    doc.csv(&cert.to_csv());
    Ok(None)
}

fn run_decompose(c: &RunConfig, doc: &mut Doc) -> Result<Option<CliError>, CliError> {
    let gen_path = required(&c.generator, "generator")?;
    let target_path = required(&c.target, "target")?;
    let generator = load_body(gen_path)?;
    let target = load_body(target_path)?;
    if generator.dim() != target.dim() {
        return Err(CliError::Input(format!(
            "generator is {}-dimensional, target is {}-dimensional",
            generator.dim(),
            target.dim()
        )));
    }
    let (m_max, tau) = (c.m_max.expect("resolved"), c.tau.expect("resolved"));
    let dim = generator.dim();
    let q = sphere_rule(dim, m_max, c.sphere_degree);
    let expansion = expand(&target, m_max, &q)?;
    let variant = match c.goal {
        Some(GoalArg::Universal) => ProfileVariant::Universal,
        Some(GoalArg::Central) => ProfileVariant::Central,
        None if (1..=m_max).step_by(2).all(|m| expansion.order_norm(m) <= tau) => ProfileVariant::Central,
        None => ProfileVariant::Universal,
    };
    let profile = profile_generator(&generator, m_max, tau, variant, &q)?;
    let rq = rotation_rule(dim, m_max, c.rotations);
    let result = decompose(&profile, &expansion, &rq, &q)?;
    let (body_sup, body_l2) = residual_report(&result, &target, &q);
    let parts = result.parts();
    doc.kv("generator", body_id(gen_path));
    doc.kv("target", body_id(target_path));
    doc.kv("variant", format!("{variant:?}").to_lowercase());
    doc.kv("j_select", format!("{:?}", profile.j_select));
    doc.kv("rotation_count", result.rotation_count);
    doc.kv("rotation_exact_order", rq.exact_order());
    doc.kv("sphere_degree", q.exact_degree());
    doc.num("g_condition", result.g_condition);
    doc.num("residual_sup", result.residual_sup);
    doc.num("residual_l2", result.residual_l2);
    doc.num("body_residual_sup", body_sup);
    doc.num("body_residual_l2", body_l2);
    doc.kv("t1_parts", parts.iter().filter(|p| p.2 == rotminkowski::decomposition::Side::T1).count());
    doc.kv("t2_parts", parts.iter().filter(|p| p.2 == rotminkowski::decomposition::Side::T2).count());
    if !doc.text() {
        let n = dim.get();
        let header: Vec<String> = (0..n).flat_map(|i| (0..n).map(move |j| format!("r{}{}", i + 1, j + 1))).collect();
        let mut csv = format!("side,weight,{}\n", header.join(","));
        for (rotation, weight, side) in &parts {
            let entries: Vec<String> = rotation.rows().concat().iter().map(|x| fmt_f64(*x)).collect();
            let _ = writeln!(csv, "{},{},{}", format!("{side:?}").to_lowercase(), fmt_f64(*weight), entries.join(","));
        }
        doc.csv(&csv);
    }
    Ok(result.check_tolerance(c.tolerance.expect("resolved")).err().map(CliError::from))
}

fn search_output(report: &rotminkowski::PerturbationSearchReport, doc: &mut Doc) -> Option<CliError> {
    if doc.text() {
        doc.raw(&report.to_json());
    } else {
        doc.csv(&report.to_csv());
    }
    report.require_winner().err().map(CliError::from)
}

fn run_perturb(c: &RunConfig, doc: &mut Doc) -> Result<Option<CliError>, CliError> {
    let path = required(&c.body, "body")?;
    let body = load_body(path)?;
    let m_max = c.m_max.expect("resolved");
    let q = sphere_rule(body.dim(), m_max, c.sphere_degree);
    let opts = RandomSearchOptions {
        goal: c.goal.expect("resolved").into(),
        m_max,
        tau: c.tau.expect("resolved"),
        epsilon: c.epsilon.expect("resolved"),
        attempts: c.attempts.expect("resolved"),
        seed: c.seed.expect("resolved"),
    };
    let mut report = find_universal_image(&body, &opts, &q)?;
    report.body_id = body_id(path);
    Ok(search_output(&report, doc))
}

fn run_scan(c: &RunConfig, doc: &mut Doc) -> Result<Option<CliError>, CliError> {
    let path = required(&c.body, "body")?;
    let body = load_body(path)?;
    let m_max = c.m_max.expect("resolved");
    let q = sphere_rule(body.dim(), m_max, c.sphere_degree);
    let mut opts = ScanOptions::new(
        c.goal.expect("resolved").into(),
        m_max,
        c.tau.expect("resolved"),
        c.epsilon.expect("resolved"),
    );
    opts.family = match c.family.expect("resolved") {
        FamilyArg::AxisScale1 => Family::AxisScale1,
        FamilyArg::AxisScale2 => Family::AxisScale2,
    };
    let mut report = scan_lambda(&body, &opts, &q)?;
    report.body_id = body_id(path);
    Ok(search_output(&report, doc))
}

fn run_verify(c: &RunConfig, doc: &mut Doc) -> Result<Option<CliError>, CliError> {
    let path = required(&c.body, "body")?;
    let body = load_body(path)?;
    let dim = body.dim();
    let tolerance = c.tolerance.expect("resolved");
    doc.kv("body", body_id(path));
    let mut rows = String::new();
    let failure = match c.check.expect("resolved") {
        Check::Lemma2 => {
            let rows_in = parse_matrix(required(&c.matrix, "matrix")?)?;
            let a = embed_rows(dim, &rows_in)?;
            let (m, j) = (c.m.expect("resolved"), c.j.expect("resolved"));
            let q = sphere_rule(dim, m, c.sphere_degree);
            let check = verify_lemma2(&body, m, j, &a, &q)?;
            doc.kv("sphere_degree", q.exact_degree());
            doc.num("lhs", check.lhs);
            doc.num("rhs", check.rhs);
            doc.num("abs_error", check.abs_error());
            doc.num("rel_error", check.rel_error());
            let _ = writeln!(
                rows,
                "m,j,lhs,rhs,abs_error\n{m},{j},{},{},{}",
                fmt_f64(check.lhs),
                fmt_f64(check.rhs),
                fmt_f64(check.abs_error())
            );
            tolerance_failure("|lhs - rhs|", check.abs_error(), tolerance)
        }
        Check::Form1 => {
            let m_top = c.m.expect("resolved");
            let q = sphere_rule(dim, m_top, c.sphere_degree);
            let rq = rotation_rule(dim, m_top, c.rotations);
            let grid: Vec<Vec3> = match dim {
                Dim::Two => (0..FORM1_PLANAR_GRID)
                    .map(|k| {
                        let phi = std::f64::consts::TAU * k as f64 / FORM1_PLANAR_GRID as f64;
                        Vec3::new(phi.cos(), phi.sin(), 0.0)
                    })
                    .collect(),
                Dim::Three => SphereQuadrature::new(dim, 16).nodes().to_vec(),
            };
            doc.kv("rotation_count", rq.len());
            doc.kv("grid_points", grid.len());
            rows.push_str("m,textbook_error,effective_error\n");
            let mut worst = 0.0f64;
            for m in 0..=m_top {
                let p = projection_identity_check(&body, m, &rq, &q, &grid)?;
                doc.kv(
                    &format!("order {m}"),
                    format!("textbook {} effective {}", fmt_f64(p.textbook), fmt_f64(p.effective)),
                );
                let _ = writeln!(rows, "{m},{},{}", fmt_f64(p.textbook), fmt_f64(p.effective));
                worst = worst.max(p.effective);
            }
            doc.num("max_effective_error", worst);
            tolerance_failure("projection identity error", worst, tolerance)
        }
        Check::Steiner => {
            let q = sphere_rule(dim, 1, c.sphere_degree);
            let s = steiner_point(&body, &q);
            let c1 = project(&body, 1, &q)?;
            // π₁h(u) = ⟨s, u⟩, read off at the coordinate directions.
            let mut from_order1 = Vec3::zeros();
            for axis in 0..dim.get() {
                let e = Vec3::ith(axis, 1.0);
                from_order1[axis] = c1.iter().zip(order_values(dim, 1, &e)).map(|(a, y)| a * y).sum();
            }
            let n = dim.get();
            doc.vector("steiner_point", &s.as_slice()[..n]);
            doc.vector("from_order_one", &from_order1.as_slice()[..n]);
            let mut error = (s - from_order1).norm();
            rows.push_str("source,x,y,z\n");
            let _ = writeln!(rows, "integral,{},{},{}", fmt_f64(s.x), fmt_f64(s.y), fmt_f64(s.z));
            let _ = writeln!(
                rows,
                "order_one,{},{},{}",
                fmt_f64(from_order1.x),
                fmt_f64(from_order1.y),
                fmt_f64(from_order1.z)
            );
            if let Some((exact, _)) = closed_form_steiner_and_width(&body) {
                doc.vector("exact", &exact.as_slice()[..n]);
                let _ = writeln!(rows, "exact,{},{},{}", fmt_f64(exact.x), fmt_f64(exact.y), fmt_f64(exact.z));
                error = error.max((s - exact).norm());
            }
            doc.num("max_error", error);
            tolerance_failure("Steiner point discrepancy", error, tolerance)
        }
        Check::Meanwidth => {
            let q = sphere_rule(dim, 0, c.sphere_degree);
            let b = mean_width(&body, &q);
            let c0 = project(&body, 0, &q)?[0];
            let from_order0 = 2.0 * c0 / dim.sphere_measure().sqrt();
            doc.num("mean_width", b);
            doc.num("from_order_zero", from_order0);
            let mut error = (b - from_order0).abs();
            rows.push_str("source,value\n");
            let _ = writeln!(rows, "integral,{}\norder_zero,{}", fmt_f64(b), fmt_f64(from_order0));
            if let Some((_, exact)) = closed_form_steiner_and_width(&body) {
                doc.num("exact", exact);
                let _ = writeln!(rows, "exact,{}", fmt_f64(exact));
                error = error.max((b - exact).abs());
            }
            doc.num("max_error", error);
            tolerance_failure("mean width discrepancy", error, tolerance)
        }
    };
    doc.kv("status", if failure.is_none() { "ok" } else { "tolerance exceeded" });
    doc.csv(&rows);
    Ok(failure)
}
