//! Command-line surface: configuration, commands and exit codes.
//!
//! Every command is a function from a validated [`RunConfig`] to a
//! serializable report, so the binary is a thin wrapper and the same
//! reports can be produced in tests.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::{
    family_separation_check, gauge_eval, gauge_grad_lipschitz_bound, weak_norm, FamilyId,
    FunctionalFamily, GaugeKind, GaugeSpec,
};
use crate::gradcheck::{
    check_gauge, check_map, gauge_sample_pairs, sample_pairs, FdPolicy, FdSuite,
};
use crate::map_f::{f_eval, f_invert_radial, jf_apply, jf_solve, MapSpec, SolveResult};
use crate::sampling::{Sampler, MAX_SUPPORT};
use crate::space_models::{ModelKind, SpaceModel};
use crate::vector::Vector;
use crate::witnesses::{
    certify_and_invert, classify_point_with, decay_radii, divergence_report, origin_decay_profile,
    remainder_bounds_q5, sample_certified_case, weaksep_witness, CheckedCertificate, PointClass,
    WitnessReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Exit code for an error: 1 for numerical failures, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotInvertible | Error::NumericalRange(_) => EXIT_FAILURE,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative error allowed between finite differences and derivatives.
    pub fd: f64,
    /// Residual allowed in linear solves.
    pub solve: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fd: 1e-6,
            solve: 1e-9,
        }
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SAMPLES: usize = 100;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

/// Everything a command needs besides its own inputs.
///
/// ```json
/// {"model": {"kind": "lp_seq", "p": 2.0},
///  "gauge": {"gauge": "lq_even", "q": 4, "power": 1},
///  "seed": 7, "samples": 100,
///  "tolerances": {"fd": 1e-6, "solve": 1e-9}}
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub gauge: GaugeSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::L2Weighted,
            gauge: GaugeSpec::weighted_l2(),
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The map this configuration describes, after every check.
    pub fn map(&self) -> Result<MapSpec> {
        let model = SpaceModel::new(self.model)?;
        let gauge = GaugeSpec::new(self.gauge.kind, self.gauge.power)?;
        MapSpec::new(model, gauge)
    }

    pub fn validate(&self) -> Result<MapSpec> {
        if self.samples == 0 {
            return Err(Error::Configuration("samples must be positive".into()));
        }
        let t = self.tolerances;
        if !(t.fd > 0.0 && t.solve > 0.0) {
            return Err(Error::Configuration("tolerances must be positive".into()));
        }
        self.map()
    }

    pub fn fd_policy(&self) -> FdPolicy {
        FdPolicy {
            tolerance: self.tolerances.fd,
            ..FdPolicy::default()
        }
    }
}

/// The gauge each model is paired with when none is named.
pub fn default_gauge(model: &ModelKind) -> GaugeKind {
    match *model {
        ModelKind::L2Weighted => GaugeKind::WeightedL2,
        ModelKind::LpSeq { p } => {
            let q = (p.ceil() as u32).max(2);
            GaugeKind::LqEven { q: q + q % 2 }
        }
        ModelKind::LInfDyadic | ModelKind::C0Dyadic => GaugeKind::Dyadic,
        ModelKind::LpGrid { .. } => GaugeKind::GridSquare,
        ModelKind::WeakSep { family } => GaugeKind::WeakSepDyadic { family },
    }
}

fn parse_family(name: Option<&str>) -> Result<FamilyId> {
    name.map_or(Ok(FamilyId::Coordinate), FamilyId::parse)
}

fn parse_model(
    name: &str,
    p: Option<f64>,
    cells: Option<usize>,
    family: Option<&str>,
) -> Result<ModelKind> {
    let p_val = p.unwrap_or(2.0);
    let kind = match name {
        "l2_weighted" => ModelKind::L2Weighted,
        "lp_seq" => ModelKind::LpSeq { p: p_val },
        "linf_dyadic" => ModelKind::LInfDyadic,
        "c0_dyadic" => ModelKind::C0Dyadic,
        "lp_grid" => ModelKind::LpGrid {
            p: p_val,
            cells: cells.unwrap_or(64),
        },
        "weaksep" => ModelKind::WeakSep {
            family: parse_family(family)?,
        },
        other => return Err(Error::Configuration(format!("unknown model {other:?}"))),
    };
    if p.is_some() && !matches!(kind, ModelKind::LpSeq { .. } | ModelKind::LpGrid { .. }) {
        return Err(Error::Configuration(format!(
            "--p does not apply to {name}"
        )));
    }
    if cells.is_some() && !matches!(kind, ModelKind::LpGrid { .. }) {
        return Err(Error::Configuration(format!(
            "--cells does not apply to {name}"
        )));
    }
    if family.is_some() && !matches!(kind, ModelKind::WeakSep { .. }) {
        return Err(Error::Configuration(format!(
            "--family does not apply to {name}"
        )));
    }
    Ok(kind)
}

fn parse_gauge(
    name: &str,
    q: Option<u32>,
    model: &ModelKind,
    family: Option<&str>,
) -> Result<GaugeKind> {
    let kind = match name {
        "weighted_l2" => GaugeKind::WeightedL2,
        "dyadic" => GaugeKind::Dyadic,
        "lq_even" => GaugeKind::LqEven {
            q: q.ok_or_else(|| Error::Configuration("lq_even needs --q".into()))?,
        },
        "l5_odd" => GaugeKind::L5Odd,
        "grid_square" => GaugeKind::GridSquare,
        "weaksep" => {
            let family = match (family, model) {
                (Some(f), _) => FamilyId::parse(f)?,
                (None, ModelKind::WeakSep { family }) => *family,
                (None, _) => FamilyId::Coordinate,
            };
            GaugeKind::WeakSepDyadic { family }
        }
        other => return Err(Error::Configuration(format!("unknown gauge {other:?}"))),
    };
    if q.is_some() && !matches!(kind, GaugeKind::LqEven { .. }) {
        return Err(Error::Configuration(format!(
            "--q does not apply to {name}"
        )));
    }
    Ok(kind)
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON run configuration; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// l2_weighted, lp_seq, linf_dyadic, c0_dyadic, lp_grid or weaksep.
    #[arg(long)]
    pub model: Option<String>,
    /// Exponent of lp_seq or lp_grid.
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of grid cells for lp_grid.
    #[arg(long)]
    pub cells: Option<usize>,
    /// Functional family for weaksep: coordinate or half_difference.
    #[arg(long)]
    pub family: Option<String>,
    /// weighted_l2, dyadic, lq_even, l5_odd, grid_square or weaksep.
    #[arg(long)]
    pub gauge: Option<String>,
    /// Exponent of lq_even.
    #[arg(long)]
    pub q: Option<u32>,
    /// Integer power applied to the gauge.
    #[arg(long)]
    pub power: Option<u32>,
    /// Exponent of the weak norm inside the exponential; sets the power.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Finite-difference tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Linear-solve residual tolerance.
    #[arg(long)]
    pub solve_tol: Option<f64>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let family = self.family.as_deref();
        if let Some(name) = &self.model {
            cfg.model = parse_model(name, self.p, self.cells, family)?;
            cfg.gauge = GaugeSpec::of(default_gauge(&cfg.model));
        } else if self.p.is_some() || self.cells.is_some() {
            return Err(Error::Configuration("--p and --cells need --model".into()));
        }
        let mut kind = cfg.gauge.kind;
        if let Some(name) = &self.gauge {
            kind = parse_gauge(name, self.q, &cfg.model, family)?;
        } else if let Some(q) = self.q {
            kind = GaugeKind::LqEven { q };
        }
        let mut power = cfg.gauge.power;
        if let Some(p) = self.power {
            power = p;
        }
        if let Some(s) = self.s {
            let degree = f64::from(GaugeSpec::of(kind).degree());
            let m = s / degree;
            if !(m >= 1.0 && m.fract() == 0.0 && m <= f64::from(u32::MAX)) {
                return Err(Error::Configuration(format!(
                    "s = {s} is not a positive multiple of the gauge degree {degree}"
                )));
            }
            if self.power.is_some_and(|p| f64::from(p) != m) {
                return Err(Error::Configuration("--s and --power disagree".into()));
            }
            power = m as u32;
        }
        cfg.gauge = GaugeSpec::new(kind, power)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(t) = self.tol {
            cfg.tolerances.fd = t;
        }
        if let Some(t) = self.solve_tol {
            cfg.tolerances.solve = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Parser)]
#[command(
    name = "nonopen",
    version,
    about = "Non-open C1 maps F(x) = exp(-1/G(x)) x and their certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the supported (model, gauge) pairs.
    Models {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate G, the weak norm, F and optionally J_F(x)h at a point.
    Eval {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        h: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Finite-difference checks of J_G and J_F.
    Gradcheck {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve J_F(x)h = y.
    Solve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Radial preimage of y under F.
    Invert {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gamma table and divergence of preimages for n = 1..n_max.
    Nonopen {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 100)]
        n_max: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certify that (delta/2)·y has no preimage in the unit ball.
    Certify {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every sampled property check for one configuration.
    Report {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Models { output }
            | Command::Eval { output, .. }
            | Command::Gradcheck { output, .. }
            | Command::Solve { output, .. }
            | Command::Invert { output, .. }
            | Command::Nonopen { output, .. }
            | Command::Certify { output, .. }
            | Command::Report { output, .. } => output,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelRow {
    pub model: &'static str,
    pub gauge: &'static str,
    pub parameters: &'static str,
    pub description: &'static str,
}

pub fn cmd_list_models() -> Vec<ModelRow> {
    let row = |model, gauge, parameters, description| ModelRow {
        model,
        gauge,
        parameters,
        description,
    };
    vec![
        row(
            "l2_weighted",
            "weighted_l2",
            "",
            "l2 with weak norm (sum x_k^2/k)^(1/2); unique critical point at 0",
        ),
        row(
            "lp_seq",
            "lq_even",
            "q even, q >= p",
            "lp with the weaker lq norm, G = sum x_k^q",
        ),
        row(
            "lp_seq",
            "l5_odd",
            "p <= 5",
            "lp with G = sum |x_k|^5, differentiable through |t| t^3",
        ),
        row(
            "linf_dyadic",
            "dyadic",
            "",
            "l-infinity with (sum x_k^2/2^k)^(1/2), strictly weaker than the sup norm",
        ),
        row("c0_dyadic", "dyadic", "", "c0 with the dyadic weak norm"),
        row(
            "lp_grid",
            "grid_square",
            "p >= 2, M cells",
            "Lp[0,1] on a uniform grid with the L2 weak norm",
        ),
        row(
            "weaksep",
            "weaksep",
            "family",
            "c0 with a separating family l_k, G = sum l_k(x)^2/2^k",
        ),
    ]
}

fn read_vector(path: &Path) -> Result<Vector> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Representation(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub config: RunConfig,
    pub gauge: f64,
    pub weak_norm: f64,
    pub norm: f64,
    pub image: Vector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivative: Option<Vector>,
}

pub fn cmd_eval(cfg: &RunConfig, x: &Vector, h: Option<&Vector>) -> Result<EvalReport> {
    let m = cfg.validate()?;
    Ok(EvalReport {
        config: *cfg,
        gauge: gauge_eval(&m.gauge, &m.model, x)?,
        weak_norm: weak_norm(&m.gauge, &m.model, x)?,
        norm: m.norm(x)?,
        image: f_eval(&m, x)?,
        derivative: h.map(|h| jf_apply(&m, x, h)).transpose()?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradcheckReport {
    pub schema: &'static str,
    pub config: RunConfig,
    pub policy: FdPolicy,
    pub passed: bool,
    pub suites: Vec<FdSuite>,
}

/// Gauge and map finite-difference suites with `samples` pairs each.
pub fn cmd_gradcheck(cfg: &RunConfig) -> Result<GradcheckReport> {
    let m = cfg.validate()?;
    let policy = cfg.fd_policy();
    let mut sampler = Sampler::new(cfg.seed);
    let gauge_pairs = gauge_sample_pairs(&m, &mut sampler, cfg.samples)?;
    let map_pairs = sample_pairs(&m, &mut sampler, cfg.samples)?;
    let suites = vec![
        check_gauge(&m, &gauge_pairs, &policy)?,
        check_map(&m, &map_pairs, &policy)?,
    ];
    Ok(GradcheckReport {
        schema: "gradcheck/1",
        config: *cfg,
        policy,
        passed: suites.iter().all(FdSuite::passed),
        suites,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub config: RunConfig,
    #[serde(flatten)]
    pub result: SolveResult,
    pub within_tolerance: bool,
}

pub fn cmd_solve(cfg: &RunConfig, x: &Vector, y: &Vector) -> Result<SolveReport> {
    let m = cfg.validate()?;
    let result = jf_solve(&m, x, y)?;
    let scale = 1.0 + m.norm(y)?;
    Ok(SolveReport {
        config: *cfg,
        within_tolerance: result.residual <= cfg.tolerances.solve * scale,
        result,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertReport {
    pub config: RunConfig,
    pub solution: Vector,
    pub norm: f64,
    /// `‖F(x) - y‖ / max(1, ‖y‖)`.
    pub residual: f64,
}

pub fn cmd_invert(cfg: &RunConfig, y: &Vector) -> Result<InvertReport> {
    let m = cfg.validate()?;
    let x = f_invert_radial(&m, y)?;
    let residual = m.norm(&f_eval(&m, &x)?.sub(y)?)? / m.norm(y)?.max(1.0);
    Ok(InvertReport {
        config: *cfg,
        norm: m.norm(&x)?,
        solution: x,
        residual,
    })
}

/// Divergence report over `n = 1, ..., n_max`.
pub fn cmd_nonopen(cfg: &RunConfig, n_max: u64) -> Result<WitnessReport> {
    let m = cfg.validate()?;
    if n_max == 0 {
        return Err(Error::Configuration("n_max must be at least 1".into()));
    }
    let n_list: Vec<u64> = (1..=n_max).collect();
    divergence_report(&m, &n_list)
}

pub fn cmd_certify(cfg: &RunConfig, delta: f64, y: &Vector) -> Result<CheckedCertificate> {
    let m = cfg.validate()?;
    certify_and_invert(&m, delta, y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub passed: bool,
    /// The largest normalized violation measure seen; see each check.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub schema: &'static str,
    pub config: RunConfig,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Roundtrip of `jf_solve` at random `(x, y)`; worst is
/// `residual / (1 + ‖y‖)` over the tolerance.
pub fn check_solve_roundtrip(
    m: &MapSpec,
    sampler: &mut Sampler,
    cases: usize,
    tol: f64,
) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let rx = sampler.log_uniform(1e-3, 10.0);
        let x = sampler.vector_with_norm(&m.model, MAX_SUPPORT, rx)?;
        let ry = sampler.log_uniform(1e-3, 1e3);
        let y = sampler.vector_with_norm(&m.model, MAX_SUPPORT, ry)?;
        let r = jf_solve(m, &x, &y)?;
        worst = worst.max(r.residual / (1.0 + ry));
    }
    Ok(CheckResult {
        name: "solve_roundtrip",
        cases,
        passed: worst <= tol,
        worst: worst / tol,
    })
}

/// Zero is critical and random points with norms down to `1e-8` are
/// regular with verified solves; worst is the largest solve residual.
pub fn check_classification(
    m: &MapSpec,
    sampler: &mut Sampler,
    cases: usize,
    tol: f64,
) -> Result<CheckResult> {
    let zero = Vector::zero_like(&sampler.vector(&m.model, 1));
    let mut passed = classify_point_with(m, &zero, tol)?.is_critical();
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let r = sampler.log_uniform(1e-8, 10.0);
        let x = sampler.vector_with_norm(&m.model, MAX_SUPPORT, r)?;
        match classify_point_with(m, &x, tol)? {
            PointClass::Critical => passed = false,
            PointClass::Regular {
                max_residual,
                verified,
                ..
            } => {
                worst = worst.max(max_residual);
                passed &= verified;
            }
        }
    }
    Ok(CheckResult {
        name: "classification",
        cases: cases + 1,
        passed,
        worst,
    })
}

/// `‖F(h)‖/‖h‖ ≤ exp(-1/(C‖h‖)^s)` along random rays, with monotone decay;
/// worst is the largest `(log ratio - log bound) / |log bound|`.
pub fn check_origin_decay(m: &MapSpec, sampler: &mut Sampler, cases: usize) -> Result<CheckResult> {
    let radii = decay_radii();
    let mut passed = true;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let dir = sampler.unit_vector(&m.model, MAX_SUPPORT)?;
        let p = origin_decay_profile(m, &dir, &radii)?;
        passed &= p.all_hold && p.monotone;
        for row in &p.rows {
            worst = worst.max((row.log_ratio - row.log_bound) / row.log_bound.abs());
        }
    }
    Ok(CheckResult {
        name: "origin_decay",
        cases,
        passed,
        worst,
    })
}

/// Probed `‖J_G(x+z) - J_G(x)‖` against its analytic bound; worst is the
/// largest estimate/bound ratio.
pub fn check_lipschitz(m: &MapSpec, sampler: &mut Sampler, cases: usize) -> Result<CheckResult> {
    let mut passed = true;
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let rx = sampler.log_uniform(1e-2, 10.0);
        let x = sampler.vector_with_norm(&m.model, MAX_SUPPORT, rx)?;
        let rz = sampler.log_uniform(1e-2, 10.0);
        let z = sampler.vector_with_norm(&m.model, MAX_SUPPORT, rz)?;
        let c = gauge_grad_lipschitz_bound(&m.gauge, &m.model, &x, &z)?;
        passed &= c.holds(1e-12 * c.bound);
        if c.bound > 0.0 {
            worst = worst.max(c.estimate / c.bound);
        }
    }
    Ok(CheckResult {
        name: "lipschitz",
        cases,
        passed,
        worst,
    })
}

/// Radial preimages of certified `(δ/2)·y` lie outside the open unit ball;
/// worst is the largest `1 - ‖x‖`.
pub fn check_certificates(m: &MapSpec, sampler: &mut Sampler, cases: usize) -> Result<CheckResult> {
    let mut passed = true;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let (delta, y) = sample_certified_case(m, sampler)?;
        let c = certify_and_invert(m, delta, &y)?;
        passed &= c.certificate.certified && c.consistent;
        worst = worst.max(1.0 - c.preimage_norm);
    }
    Ok(CheckResult {
        name: "no_preimage",
        cases,
        passed,
        worst,
    })
}

/// Remainder bounds and the reconstruction identity for `Σ|x_k|^5`; worst is
/// the reconstruction error relative to `‖x+h‖₅⁵ + ‖x‖₅⁵`.
pub fn check_q5(m: &MapSpec, sampler: &mut Sampler, cases: usize) -> Result<CheckResult> {
    let mut passed = true;
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let rx = sampler.log_uniform(1e-2, 10.0);
        let x = sampler.vector_with_norm(&m.model, MAX_SUPPORT, rx)?;
        let rh = sampler.log_uniform(1e-2, 10.0);
        let h = sampler.vector_with_norm(&m.model, MAX_SUPPORT, rh)?;
        let (xs, hs) = (x.as_sparse()?, h.as_sparse()?);
        let r = remainder_bounds_q5(xs, hs);
        let scale = crate::space_models::seq_lp_norm(&xs.add(hs), 5.0).powi(5)
            + crate::space_models::seq_lp_norm(xs, 5.0).powi(5);
        let err = r.reconstruction_error(scale);
        worst = worst.max(err);
        passed &= r.bounds_hold() && err <= 1e-12;
    }
    Ok(CheckResult {
        name: "q5_remainders",
        cases,
        passed,
        worst,
    })
}

/// Separation on random vectors and the witnesses `x_q` for `q ≤ 50`;
/// worst is the largest weak norm/bound ratio among the witnesses.
pub fn check_weaksep(family: FamilyId, sampler: &mut Sampler, cases: usize) -> Result<CheckResult> {
    let fam = FunctionalFamily::new(family);
    let model = SpaceModel::weaksep(family);
    let mut passed = true;
    for _ in 0..cases {
        let x = sampler.vector(&model, MAX_SUPPORT);
        passed &= family_separation_check(&fam, x.as_sparse()?)?;
    }
    let mut worst = 0.0f64;
    for q in 1..=50 {
        let w = weaksep_witness(&fam, q)?;
        passed &= w.weak_norm <= w.bound;
        worst = worst.max(w.weak_norm / w.bound);
    }
    Ok(CheckResult {
        name: "weak_separation",
        cases: cases + 50,
        passed,
        worst,
    })
}

/// Every sampled property applicable to the configured pair.
pub fn cmd_report(cfg: &RunConfig) -> Result<BatteryReport> {
    let m = cfg.validate()?;
    let n = cfg.samples;
    let mut sampler = Sampler::new(cfg.seed);
    let mut checks = vec![
        check_solve_roundtrip(&m, &mut sampler, n, cfg.tolerances.solve)?,
        check_classification(&m, &mut sampler, n, cfg.tolerances.solve)?,
        check_origin_decay(&m, &mut sampler, n)?,
        check_lipschitz(&m, &mut sampler, n)?,
        check_certificates(&m, &mut sampler, n)?,
    ];
    if matches!(m.gauge.kind, GaugeKind::L5Odd) {
        checks.push(check_q5(&m, &mut sampler, n)?);
    }
    if let GaugeKind::WeakSepDyadic { family } = m.gauge.kind {
        checks.push(check_weaksep(family, &mut sampler, n)?);
    }
    Ok(BatteryReport {
        schema: "report/1",
        config: *cfg,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Result of running one command: exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: &Error) -> Self {
        Self {
            code: exit_code(e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| Error::Representation(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Representation(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Representation(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Representation(e.to_string()))
}

fn json_only(format: Format) -> Result<()> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::Configuration(
            "CSV output is available for models and nonopen only".into(),
        )),
    }
}

fn pass_code(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn dispatch(command: &Command) -> Result<(i32, String)> {
    let format = command.output().format;
    match command {
        Command::Models { .. } => {
            let rows = cmd_list_models();
            let body = match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => rows_to_csv(&rows)?,
            };
            Ok((EXIT_OK, body))
        }
        Command::Eval { cfg, x, h, .. } => {
            json_only(format)?;
            let cfg = cfg.resolve()?;
            let x = read_vector(x)?;
            let h = h.as_deref().map(read_vector).transpose()?;
            Ok((EXIT_OK, to_json(&cmd_eval(&cfg, &x, h.as_ref())?)?))
        }
        Command::Gradcheck { cfg, .. } => {
            json_only(format)?;
            let report = cmd_gradcheck(&cfg.resolve()?)?;
            Ok((pass_code(report.passed), to_json(&report)?))
        }
        Command::Solve { cfg, x, y, .. } => {
            json_only(format)?;
            let cfg = cfg.resolve()?;
            let report = cmd_solve(&cfg, &read_vector(x)?, &read_vector(y)?)?;
            Ok((pass_code(report.within_tolerance), to_json(&report)?))
        }
        Command::Invert { cfg, y, .. } => {
            json_only(format)?;
            let cfg = cfg.resolve()?;
            Ok((EXIT_OK, to_json(&cmd_invert(&cfg, &read_vector(y)?)?)?))
        }
        Command::Nonopen { cfg, n_max, .. } => {
            let report = cmd_nonopen(&cfg.resolve()?, *n_max)?;
            let body = match format {
                Format::Json => to_json(&report)?,
                Format::Csv => report.to_csv()?,
            };
            Ok((pass_code(report.summary.all_satisfied), body))
        }
        Command::Certify { cfg, delta, y, .. } => {
            json_only(format)?;
            let cfg = cfg.resolve()?;
            let c = cmd_certify(&cfg, *delta, &read_vector(y)?)?;
            Ok((pass_code(c.consistent), to_json(&c)?))
        }
        Command::Report { cfg, .. } => {
            json_only(format)?;
            let report = cmd_report(&cfg.resolve()?)?;
            Ok((pass_code(report.passed), to_json(&report)?))
        }
    }
}

/// Runs a parsed command without touching the file system for output.
pub fn run(cli: &Cli) -> CommandOutput {
    match dispatch(&cli.command) {
        Ok((code, body)) => CommandOutput::ok(code, body),
        Err(e) => CommandOutput::error(&e),
    }
}

/// Runs a command and writes its report to `--out` or standard output.
pub fn execute(cli: &Cli) -> i32 {
    let out = run(cli);
    eprint!("{}", out.stderr);
    if out.stdout.is_empty() {
        return out.code;
    }
    match &cli.command.output().out {
        Some(path) => {
            if let Err(e) = fs::write(path, &out.stdout) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => print!("{}", out.stdout),
    }
    out.code
}
