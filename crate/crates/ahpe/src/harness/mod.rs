//! Config-driven experiments behind the CLI: TOML configs resolve to an
//! objective, a starting point, and a solver (or the gradient-descent
//! baseline); runs emit stable CSV traces plus comparison summaries, and
//! [`verify`] packages the library's invariant checks into a reportable
//! suite.
//!
//! Everything here is deterministic: problem instances and starting points
//! are sampled from seeds named in the config, solvers use no randomness, and
//! CSV bytes are reproducible run-to-run (a property the tests assert).
//!
//! # Config schema
//!
//! ```toml
//! [manifold]
//! kind = "hyperbolic"          # or "euclidean"
//! dim = 10                     # manifold dimension
//! curvature = 1.0              # K > 0, hyperbolic only (curvature is -K)
//!
//! [objective]
//! kind = "karcher"             # "squared_distance" | "karcher" | "random_quadratic"
//! anchors = 20                 # karcher only
//! anchor_radius = 0.5          # karcher only: anchors sampled in this ball
//! domain_radius = 0.5          # distance objectives: declared iterate range
//! # condition = 1e4            # random_quadratic only
//! seed = 7                     # instance sampling seed (default 0)
//!
//! [method]
//! algorithm = "riemann"        # "euclid" | "riemann" | "rgd"
//! strategy = "nesterov_grad"   # exact_quadratic | nesterov_grad |
//!                              #   two_step_grad | raxgd | gen_raxgd
//! lambda = "auto"              # step size, or an explicit number
//! sigma = 0.7                  # error budget (not for exact/two-step)
//! # a0 = 1.0                   # initial aggregated weight
//! # b0 = "auto"                # initial distance coefficient
//! # w_rule = "y_anchored"      # "strategy" | "y_anchored" | "midpoint"
//! # offset_fraction = 0.5      # gen_raxgd only
//!
//! [run]
//! max_iters = 300
//! # target_gap = 1e-8          # stop once f(x) - f* falls below this
//! seed = 0                     # starting-point seed
//! x0_radius = 0.3              # exact geodesic distance from x* to x_0
//! # output = "trace.csv"       # CSV filename (CLI resolves the directory)
//! # checks = true              # enforce per-run conformance after solving
//! ```
//!
//! Unknown keys and duplicated keys are rejected at parse time; semantic
//! problems (missing per-kind fields, incompatible strategy/rule pairs) are
//! rejected by validation with the offending field named.

pub mod verify;

pub use verify::{verify_suite, VerifyItem, VerifyReport, VerifyScope};

use crate::iprox::{OffsetRule, Strategy};
use crate::manifold::{Manifold, Point};
use crate::objectives::Objective;
use crate::solvers::{
    Algorithm, RunConfig, RunDiagnostics, RunOutcome, TraceRecord, WRule, TRACE_COLUMNS,
};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;
use std::io::Write;
use std::path::Path;

/// First line of every trace CSV; bump the suffix if the schema changes.
pub const TRACE_VERSION_LINE: &str = "# ahpe-trace v1";
/// First line of every merged comparison CSV.
pub const COMPARE_VERSION_LINE: &str = "# ahpe-compare v1";

/// A TOML field that is either the literal string `"auto"` or a number.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AutoOr {
    Number(f64),
    Tag(String),
}

impl AutoOr {
    fn resolve(&self, field: &str, auto: impl FnOnce() -> f64) -> Result<f64> {
        match self {
            AutoOr::Number(v) if !v.is_finite() => {
                Err(Error::Validation(format!("{field}: must be finite, got {v}")))
            }
            AutoOr::Number(v) => Ok(*v),
            AutoOr::Tag(s) if s == "auto" => Ok(auto()),
            AutoOr::Tag(s) => Err(Error::Validation(format!(
                "{field}: expected a number or \"auto\", got \"{s}\""
            ))),
        }
    }

    fn explicit(&self, field: &str) -> Result<Option<f64>> {
        match self {
            AutoOr::Number(v) if !v.is_finite() => {
                Err(Error::Validation(format!("{field}: must be finite, got {v}")))
            }
            AutoOr::Number(v) => Ok(Some(*v)),
            AutoOr::Tag(s) if s == "auto" => Ok(None),
            AutoOr::Tag(s) => Err(Error::Validation(format!(
                "{field}: expected a number or \"auto\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSection {
    /// `"euclidean"` or `"hyperbolic"`.
    pub kind: String,
    /// Manifold dimension (ambient dimension is `dim + 1` when hyperbolic).
    pub dim: usize,
    /// `K > 0` for curvature `-K`; hyperbolic only.
    #[serde(default)]
    pub curvature: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSection {
    /// `"squared_distance"`, `"karcher"`, or `"random_quadratic"`.
    pub kind: String,
    /// Declared iterate range for distance-based objectives.
    #[serde(default)]
    pub domain_radius: Option<f64>,
    /// Number of anchors (karcher only).
    #[serde(default)]
    pub anchors: Option<usize>,
    /// Anchors are sampled uniformly in this geodesic ball around the origin
    /// (karcher only).
    #[serde(default)]
    pub anchor_radius: Option<f64>,
    /// Eigenvalue spread `L/mu` (random_quadratic only).
    #[serde(default)]
    pub condition: Option<f64>,
    /// Instance sampling seed (default 0).
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSection {
    /// `"euclid"`, `"riemann"`, or `"rgd"` (the gradient-descent baseline).
    pub algorithm: String,
    #[serde(default)]
    pub strategy: Option<String>,
    /// Step size; `"auto"` picks the strategy's largest admissible value
    /// (`1/L` for the baseline).
    #[serde(default)]
    pub lambda: Option<AutoOr>,
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Initial aggregated weight `A_0` (default 1).
    #[serde(default)]
    pub a0: Option<f64>,
    /// Initial `B_0`; `"auto"` (default) derives it from the algorithm.
    #[serde(default)]
    pub b0: Option<AutoOr>,
    /// `"strategy"` (default), `"y_anchored"`, or `"midpoint"`.
    #[serde(default)]
    pub w_rule: Option<String>,
    /// Offset size for `gen_raxgd`, as a fraction of its admissible cap.
    #[serde(default)]
    pub offset_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub max_iters: usize,
    #[serde(default)]
    pub target_gap: Option<f64>,
    /// Starting-point seed (default 0).
    #[serde(default)]
    pub seed: Option<u64>,
    /// `x_0` is sampled at exactly this geodesic distance from the optimum
    /// (default 1).
    #[serde(default)]
    pub x0_radius: Option<f64>,
    /// Trace CSV filename; the CLI resolves the directory.
    #[serde(default)]
    pub output: Option<String>,
    /// Enforce run-level conformance checks after solving (default true).
    #[serde(default)]
    pub checks: Option<bool>,
}

/// One fully-described experiment.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub manifold: ManifoldSection,
    pub objective: ObjectiveSection,
    pub method: MethodSection,
    pub run: RunSection,
}

fn forbid<T>(field: &str, value: &Option<T>, why: &str) -> Result<()> {
    if value.is_some() {
        return Err(Error::Validation(format!("{field}: {why}")));
    }
    Ok(())
}

/// TOML happily parses `inf` and `nan`, which slip through one-sided range
/// checks like `>= 1`; reject them up front so the rest of validation (and
/// everything downstream) can assume finite numbers.
fn finite(field: &str, value: Option<f64>) -> Result<()> {
    match value {
        Some(v) if !v.is_finite() => {
            Err(Error::Validation(format!("{field}: must be finite, got {v}")))
        }
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    /// Semantic validation beyond what the parser enforces. Error messages
    /// name the offending field.
    pub fn validate(&self) -> Result<()> {
        finite("manifold.curvature", self.manifold.curvature)?;
        finite("objective.domain_radius", self.objective.domain_radius)?;
        finite("objective.anchor_radius", self.objective.anchor_radius)?;
        finite("objective.condition", self.objective.condition)?;
        finite("method.sigma", self.method.sigma)?;
        finite("method.a0", self.method.a0)?;
        finite("method.offset_fraction", self.method.offset_fraction)?;
        finite("run.target_gap", self.run.target_gap)?;

        let m = &self.manifold;
        match m.kind.as_str() {
            "euclidean" => {
                if let Some(k) = m.curvature {
                    if k != 0.0 {
                        return Err(Error::Validation(
                            "manifold.curvature: must be omitted (or 0) for a euclidean manifold".into(),
                        ));
                    }
                }
            }
            "hyperbolic" => match m.curvature {
                Some(k) if k > 0.0 => {}
                _ => {
                    return Err(Error::Validation(
                        "manifold.curvature: hyperbolic manifolds need curvature > 0 (for -K)".into(),
                    ))
                }
            },
            other => {
                return Err(Error::Validation(format!(
                    "manifold.kind: unknown kind \"{other}\" (euclidean | hyperbolic)"
                )))
            }
        }
        if m.dim == 0 {
            return Err(Error::Validation("manifold.dim: must be at least 1".into()));
        }

        let o = &self.objective;
        match o.kind.as_str() {
            "squared_distance" => {
                if !matches!(o.domain_radius, Some(r) if r > 0.0) {
                    return Err(Error::Validation(
                        "objective.domain_radius: squared_distance needs a positive domain radius".into(),
                    ));
                }
                forbid("objective.anchors", &o.anchors, "only karcher objectives take anchors")?;
                forbid("objective.anchor_radius", &o.anchor_radius, "only karcher objectives take an anchor radius")?;
                forbid("objective.condition", &o.condition, "only random_quadratic objectives take a condition number")?;
            }
            "karcher" => {
                if !matches!(o.anchors, Some(n) if n >= 1) {
                    return Err(Error::Validation("objective.anchors: karcher needs at least one anchor".into()));
                }
                if !matches!(o.anchor_radius, Some(r) if r > 0.0) {
                    return Err(Error::Validation(
                        "objective.anchor_radius: karcher needs a positive anchor radius".into(),
                    ));
                }
                if !matches!(o.domain_radius, Some(r) if r > 0.0) {
                    return Err(Error::Validation(
                        "objective.domain_radius: karcher needs a positive domain radius".into(),
                    ));
                }
                forbid("objective.condition", &o.condition, "only random_quadratic objectives take a condition number")?;
            }
            "random_quadratic" => {
                if m.kind != "euclidean" {
                    return Err(Error::Validation(
                        "objective.kind: random_quadratic requires manifold.kind = \"euclidean\"".into(),
                    ));
                }
                if !matches!(o.condition, Some(c) if c >= 1.0) {
                    return Err(Error::Validation(
                        "objective.condition: random_quadratic needs a condition number >= 1".into(),
                    ));
                }
                forbid("objective.domain_radius", &o.domain_radius, "random_quadratic objectives are smooth everywhere")?;
                forbid("objective.anchors", &o.anchors, "only karcher objectives take anchors")?;
                forbid("objective.anchor_radius", &o.anchor_radius, "only karcher objectives take an anchor radius")?;
            }
            other => {
                return Err(Error::Validation(format!(
                    "objective.kind: unknown kind \"{other}\" (squared_distance | karcher | random_quadratic)"
                )))
            }
        }

        let me = &self.method;
        match me.algorithm.as_str() {
            "rgd" => {
                forbid("method.strategy", &me.strategy, "the gradient-descent baseline takes no strategy")?;
                forbid("method.sigma", &me.sigma, "the gradient-descent baseline takes no error budget")?;
                forbid("method.a0", &me.a0, "the gradient-descent baseline has no aggregation weights")?;
                forbid("method.b0", &me.b0, "the gradient-descent baseline has no aggregation weights")?;
                forbid("method.w_rule", &me.w_rule, "the gradient-descent baseline has no anchor rule")?;
                forbid("method.offset_fraction", &me.offset_fraction, "only gen_raxgd takes an offset fraction")?;
                if let Some(l) = &me.lambda {
                    l.explicit("method.lambda")?;
                }
            }
            "euclid" | "riemann" => {
                if me.algorithm == "euclid" && m.kind != "euclidean" {
                    return Err(Error::Validation(
                        "method.algorithm: the flat-space loop needs manifold.kind = \"euclidean\"".into(),
                    ));
                }
                let strategy = me.strategy.as_deref().ok_or_else(|| {
                    Error::Validation("method.strategy: required for euclid/riemann runs".into())
                })?;
                match strategy {
                    "exact_quadratic" => {
                        if m.kind != "euclidean" {
                            return Err(Error::Validation(
                                "method.strategy: exact proximal steps are flat-space only".into(),
                            ));
                        }
                        forbid("method.sigma", &me.sigma, "exact proximal steps take no error budget")?;
                    }
                    "two_step_grad" => {
                        if let Some(s) = me.sigma {
                            if (s - 0.75).abs() > 1e-12 {
                                return Err(Error::Validation(format!(
                                    "method.sigma: the two-step strategy pins sigma = 3/4, got {s}"
                                )));
                            }
                        }
                    }
                    "nesterov_grad" | "raxgd" | "gen_raxgd" => {
                        match me.sigma {
                            Some(s) if s > 0.0 && s < 1.0 => {}
                            Some(s) => {
                                return Err(Error::Validation(format!(
                                    "method.sigma: must lie in (0, 1), got {s}"
                                )))
                            }
                            None => {
                                return Err(Error::Validation(
                                    "method.sigma: required for this strategy".into(),
                                ))
                            }
                        }
                    }
                    other => {
                        return Err(Error::Validation(format!(
                            "method.strategy: unknown strategy \"{other}\" (exact_quadratic | nesterov_grad | two_step_grad | raxgd | gen_raxgd)"
                        )))
                    }
                }
                if strategy != "gen_raxgd" {
                    forbid("method.offset_fraction", &me.offset_fraction, "only gen_raxgd takes an offset fraction")?;
                } else if let Some(fr) = me.offset_fraction {
                    if !(fr > 0.0 && fr < 1.0) {
                        return Err(Error::Validation(format!(
                            "method.offset_fraction: must lie in (0, 1), got {fr}"
                        )));
                    }
                }
                match me.w_rule.as_deref() {
                    None | Some("strategy") | Some("y_anchored") | Some("midpoint") => {}
                    Some(other) => {
                        return Err(Error::Validation(format!(
                            "method.w_rule: unknown rule \"{other}\" (strategy | y_anchored | midpoint)"
                        )))
                    }
                }
                if me.algorithm == "euclid" && !matches!(me.w_rule.as_deref(), None | Some("strategy")) {
                    return Err(Error::Validation(
                        "method.w_rule: the flat-space loop has no anchor rule; omit it or use \"strategy\"".into(),
                    ));
                }
                if me.w_rule.as_deref() == Some("y_anchored")
                    && !matches!(strategy, "nesterov_grad" | "two_step_grad")
                {
                    return Err(Error::Validation(
                        "method.w_rule: y_anchored needs a strategy that anchors at its reference point (nesterov_grad | two_step_grad)".into(),
                    ));
                }
                if let Some(a0) = me.a0 {
                    if !(a0 > 0.0) {
                        return Err(Error::Validation(format!("method.a0: must be positive, got {a0}")));
                    }
                }
                if let Some(l) = &me.lambda {
                    l.explicit("method.lambda")?;
                }
                if let Some(b) = &me.b0 {
                    b.explicit("method.b0")?;
                }
            }
            other => {
                return Err(Error::Validation(format!(
                    "method.algorithm: unknown algorithm \"{other}\" (euclid | riemann | rgd)"
                )))
            }
        }

        let r = &self.run;
        if let Some(t) = r.target_gap {
            if !(t > 0.0) {
                return Err(Error::Validation(format!("run.target_gap: must be positive, got {t}")));
            }
        }
        if let Some(rad) = r.x0_radius {
            if !(rad >= 0.0) || !rad.is_finite() {
                return Err(Error::Validation(format!("run.x0_radius: must be finite and >= 0, got {rad}")));
            }
        }
        Ok(())
    }
}

/// Parse and validate a config from TOML text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| Error::Validation(format!("config parse error: {}", e.message())))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Read, parse, and validate a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::Validation(msg) => Error::Validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn build_manifold(mc: &ManifoldSection) -> Result<Manifold> {
    match mc.kind.as_str() {
        "euclidean" => Ok(Manifold::euclidean(mc.dim)),
        "hyperbolic" => Manifold::hyperbolic(mc.dim, mc.curvature.unwrap_or(1.0)),
        other => Err(Error::Validation(format!("manifold.kind: unknown kind \"{other}\""))),
    }
}

/// Materialize the problem a config describes: the objective and the sampled
/// starting point (at exactly `run.x0_radius` from the optimum).
pub fn build_experiment(cfg: &ExperimentConfig) -> Result<(Objective, Point)> {
    cfg.validate()?;
    let m = build_manifold(&cfg.manifold)?;
    let oc = &cfg.objective;
    let f = match oc.kind.as_str() {
        "squared_distance" => Objective::squared_distance(&m, m.origin(), oc.domain_radius.unwrap())?,
        "karcher" => {
            let mut rng = ChaCha20Rng::seed_from_u64(oc.seed.unwrap_or(0));
            let n = oc.anchors.unwrap();
            let radius = oc.anchor_radius.unwrap();
            let anchors: Vec<Point> =
                (0..n).map(|_| m.random_in_ball(&mut rng, &m.origin(), radius)).collect();
            let weights = vec![1.0 / n as f64; n];
            Objective::karcher(&m, anchors, weights, oc.domain_radius.unwrap()).map_err(|e| match e {
                Error::Validation(msg) => Error::Validation(format!("objective: {msg}")),
                other => other,
            })?
        }
        "random_quadratic" => {
            Objective::random_quadratic(cfg.manifold.dim, oc.condition.unwrap(), oc.seed.unwrap_or(0))?
        }
        other => return Err(Error::Validation(format!("objective.kind: unknown kind \"{other}\""))),
    };
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.run.seed.unwrap_or(0));
    let center = f.optimum().expect("built-in objectives carry an optimum").clone();
    let x0 = f
        .manifold()
        .random_point(&mut rng, &center, cfg.run.x0_radius.unwrap_or(1.0));
    Ok((f, x0))
}

fn parse_strategy(me: &MethodSection) -> Result<Strategy> {
    Ok(match me.strategy.as_deref() {
        Some("exact_quadratic") => Strategy::ExactQuadratic,
        Some("nesterov_grad") => Strategy::NesterovGrad,
        Some("two_step_grad") => Strategy::TwoStepGrad,
        Some("raxgd") => Strategy::Raxgd,
        Some("gen_raxgd") => Strategy::GenRaxgd {
            offset: OffsetRule::HashPerturb { fraction: me.offset_fraction.unwrap_or(0.5) },
        },
        other => {
            return Err(Error::Validation(format!(
                "method.strategy: unknown or missing strategy {other:?}"
            )))
        }
    })
}

fn parse_w_rule(me: &MethodSection) -> WRule {
    match me.w_rule.as_deref() {
        Some("y_anchored") => WRule::YAnchored,
        Some("midpoint") => WRule::Midpoint,
        _ => WRule::StrategyDetermined,
    }
}

/// Result of a single experiment, with the resolved parameters that "auto"
/// fields expanded to.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub records: Vec<TraceRecord>,
    pub diagnostics: RunDiagnostics,
    pub lambda: f64,
    pub sigma: f64,
}

/// Run the experiment a config describes. With `run.checks` enabled
/// (the default), a finished run that violated a hard conformance bound —
/// coefficient-recursion residual, or potential/re-basing/analysis-point
/// bounds on runs the supporting theory covers — is reported as a
/// certificate failure.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let (f, x0) = build_experiment(cfg)?;
    let me = &cfg.method;
    if me.algorithm == "rgd" {
        let auto = 1.0 / f.l();
        let lambda = match &me.lambda {
            Some(l) => l.resolve("method.lambda", || auto)?,
            None => auto,
        };
        let out = rgd_baseline(&f, lambda, x0, cfg.run.max_iters, cfg.run.target_gap)?;
        if cfg.run.checks.unwrap_or(true) && out.diagnostics.worst_potential_excess > 0.0 {
            return Err(Error::Certificate(format!(
                "gradient descent failed to decrease monotonically (worst excess {:.3e})",
                out.diagnostics.worst_potential_excess
            )));
        }
        return Ok(ExperimentOutcome {
            records: out.records,
            diagnostics: out.diagnostics,
            lambda,
            sigma: 0.0,
        });
    }

    let strategy = parse_strategy(me)?;
    let sigma = match me.strategy.as_deref() {
        Some("exact_quadratic") => 0.0,
        Some("two_step_grad") => 0.75,
        _ => me.sigma.unwrap_or(0.5),
    };
    let lambda = match &me.lambda {
        Some(l) => l.resolve("method.lambda", || strategy.auto_lambda(&f, sigma))?,
        None => strategy.auto_lambda(&f, sigma),
    };
    let b0 = match &me.b0 {
        Some(b) => b.explicit("method.b0")?,
        None => None,
    };
    let rc = RunConfig {
        algorithm: if me.algorithm == "euclid" { Algorithm::Euclid } else { Algorithm::Riemann },
        w_rule: parse_w_rule(me),
        lambda,
        sigma,
        a0: me.a0.unwrap_or(1.0),
        b0,
        x0,
        max_iters: cfg.run.max_iters,
        target_gap: cfg.run.target_gap,
    };
    let out = crate::solvers::run(&f, strategy.clone(), &rc)?;
    if cfg.run.checks.unwrap_or(true) {
        enforce_run_checks(&out.diagnostics, &strategy, rc.w_rule)?;
    }
    Ok(ExperimentOutcome { records: out.records, diagnostics: out.diagnostics, lambda, sigma })
}

/// Post-run conformance gate used when `run.checks` is enabled.
fn enforce_run_checks(d: &RunDiagnostics, strategy: &Strategy, w_rule: WRule) -> Result<()> {
    if d.worst_xi_residual > 1e-10 {
        return Err(Error::Certificate(format!(
            "coefficient recursion residual {:.3e} exceeds 1e-10",
            d.worst_xi_residual
        )));
    }
    // The potential/re-basing guarantees only cover on-geodesic anchors under
    // the standard interpolation; off-geodesic and midpoint runs are
    // diagnostic-only.
    let on_geodesic =
        w_rule == WRule::YAnchored || (w_rule == WRule::StrategyDetermined && strategy.anchors_at_reference());
    if on_geodesic && !d.off_theory {
        if d.worst_potential_excess > 0.0 {
            return Err(Error::Certificate(format!(
                "potential increased beyond tolerance (worst excess {:.3e})",
                d.worst_potential_excess
            )));
        }
        if d.worst_rebase_excess > 1e-9 {
            return Err(Error::Certificate(format!(
                "tangent-distance re-basing exceeded its distortion budget by {:.3e}",
                d.worst_rebase_excess
            )));
        }
        if d.worst_y_gap_excess > 1e-9 {
            return Err(Error::Certificate(format!(
                "analysis-point deviation exceeded the additional-distortion bound by {:.3e}",
                d.worst_y_gap_excess
            )));
        }
    }
    Ok(())
}

/// Riemannian gradient descent `x_{k+1} = Exp_{x_k}(-λ·grad f(x_k))`, the
/// baseline the accelerated loops are compared against. Requires `λ ≤ 1/L`,
/// which makes the gap sequence monotone; trace rows use the conventions
/// `A = 1`, `B = a = 0`, `θ = δ = 1`, `ξ = 0`, `potential = f_gap`.
pub fn rgd_baseline(
    f: &Objective,
    lambda: f64,
    x0: Point,
    max_iters: usize,
    target_gap: Option<f64>,
) -> Result<RunOutcome> {
    if !(lambda > 0.0) || lambda > (1.0 / f.l()) * (1.0 + 1e-9) {
        return Err(Error::Validation(format!(
            "gradient descent requires 0 < lambda <= 1/L = {:.6e}, got {lambda}",
            1.0 / f.l()
        )));
    }
    let m = f.manifold();
    let mut x = m.point(x0.as_slice().to_vec())?;
    let mut diagnostics = RunDiagnostics {
        worst_domain_violation: f.domain_violation(&x),
        ..RunDiagnostics::default()
    };
    let record = |k: usize, x: &Point| -> TraceRecord {
        let gap = f.value(x) - f.optimal_value().unwrap_or(0.0);
        TraceRecord {
            k,
            f_gap: gap,
            potential: gap,
            acc_weight: 1.0,
            dist_weight: 0.0,
            inc_weight: 0.0,
            theta: 1.0,
            delta: 1.0,
            xi: 0.0,
            dist_to_opt: f.optimum().map_or(f64::NAN, |opt| m.distance(x, opt)),
            d_wz: 0.0,
            iprox_residual: 0.0,
            y_yprime_gap: 0.0,
            xi_recursion_residual: 0.0,
        }
    };
    let mut records = vec![record(0, &x)];
    for k in 0..max_iters {
        let last = records.last().unwrap().f_gap;
        if let Some(t) = target_gap {
            if last <= t {
                diagnostics.stopped_at_target = true;
                break;
            }
        }
        let g = f.grad(&x);
        x = m.exp_map(&x, &g.scale(-lambda));
        let r = record(k + 1, &x);
        diagnostics.worst_potential_increase = diagnostics.worst_potential_increase.max(r.f_gap - last);
        diagnostics.worst_potential_excess =
            diagnostics.worst_potential_excess.max(r.f_gap - last * (1.0 + 1e-10));
        diagnostics.worst_domain_violation = diagnostics.worst_domain_violation.max(f.domain_violation(&x));
        records.push(r);
    }
    if let Some(t) = target_gap {
        if records.last().unwrap().f_gap <= t {
            diagnostics.stopped_at_target = true;
        }
    }
    Ok(RunOutcome { records, diagnostics })
}

fn write_record<W: Write>(out: &mut W, r: &TraceRecord) -> std::io::Result<()> {
    writeln!(
        out,
        "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
        r.k,
        r.f_gap,
        r.potential,
        r.acc_weight,
        r.dist_weight,
        r.inc_weight,
        r.theta,
        r.delta,
        r.xi,
        r.dist_to_opt,
        r.d_wz,
        r.iprox_residual,
        r.y_yprime_gap,
        r.xi_recursion_residual
    )
}

/// Emit a trace as CSV: a version comment, the header, then one row per
/// record with floats at full precision (17 significant digits), so repeated
/// runs produce byte-identical files.
pub fn write_trace<W: Write>(records: &[TraceRecord], mut out: W) -> Result<()> {
    writeln!(out, "{TRACE_VERSION_LINE}")?;
    writeln!(out, "{}", TRACE_COLUMNS.join(","))?;
    for r in records {
        write_record(&mut out, r)?;
    }
    Ok(())
}

/// Emit several labeled traces as one CSV with a leading `method` column.
pub fn write_comparison<W: Write>(runs: &[(String, Vec<TraceRecord>)], mut out: W) -> Result<()> {
    writeln!(out, "{COMPARE_VERSION_LINE}")?;
    writeln!(out, "method,{}", TRACE_COLUMNS.join(","))?;
    for (label, records) in runs {
        let clean = label.replace(',', "_");
        for r in records {
            write!(out, "{clean},")?;
            write_record(&mut out, r)?;
        }
    }
    Ok(())
}

/// Per-method digest of a comparison, derived purely from trace records.
#[derive(Clone, Debug)]
pub struct MethodSummary {
    pub label: String,
    /// First `k` whose gap reached the config's `target_gap`, if it did.
    pub iterations_to_target: Option<usize>,
    pub final_gap: f64,
    pub worst_iprox_residual: f64,
    /// Largest increase between consecutive potential values (negative means
    /// the potential only ever decreased).
    pub worst_potential_increase: f64,
    /// Mean of `ξ` over the last ⌈n/5⌉ records.
    pub xi_tail_mean: f64,
    /// Mean of `δ` over the last ⌈n/5⌉ records.
    pub delta_tail_mean: f64,
}

/// Digest one trace. Usable on any record list — comparison reports are
/// recomputable from stored CSVs.
pub fn summarize(label: &str, records: &[TraceRecord], target_gap: Option<f64>) -> MethodSummary {
    let tail_len = records.len().div_ceil(5).max(1).min(records.len().max(1));
    let tail = &records[records.len().saturating_sub(tail_len)..];
    let mean = |get: fn(&TraceRecord) -> f64| -> f64 {
        if tail.is_empty() {
            f64::NAN
        } else {
            tail.iter().map(get).sum::<f64>() / tail.len() as f64
        }
    };
    let mut worst_increase = f64::NEG_INFINITY;
    for pair in records.windows(2) {
        worst_increase = worst_increase.max(pair[1].potential - pair[0].potential);
    }
    MethodSummary {
        label: label.to_owned(),
        iterations_to_target: target_gap
            .and_then(|t| records.iter().find(|r| r.f_gap <= t).map(|r| r.k)),
        final_gap: records.last().map_or(f64::NAN, |r| r.f_gap),
        worst_iprox_residual: records.iter().map(|r| r.iprox_residual).fold(0.0, f64::max),
        worst_potential_increase: if records.len() < 2 { 0.0 } else { worst_increase },
        xi_tail_mean: mean(|r| r.xi),
        delta_tail_mean: mean(|r| r.delta),
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub methods: Vec<MethodSummary>,
}

impl ComparisonReport {
    /// Human-readable table for the CLI.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "{:<28} {:>12} {:>13} {:>13} {:>13} {:>10} {:>10}\n",
            "method", "iters-to-tgt", "final-gap", "worst-iprox", "worst-p-inc", "xi-tail", "delta-tail"
        ));
        for m in &self.methods {
            let iters = m
                .iterations_to_target
                .map_or_else(|| "-".to_owned(), |k| k.to_string());
            s.push_str(&format!(
                "{:<28} {:>12} {:>13.3e} {:>13.3e} {:>13.3e} {:>10.5} {:>10.5}\n",
                m.label,
                iters,
                m.final_gap,
                m.worst_iprox_residual,
                m.worst_potential_increase,
                m.xi_tail_mean,
                m.delta_tail_mean
            ));
        }
        s
    }
}

/// The report plus each method's full trace (for the merged CSV).
#[derive(Clone, Debug)]
pub struct CompareOutcome {
    pub report: ComparisonReport,
    pub runs: Vec<(String, Vec<TraceRecord>)>,
}

/// Run several configs against the *same* problem and summarize them
/// side-by-side. All entries must agree on the manifold and objective
/// sections and on the starting point (`run.seed`, `run.x0_radius`); methods
/// are free to differ.
pub fn compare(entries: &[(String, ExperimentConfig)]) -> Result<CompareOutcome> {
    let (first_label, first) = entries
        .first()
        .ok_or_else(|| Error::Validation("comparison needs at least one configuration".into()))?;
    for (label, cfg) in &entries[1..] {
        if cfg.manifold != first.manifold {
            return Err(Error::Validation(format!(
                "config \"{label}\": manifold section differs from \"{first_label}\" — comparisons need a shared problem"
            )));
        }
        if cfg.objective != first.objective {
            return Err(Error::Validation(format!(
                "config \"{label}\": objective section differs from \"{first_label}\" — comparisons need a shared problem"
            )));
        }
        if cfg.run.seed != first.run.seed || cfg.run.x0_radius != first.run.x0_radius {
            return Err(Error::Validation(format!(
                "config \"{label}\": run.seed/run.x0_radius differ from \"{first_label}\" — comparisons need a shared starting point"
            )));
        }
    }
    let mut runs = Vec::with_capacity(entries.len());
    let mut methods = Vec::with_capacity(entries.len());
    for (label, cfg) in entries {
        let outcome = run_experiment(cfg)?;
        methods.push(summarize(label, &outcome.records, cfg.run.target_gap));
        runs.push((label.clone(), outcome.records));
    }
    Ok(CompareOutcome { report: ComparisonReport { methods }, runs })
}

/// Built-in experiment presets, embedded so the binary is self-contained;
/// the same files live under `crates/ahpe/presets/` for direct use.
pub const PRESETS: [(&str, &str, &str); 7] = [
    (
        "flat-quadratic",
        "50-dim random quadratic (condition 1e4), flat loop, exact proximal steps at lambda = 1/L",
        include_str!("../../presets/flat-quadratic.toml"),
    ),
    (
        "flat-pair-euclid",
        "flat loop on a random quadratic — pair with flat-pair-riemann to watch the curved loop reproduce it",
        include_str!("../../presets/flat-pair-euclid.toml"),
    ),
    (
        "flat-pair-riemann",
        "curved loop on the same flat quadratic with b0 = (1+mu*a0)/2, matching flat-pair-euclid pointwise",
        include_str!("../../presets/flat-pair-riemann.toml"),
    ),
    (
        "hyper-karcher-nesterov",
        "Frechet mean of 20 anchors on 10-dim hyperbolic space, y-anchored gradient strategy",
        include_str!("../../presets/hyper-karcher-nesterov.toml"),
    ),
    (
        "hyper-raxgd-local",
        "locally-initialized gradient-output strategy on hyperbolic space (condition ~1e2)",
        include_str!("../../presets/hyper-raxgd-local.toml"),
    ),
    (
        "hyper-compare-ahpe",
        "accelerated loop on a condition-1e3 hyperbolic distance objective — pair with hyper-compare-rgd",
        include_str!("../../presets/hyper-compare-ahpe.toml"),
    ),
    (
        "hyper-compare-rgd",
        "gradient-descent baseline on the same problem as hyper-compare-ahpe",
        include_str!("../../presets/hyper-compare-rgd.toml"),
    ),
];

/// Parse an embedded preset by name.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    for (n, _, text) in PRESETS {
        if n == name {
            return parse_config(text);
        }
    }
    Err(Error::Validation(format!(
        "unknown preset \"{name}\" (see `presets list`)"
    )))
}
