//! The accelerated hybrid proximal extragradient loops — the flat-space
//! recursion and its curved-space generalization — plus coefficient algebra,
//! potential telemetry, and per-iteration conformance diagnostics.
//!
//! Both loops maintain iterates `x_k` (solution estimate), `z_k` (dual-like
//! anchor), weights `A_k` (aggregated) and `a_k` (incremental), and drive the
//! potential
//!
//! ```text
//! p_k = A_k·(f(x_k) - f*) + B_k·d²_{w_k}(z_k, x*)
//! ```
//!
//! downward; `f(x_k) - f* ≤ p_0/A_k` then follows from `p_k ≤ p_0`. The flat
//! loop fixes `B_k = (1 + μA_k)/2`. The curved loop treats `B_k` as state,
//! inflating it each round by the inverse distortion rate `δ_k` so that
//! re-basing tangent measurements from `w_k` to `w_{k+1}` never wins back
//! potential. Setting `δ_k ≡ 1` and `B_0 = (1 + μA_0)/2` makes the curved
//! loop reproduce the flat one exactly (a property the test suite checks
//! pointwise).
//!
//! Convergence telemetry centers on `ξ_k = a_k/A_k`: it obeys the recursion
//! `δ_k·ξ_{k+1}² = ξ_k²(1 - ξ_{k+1}) + (μλ/(1+μλ))·δ_k·ξ_{k+1}` exactly (an
//! algebraic consequence of the updates), and as `δ_k → 1` it is attracted to
//! `√(μλ/(1+μλ))`, at which point `A_{k+1}/A_k → 1 + μλ + √(μλ(1+μλ))` — the
//! accelerated growth rate.
//!
//! Solver state is single-owner mutable; distinct runs share nothing mutable
//! and may execute in parallel.

use crate::distortion::{s_rate, valid_rate};
use crate::iprox::Strategy;
use crate::manifold::{Manifold, ManifoldKind, Point, Tangent};
use crate::objectives::Objective;
use crate::{Error, Result};

/// Column names of a trace row, in emission order.
pub const TRACE_COLUMNS: [&str; 14] = [
    "k",
    "f_gap",
    "potential",
    "A",
    "B",
    "a",
    "theta",
    "delta",
    "xi",
    "dist_to_opt",
    "d_wz",
    "iprox_residual",
    "y_yprime_gap",
    "xi_recursion_residual",
];

/// Which update loop to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Flat-space loop: linear-combination updates, `B_k` implied.
    Euclid,
    /// Curved-space loop: tangent-space updates with distortion tracking.
    Riemann,
}

/// How the anchor `w_{k+1}` is chosen relative to the geodesic through
/// `x_k` and `z_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WRule {
    /// Let the proximal strategy place its own anchor (gradient-output
    /// strategies put `w` off the geodesic; the local-acceleration regime).
    StrategyDetermined,
    /// Require the anchor to be the reference point `y_k` itself, which lies
    /// on the geodesic; only strategies with `w = y` qualify.
    YAnchored,
    /// Experimental: run the strategy at the geodesic midpoint of
    /// `(x_k, z_k)` instead of the weighted interpolate `y_k`. The anchor
    /// stays on the geodesic but the supporting theory does not cover the
    /// changed interpolation, so runs are flagged and no shipped preset uses
    /// this rule.
    Midpoint,
}

/// Full iteration state of either loop.
#[derive(Clone, Debug)]
pub struct SolverState {
    /// Iteration index `k`.
    pub k: usize,
    /// Solution estimate `x_k`.
    pub x: Point,
    /// Aggregation anchor `z_k`.
    pub z: Point,
    /// Tangent-space base point `w_k` (`x_k` by convention in the flat loop).
    pub w: Point,
    /// Aggregated weight `A_k` (column `A`); the rate bound is `p_0/A_k`.
    pub acc_weight: f64,
    /// Potential distance coefficient `B_k` (column `B`).
    pub dist_weight: f64,
    /// Incremental weight `a_k` (column `a`); `a_0 := A_0·ξ_0` by convention.
    pub inc_weight: f64,
    /// The contraction parameter `θ_k` the loop will use for the step out of
    /// this state (the flat loop reports its implied value
    /// `(1+μA_k)/(1+μA_{k+1})`).
    pub theta: f64,
    /// Distortion rate `δ_k = T_K(d(w_k, z_k))` for the step out of this
    /// state (1 in the flat loop).
    pub delta: f64,
    /// `ξ_k = a_k/A_k`, seeded as `ξ_0 = √(2λB_0/((1+μλ)A_0))`.
    pub xi: f64,
    /// Step size `λ` (constant per run).
    pub lambda: f64,
    /// Effective relative error budget `σ` (0 for exact proximal steps).
    pub sigma: f64,
    /// The most recent proximal reference point `y` (`x_0` before any step).
    pub y: Point,
    /// The analysis point `y′` of the last curved step, when one was taken.
    pub y_prime: Option<Point>,
    /// Potential `p_k`; `None` when the objective's optimum is unknown.
    pub potential: Option<f64>,
}

/// One emitted telemetry row. Scalars are finite whenever the objective
/// carries a known optimum (all built-in objectives do); without one,
/// `f_gap` holds the raw value `f(x_k)` and `potential`/`dist_to_opt` are NaN.
#[derive(Clone, Copy, Debug)]
pub struct TraceRecord {
    pub k: usize,
    /// `f(x_k) - f*` (may sit at the cancellation floor of `f*` late in a
    /// run, including tiny negative values for numerically-computed optima).
    pub f_gap: f64,
    pub potential: f64,
    /// Column `A`.
    pub acc_weight: f64,
    /// Column `B`.
    pub dist_weight: f64,
    /// Column `a`.
    pub inc_weight: f64,
    pub theta: f64,
    pub delta: f64,
    pub xi: f64,
    pub dist_to_opt: f64,
    /// `d(w_k, z_k)` — the distance that determines `delta`.
    pub d_wz: f64,
    /// Certificate residual of the step that produced this state (0 at k=0).
    pub iprox_residual: f64,
    /// `d_{w_k}(y_{k-1}, y′_{k-1})` of the step that produced this state.
    pub y_yprime_gap: f64,
    /// Recursion residual for the pair `(ξ_{k-1}, ξ_k)` with `δ_{k-1}`.
    pub xi_recursion_residual: f64,
}

/// Transition-level diagnostics returned by a single step.
#[derive(Clone, Copy, Debug, Default)]
pub struct StepInfo {
    /// Left-hand side of the proximal inequality minus the budget `ε`.
    pub iprox_residual: f64,
    /// `d_{w_{k+1}}(y_k, y′_k)` (0 in the flat loop).
    pub y_yprime_gap: f64,
    /// `2·d*·S_K(d(x_k,z_k) + d*)` with `d*` the distance from `w_{k+1}` to
    /// the `x_k`–`z_k` geodesic; the recorded gap must stay below this.
    pub y_gap_bound: f64,
    /// `|δξ′² - ξ²(1-ξ′) - (μλ/(1+μλ))δξ′|` for this transition.
    pub xi_recursion_residual: f64,
    /// `d²_{w_{k+1}}(z_k, x*) - δ_k·d²_{w_k}(z_k, x*)` when `x*` is known —
    /// at most ~1e-9 if `δ_k` really is a valid re-basing rate.
    pub rebase_excess: Option<f64>,
}

/// Parameters of the local-regularity regime for off-geodesic anchors, with
/// the admissibility ceiling on the neighborhood scale `tau`.
#[derive(Clone, Copy, Debug)]
pub struct RegularityParams {
    pub omega: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// Contraction budget in `(0, 1)`.
    pub c: f64,
    /// Neighborhood scale; admissible when at most [`RegularityParams::tau_ceiling`].
    pub tau: f64,
}

impl RegularityParams {
    /// `min{ √(c/(2(2ω+5))), √(25(1-σ)c/(2ρ₁(7+10ρ₂²))) }`.
    pub fn tau_ceiling(&self, sigma: f64) -> f64 {
        let first = (self.c / (2.0 * (2.0 * self.omega + 5.0))).sqrt();
        let second =
            (25.0 * (1.0 - sigma) * self.c / (2.0 * self.rho1 * (7.0 + 10.0 * self.rho2 * self.rho2))).sqrt();
        first.min(second)
    }

    pub fn is_admissible(&self, sigma: f64) -> bool {
        self.tau <= self.tau_ceiling(sigma)
    }
}

/// The incremental weight `a_{k+1}` of the flat loop:
/// the positive root of `a² = λ(A_{k+1} + μ(a·A_k + A_k·A_{k+1}))` with
/// `A_{k+1} = A_k + a`, in closed form.
///
/// Satisfies `a_{k+1} ≥ A_k·max{μλ, √(μλ)}`, which drives the geometric
/// growth of `A_k`.
pub fn euclid_coeff(acc_weight: f64, mu: f64, lambda: f64) -> f64 {
    let t = (1.0 + 2.0 * mu * acc_weight) * lambda;
    0.5 * (t + (t * t + 4.0 * (1.0 + mu * acc_weight) * acc_weight * lambda).sqrt())
}

/// The contraction parameter the flat loop implies: `(1+μA_k)/(1+μA_{k+1})`.
/// Under this value the flat `z`-update coincides with the curved loop's
/// tangent-space combination, which is what makes the flat reduction exact.
fn flat_theta(acc_weight: f64, mu: f64, lambda: f64) -> f64 {
    let next = acc_weight + euclid_coeff(acc_weight, mu, lambda);
    (1.0 + mu * acc_weight) / (1.0 + mu * next)
}

/// The contraction parameter `θ_k` of the curved loop: the smaller root of
/// `B(1-θ)² = μλθ((1-θ)B + (μ/2)δA)`, i.e. of
/// `(1+μλ)Bθ² - (2B + μλB + μ²λδA/2)θ + B = 0`.
///
/// The polynomial is positive at 0, negative at 1 (for `A > 0`), so exactly
/// one root lies in `(0,1)`; the stable quadratic formula avoids the
/// cancellation the textbook formula suffers when `μλ` is small. After the
/// weight updates this root is equivalent to `A_{k+1} = (1+μλ)(θa_{k+1}+A_k)`.
pub fn riemann_theta(dist_weight: f64, acc_weight: f64, mu: f64, lambda: f64, delta: f64) -> Result<f64> {
    if !(dist_weight > 0.0) || !(acc_weight >= 0.0) || !(mu > 0.0) || !(lambda > 0.0) || !(delta >= 1.0) {
        return Err(Error::Validation(format!(
            "contraction solve needs B > 0, A ≥ 0, mu > 0, lambda > 0, delta ≥ 1 (got B={dist_weight}, A={acc_weight}, mu={mu}, lambda={lambda}, delta={delta})"
        )));
    }
    let qa = (1.0 + mu * lambda) * dist_weight;
    let qb = -(2.0 * dist_weight + mu * lambda * dist_weight + 0.5 * mu * mu * lambda * delta * acc_weight);
    let qc = dist_weight;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(Error::Numeric(format!(
            "contraction quadratic has no real root (discriminant {disc:.3e})"
        )));
    }
    let theta = 2.0 * qc / (-qb + disc.sqrt());
    if theta > 0.0 && theta < 1.0 {
        Ok(theta)
    } else {
        Err(Error::Numeric(format!("contraction parameter {theta} escaped (0, 1)")))
    }
}

/// `|δξ′² - ξ²(1-ξ′) - (μλ/(1+μλ))·δξ′|` for a consecutive pair
/// `(ξ_k, ξ_{k+1})` produced under distortion `δ_k` and constant `λ`.
///
/// Zero in exact arithmetic along any trajectory of either loop; observed
/// values stay at roundoff scale (well under 1e-10).
pub fn xi_recursion_residual(xi_k: f64, xi_k1: f64, delta_k: f64, mu: f64, lambda: f64) -> f64 {
    (delta_k * xi_k1 * xi_k1
        - xi_k * xi_k * (1.0 - xi_k1)
        - mu * lambda / (1.0 + mu * lambda) * delta_k * xi_k1)
        .abs()
}

/// The potential `p_k = A_k·(f(x_k) - f*) + B_k·d²_{w_k}(z_k, x*)`, with the
/// distance measured in the tangent space at `w_k`. `None` when the
/// objective's optimum is unknown (the loops never need `x*`; only this
/// diagnostic does).
pub fn potential_value(state: &SolverState, f: &Objective) -> Option<f64> {
    let opt = f.optimum()?;
    let fstar = f.optimal_value()?;
    let m = f.manifold();
    let d = m.tangent_distance(&state.w, &state.z, opt);
    Some(state.acc_weight * (f.value(&state.x) - fstar) + state.dist_weight * d * d)
}

/// Distance from `p` to the geodesic segment joining `x` and `y`, by
/// golden-section search — the distance function is convex along a geodesic,
/// so the search converges unconditionally.
pub fn point_to_geodesic_distance(m: &Manifold, p: &Point, x: &Point, y: &Point) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |t: f64| m.distance(p, &m.geodesic_interpolate(x, y, t));
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut t1 = hi - phi * (hi - lo);
    let mut t2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (eval(t1), eval(t2));
    for _ in 0..90 {
        if f1 <= f2 {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - phi * (hi - lo);
            f1 = eval(t1);
        } else {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + phi * (hi - lo);
            f2 = eval(t2);
        }
    }
    eval(0.5 * (lo + hi)).min(f1).min(f2)
}

/// The additional-distortion ceiling on `d_{w}(y, y′)`:
/// `2·d*·S_K(d(x, z) + d*)` where `d*` is the distance from `w` to the
/// `x`–`z` geodesic. Zero when `w` lies on the geodesic or in flat space.
pub fn additional_distortion_bound(m: &Manifold, w: &Point, x: &Point, z: &Point) -> f64 {
    let dstar = point_to_geodesic_distance(m, w, x, z);
    2.0 * dstar * s_rate(m.curvature(), m.distance(x, z) + dstar)
}

/// One step of the flat loop. Returns the successor state and the
/// transition diagnostics; the strategy's certificate is verified internally
/// and a positive residual aborts the step.
pub fn euclid_step(state: &SolverState, f: &Objective, strategy: &Strategy) -> Result<(SolverState, StepInfo)> {
    let m = f.manifold();
    let mu = f.mu();
    let lambda = state.lambda;
    let a_inc = euclid_coeff(state.acc_weight, mu, lambda);
    let acc = state.acc_weight;
    let acc_new = acc + a_inc;

    // y_k = x_k + [a(1+μA)/(A' + μ(aA + AA'))]·(z_k - x_k)
    let y_coef = a_inc * (1.0 + mu * acc) / (acc_new + mu * (a_inc * acc + acc * acc_new));
    let y = Point::from_manifold_coords(m, state.x.coords() + (state.z.coords() - state.x.coords()) * y_coef);

    let cert = strategy.apply(f, &y, lambda, state.sigma)?;

    // z_{k+1} = z_k + [a/(1+μA')]·(μ(x_{k+1} - z_k) - v)
    let z_coef = a_inc / (1.0 + mu * acc_new);
    let z_new = Point::from_manifold_coords(
        m,
        state.z.coords() + ((cert.x.coords() - state.z.coords()) * mu - cert.v.vec()) * z_coef,
    );

    let dist_new = 0.5 * (1.0 + mu * acc_new);
    let xi_new = a_inc / acc_new;
    let info = StepInfo {
        iprox_residual: cert.lhs_residual,
        xi_recursion_residual: xi_recursion_residual(state.xi, xi_new, 1.0, mu, lambda),
        ..StepInfo::default()
    };
    let mut next = SolverState {
        k: state.k + 1,
        w: cert.x.clone(),
        x: cert.x,
        z: z_new,
        acc_weight: acc_new,
        dist_weight: dist_new,
        inc_weight: a_inc,
        theta: flat_theta(acc_new, mu, lambda),
        delta: 1.0,
        xi: xi_new,
        lambda,
        sigma: state.sigma,
        y,
        y_prime: None,
        potential: None,
    };
    next.potential = potential_value(&next, f);
    Ok((next, info))
}

/// One step of the curved loop.
///
/// Consumes the state's `θ_k`/`δ_k` (which were computed from the state
/// itself), performs the weight updates `B_{k+1} = B_k/(θδ)`,
/// `a_{k+1} = (2/μ)(1-θ)B_{k+1}`, `A_{k+1} = A_k + a_{k+1}`, interpolates the
/// reference point, runs the proximal strategy, and rebuilds `z_{k+1}` in the
/// tangent space at the new anchor:
///
/// ```text
/// z_{k+1} = Exp_{w}((1-θ)·log_w(x_{k+1}) + θ·log_w(z_k) - ((1-θ)/μ)·v)
/// ```
///
/// Also records the analysis point `y′_k` (the same interpolation re-expressed
/// at the new anchor) and its distance to `y_k`, which collapses to roundoff
/// whenever the anchor lies on the `x_k`–`z_k` geodesic.
pub fn riemann_step(
    state: &SolverState,
    f: &Objective,
    strategy: &Strategy,
    w_rule: WRule,
) -> Result<(SolverState, StepInfo)> {
    let m = f.manifold();
    let mu = f.mu();
    let lambda = state.lambda;
    let theta = state.theta;
    let delta = state.delta;

    let dist_new = state.dist_weight / (theta * delta);
    let a_inc = 2.0 / mu * (1.0 - theta) * dist_new;
    let acc_new = state.acc_weight + a_inc;

    let y = match w_rule {
        WRule::Midpoint => m.geodesic_interpolate(&state.x, &state.z, 0.5),
        _ => {
            let t = theta * a_inc / (state.acc_weight + theta * a_inc);
            m.geodesic_interpolate(&state.x, &state.z, t)
        }
    };

    let cert = strategy.apply(f, &y, lambda, state.sigma)?;
    let w_new = cert.w.clone();

    let log_wx = m.log_map(&w_new, &cert.x);
    let log_wz = m.log_map(&w_new, &state.z);
    let combo = Tangent::assemble(
        w_new.clone(),
        log_wx.vec() * (1.0 - theta) + log_wz.vec() * theta - cert.v.vec() * ((1.0 - theta) / mu),
    );
    let z_new = m.exp_map(&w_new, &combo);

    // Analysis point: the same x/z interpolation expressed at the new anchor.
    let frac = state.acc_weight / (state.acc_weight + theta * a_inc);
    let log_wx_old = m.log_map(&w_new, &state.x);
    let combo_prime =
        Tangent::assemble(w_new.clone(), log_wx_old.vec() * frac + log_wz.vec() * (1.0 - frac));
    let y_prime = m.exp_map(&w_new, &combo_prime);

    let info = StepInfo {
        iprox_residual: cert.lhs_residual,
        y_yprime_gap: m.tangent_distance(&w_new, &y, &y_prime),
        y_gap_bound: additional_distortion_bound(m, &w_new, &state.x, &state.z),
        xi_recursion_residual: xi_recursion_residual(state.xi, a_inc / acc_new, delta, mu, lambda),
        rebase_excess: f.optimum().map(|opt| {
            let before = m.tangent_distance(&state.w, &state.z, opt);
            let after = m.tangent_distance(&w_new, &state.z, opt);
            after * after - delta * before * before
        }),
    };

    let delta_next = valid_rate(m, &w_new, &z_new).delta;
    let theta_next = riemann_theta(dist_new, acc_new, mu, lambda, delta_next)?;
    let mut next = SolverState {
        k: state.k + 1,
        x: cert.x,
        z: z_new,
        w: w_new,
        acc_weight: acc_new,
        dist_weight: dist_new,
        inc_weight: a_inc,
        theta: theta_next,
        delta: delta_next,
        xi: a_inc / acc_new,
        lambda,
        sigma: state.sigma,
        y,
        y_prime: Some(y_prime),
        potential: None,
    };
    next.potential = potential_value(&next, f);
    Ok((next, info))
}

/// Per-run inputs of either loop.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub w_rule: WRule,
    /// Step size `λ`, constant over the run.
    pub lambda: f64,
    /// Relative error budget `σ` passed to the strategy (ignored by exact
    /// steps; pinned to 3/4 by the two-step strategy).
    pub sigma: f64,
    /// Initial aggregated weight `A_0 > 0`.
    pub a0: f64,
    /// Initial `B_0`; `None` selects `(1+μA_0)/2` (flat) or `(μ/2)A_0`
    /// (curved — the choice that starts `ξ` exactly at its fixed point).
    pub b0: Option<f64>,
    /// Starting point (also `z_0` and `w_0`).
    pub x0: Point,
    pub max_iters: usize,
    /// Stop once `f(x_k) - f* ≤ target_gap` (needs a known optimal value).
    pub target_gap: Option<f64>,
}

/// Worst-case diagnostics accumulated over a run. All "worst" fields start
/// at negative infinity (or zero for residual-style quantities) and are
/// maximized per step.
#[derive(Clone, Copy, Debug)]
pub struct RunDiagnostics {
    /// Largest certificate residual seen (≤ 1e-12 on accepted runs).
    pub worst_iprox_residual: f64,
    /// Largest raw potential increase `p_{k+1} - p_k` (negative = monotone).
    pub worst_potential_increase: f64,
    /// Largest violation of `p_{k+1} ≤ p_k(1+1e-10)` beyond the cancellation
    /// floor of numerically-known optima (≤ 0 on conforming runs).
    pub worst_potential_excess: f64,
    /// Largest `y_yprime_gap - y_gap_bound` (≤ ~1e-9 when the bound holds).
    pub worst_y_gap_excess: f64,
    /// Largest re-basing excess (see [`StepInfo::rebase_excess`]).
    pub worst_rebase_excess: f64,
    /// Largest ξ-recursion residual.
    pub worst_xi_residual: f64,
    /// How far the worst iterate strayed outside the objective's declared
    /// smoothness domain (0 = never left it).
    pub worst_domain_violation: f64,
    /// Set when the run used a rule the supporting theory does not cover
    /// (currently the experimental midpoint anchor rule).
    pub off_theory: bool,
    /// Whether the run ended by reaching `target_gap`.
    pub stopped_at_target: bool,
}

impl Default for RunDiagnostics {
    fn default() -> Self {
        RunDiagnostics {
            worst_iprox_residual: 0.0,
            worst_potential_increase: f64::NEG_INFINITY,
            worst_potential_excess: f64::NEG_INFINITY,
            worst_y_gap_excess: f64::NEG_INFINITY,
            worst_rebase_excess: f64::NEG_INFINITY,
            worst_xi_residual: 0.0,
            worst_domain_violation: 0.0,
            off_theory: false,
            stopped_at_target: false,
        }
    }
}

/// Trace records plus run-level diagnostics.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub records: Vec<TraceRecord>,
    pub diagnostics: RunDiagnostics,
}

/// A single in-progress run: owns the state, steps it, and accumulates
/// diagnostics. Use [`run`] unless per-step access is needed.
pub struct Solver<'a> {
    f: &'a Objective,
    strategy: Strategy,
    algorithm: Algorithm,
    w_rule: WRule,
    state: SolverState,
    last_info: StepInfo,
    diagnostics: RunDiagnostics,
}

impl<'a> Solver<'a> {
    /// Validate the configuration and build the initial state.
    pub fn new(f: &'a Objective, strategy: Strategy, cfg: &RunConfig) -> Result<Solver<'a>> {
        let m = f.manifold();
        let mu = f.mu();
        if cfg.algorithm == Algorithm::Euclid && m.kind() != ManifoldKind::Euclidean {
            return Err(Error::Validation(
                "the flat-space loop requires a euclidean manifold; use the curved loop".into(),
            ));
        }
        if cfg.algorithm == Algorithm::Riemann && !(mu > 0.0) {
            return Err(Error::Validation(
                "the curved loop requires strong convexity (mu > 0)".into(),
            ));
        }
        if cfg.algorithm == Algorithm::Euclid && cfg.w_rule != WRule::StrategyDetermined {
            return Err(Error::Validation(
                "the flat-space loop has no anchor rule; use the strategy-determined default".into(),
            ));
        }
        if cfg.w_rule == WRule::YAnchored && !strategy.anchors_at_reference() {
            return Err(Error::Validation(
                "the y-anchored rule needs a strategy that anchors at its reference point".into(),
            ));
        }
        if !(cfg.a0 > 0.0) || !cfg.a0.is_finite() {
            return Err(Error::Validation(format!("initial weight a0 must be positive, got {}", cfg.a0)));
        }
        strategy.check_lambda(f, cfg.lambda, cfg.sigma)?;
        let sigma = strategy.effective_sigma(cfg.sigma);

        let implied_b0 = 0.5 * (1.0 + mu * cfg.a0);
        let b0 = match (cfg.algorithm, cfg.b0) {
            (Algorithm::Euclid, None) => implied_b0,
            (Algorithm::Euclid, Some(b)) => {
                if (b - implied_b0).abs() > 1e-12 * implied_b0 {
                    return Err(Error::Validation(format!(
                        "the flat-space potential fixes b0 = (1 + mu*a0)/2 = {implied_b0}; got {b}"
                    )));
                }
                implied_b0
            }
            (Algorithm::Riemann, None) => 0.5 * mu * cfg.a0,
            (Algorithm::Riemann, Some(b)) => {
                if !(b > 0.0) {
                    return Err(Error::Validation(format!("b0 must be positive, got {b}")));
                }
                b
            }
        };

        // Re-validate the start point so external coordinates get the drift
        // policy applied.
        let x0 = m.point(cfg.x0.as_slice().to_vec())?;
        let lambda = cfg.lambda;
        let xi0 = (2.0 * lambda * b0 / ((1.0 + mu * lambda) * cfg.a0)).sqrt();
        let (theta0, delta0) = match cfg.algorithm {
            Algorithm::Euclid => (flat_theta(cfg.a0, mu, lambda), 1.0),
            // w_0 = z_0, so the initial distortion rate is exactly 1.
            Algorithm::Riemann => (riemann_theta(b0, cfg.a0, mu, lambda, 1.0)?, 1.0),
        };
        let mut state = SolverState {
            k: 0,
            x: x0.clone(),
            z: x0.clone(),
            w: x0.clone(),
            acc_weight: cfg.a0,
            dist_weight: b0,
            inc_weight: cfg.a0 * xi0,
            theta: theta0,
            delta: delta0,
            xi: xi0,
            lambda,
            sigma,
            y: x0,
            y_prime: None,
            potential: None,
        };
        state.potential = potential_value(&state, f);
        let diagnostics = RunDiagnostics {
            off_theory: cfg.w_rule == WRule::Midpoint,
            worst_domain_violation: f.domain_violation(&state.x),
            ..RunDiagnostics::default()
        };
        Ok(Solver {
            f,
            strategy,
            algorithm: cfg.algorithm,
            w_rule: cfg.w_rule,
            state,
            last_info: StepInfo::default(),
            diagnostics,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    /// Diagnostics of the most recent step (zeros before the first).
    pub fn last_info(&self) -> &StepInfo {
        &self.last_info
    }

    pub fn diagnostics(&self) -> &RunDiagnostics {
        &self.diagnostics
    }

    /// `f(x_k) - f*`, when the optimal value is known.
    pub fn gap(&self) -> Option<f64> {
        Some(self.f.value(&self.state.x) - self.f.optimal_value()?)
    }

    /// Advance one iteration.
    pub fn step(&mut self) -> Result<()> {
        let before = self.state.potential;
        let (next, info) = match self.algorithm {
            Algorithm::Euclid => euclid_step(&self.state, self.f, &self.strategy)?,
            Algorithm::Riemann => riemann_step(&self.state, self.f, &self.strategy, self.w_rule)?,
        };
        let d = &mut self.diagnostics;
        d.worst_iprox_residual = d.worst_iprox_residual.max(info.iprox_residual);
        d.worst_xi_residual = d.worst_xi_residual.max(info.xi_recursion_residual);
        d.worst_y_gap_excess = d.worst_y_gap_excess.max(info.y_yprime_gap - info.y_gap_bound);
        if let Some(excess) = info.rebase_excess {
            d.worst_rebase_excess = d.worst_rebase_excess.max(excess);
        }
        d.worst_domain_violation = d.worst_domain_violation.max(self.f.domain_violation(&next.x));
        if let (Some(p0), Some(p1)) = (before, next.potential) {
            d.worst_potential_increase = d.worst_potential_increase.max(p1 - p0);
            // Potentials of numerically-solved optima sit on a cancellation
            // floor of order A_k·ulp(f*) once the gap underflows the
            // precision of f*; conformance is only meaningful above it.
            let floor = if self.f.numeric_optimum() {
                1e-13 * next.acc_weight * (1.0 + self.f.optimal_value().unwrap_or(0.0).abs())
            } else {
                0.0
            };
            d.worst_potential_excess = d.worst_potential_excess.max(p1 - p0 * (1.0 + 1e-10) - floor);
        }
        self.state = next;
        self.last_info = info;
        Ok(())
    }

    /// The telemetry row for the current state.
    pub fn record(&self) -> TraceRecord {
        let m = self.f.manifold();
        let s = &self.state;
        let (f_gap, dist_to_opt) = match (self.f.optimal_value(), self.f.optimum()) {
            (Some(fstar), Some(opt)) => (self.f.value(&s.x) - fstar, m.distance(&s.x, opt)),
            _ => (self.f.value(&s.x), f64::NAN),
        };
        TraceRecord {
            k: s.k,
            f_gap,
            potential: s.potential.unwrap_or(f64::NAN),
            acc_weight: s.acc_weight,
            dist_weight: s.dist_weight,
            inc_weight: s.inc_weight,
            theta: s.theta,
            delta: s.delta,
            xi: s.xi,
            dist_to_opt,
            d_wz: m.distance(&s.w, &s.z),
            iprox_residual: self.last_info.iprox_residual,
            y_yprime_gap: self.last_info.y_yprime_gap,
            xi_recursion_residual: self.last_info.xi_recursion_residual,
        }
    }
}

/// Drive a full run: record the initial state, then step until `target_gap`
/// or `max_iters`. Deterministic — the loops use no randomness, so identical
/// inputs give identical traces.
pub fn run(f: &Objective, strategy: Strategy, cfg: &RunConfig) -> Result<RunOutcome> {
    let mut solver = Solver::new(f, strategy, cfg)?;
    let mut records = Vec::with_capacity(cfg.max_iters + 1);
    records.push(solver.record());
    while solver.state().k < cfg.max_iters {
        if let (Some(target), Some(gap)) = (cfg.target_gap, solver.gap()) {
            if gap <= target {
                solver.diagnostics.stopped_at_target = true;
                break;
            }
        }
        solver.step()?;
        records.push(solver.record());
    }
    if let (Some(target), Some(gap)) = (cfg.target_gap, solver.gap()) {
        if gap <= target {
            solver.diagnostics.stopped_at_target = true;
        }
    }
    let diagnostics = solver.diagnostics;
    Ok(RunOutcome { records, diagnostics })
}
