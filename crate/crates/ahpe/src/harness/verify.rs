//! The reportable invariant suite behind `ahpe verify`: fixed-seed randomized
//! batteries per scope, each reporting the worst violation of an invariant
//! next to its tolerance.
//!
//! Most items are direct invariants (`max_violation ≤ tolerance`). A few are
//! *sensitivity controls*: they feed a deliberately corrupted quantity (a
//! sign-flipped parallel transport, an overstated convexity modulus) through
//! the same checker and report the detector's shortfall — 0 when the
//! corruption was flagged — guarding against checks so loose they would pass
//! anything.

use crate::distortion::{interpolation_identity, s_rate, t_rate};
use crate::iprox::{self, OffsetRule, Strategy, RESIDUAL_TOL};
use crate::manifold::{Manifold, Point, Tangent};
use crate::objectives::Objective;
use crate::solvers::{self, Algorithm, RunConfig, Solver, TraceRecord, WRule};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::str::FromStr;

/// Which battery of checks to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyScope {
    Manifold,
    Distortion,
    Iprox,
    Solver,
    All,
}

impl FromStr for VerifyScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<VerifyScope> {
        match s {
            "manifold" => Ok(VerifyScope::Manifold),
            "distortion" => Ok(VerifyScope::Distortion),
            "iprox" => Ok(VerifyScope::Iprox),
            "solver" => Ok(VerifyScope::Solver),
            "all" => Ok(VerifyScope::All),
            other => Err(Error::Validation(format!(
                "unknown verify scope \"{other}\" (manifold | distortion | iprox | solver | all)"
            ))),
        }
    }
}

/// One invariant's outcome.
#[derive(Clone, Debug)]
pub struct VerifyItem {
    pub name: String,
    /// Worst violation observed (negative = comfortable margin).
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerifyItem {
    fn new(name: impl Into<String>, max_violation: f64, tolerance: f64) -> VerifyItem {
        VerifyItem { name: name.into(), max_violation, tolerance, pass: max_violation <= tolerance }
    }
}

/// All items from the requested scope(s).
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub items: Vec<VerifyItem>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    /// Fixed-width table plus a one-line tally.
    pub fn render(&self) -> String {
        let mut s = format!(
            "{:<52} {:>15} {:>10} {:>7}\n",
            "invariant", "worst-violation", "tolerance", "status"
        );
        for it in &self.items {
            s.push_str(&format!(
                "{:<52} {:>15.3e} {:>10.1e} {:>7}\n",
                it.name,
                it.max_violation,
                it.tolerance,
                if it.pass { "PASS" } else { "FAIL" }
            ));
        }
        let failed = self.items.iter().filter(|i| !i.pass).count();
        s.push_str(&format!("{} checked, {} failed\n", self.items.len(), failed));
        s
    }
}

/// Run the requested battery with fixed seeds (results are reproducible).
pub fn verify_suite(scope: VerifyScope) -> Result<VerifyReport> {
    let mut items = Vec::new();
    if matches!(scope, VerifyScope::Manifold | VerifyScope::All) {
        items.extend(manifold_battery()?);
    }
    if matches!(scope, VerifyScope::Distortion | VerifyScope::All) {
        items.extend(distortion_battery()?);
    }
    if matches!(scope, VerifyScope::Iprox | VerifyScope::All) {
        items.extend(iprox_battery()?);
    }
    if matches!(scope, VerifyScope::Solver | VerifyScope::All) {
        items.extend(solver_battery()?);
    }
    Ok(VerifyReport { items })
}

/// Parallel transport with the sign of its correction term flipped — the
/// sensitivity fixture the isometry checker must flag. Built from public
/// geometry operations only, so it exercises the same code paths a real
/// defect would.
fn sign_flipped_transport(m: &Manifold, x: &Point, y: &Point, v: &Tangent) -> Tangent {
    let u_xy = m.log_map(x, y);
    let u_yx = m.log_map(y, x);
    let d2 = m.inner(&u_xy, &u_xy);
    let coef = m.inner(&u_xy, v) / d2;
    let vec = v.vec() + (u_xy.vec() + u_yx.vec()) * coef;
    let mut carrier = u_yx;
    carrier.set_vec(vec);
    carrier
}

fn manifold_battery() -> Result<Vec<VerifyItem>> {
    let spaces = [
        ("euclidean".to_owned(), Manifold::euclidean(4)),
        ("hyperbolic(K=1)".to_owned(), Manifold::hyperbolic(3, 1.0)?),
        ("hyperbolic(K=0.25)".to_owned(), Manifold::hyperbolic(6, 0.25)?),
    ];
    let mut items = Vec::new();
    for (si, (label, m)) in spaces.iter().enumerate() {
        let mut rng = ChaCha20Rng::seed_from_u64(101 + si as u64);
        let origin = m.origin();
        let mut exp_log = 0.0f64;
        let mut log_exp = 0.0f64;
        let mut dist_norm = 0.0f64;
        let mut isometry = 0.0f64;
        let mut reverses = 0.0f64;
        let mut interp = 0.0f64;
        let mut bug_seen = 0.0f64;
        for _ in 0..200 {
            let x = m.random_in_ball(&mut rng, &origin, 2.0);
            let y = m.random_in_ball(&mut rng, &origin, 2.0);
            let v = m.random_unit_tangent(&mut rng, &x).scale(0.05 + 1.95 * rng.gen::<f64>());
            let u = m.random_unit_tangent(&mut rng, &x).scale(0.05 + 1.95 * rng.gen::<f64>());

            let p = m.exp_map(&x, &v);
            exp_log = exp_log.max((m.log_map(&x, &p).vec() - v.vec()).norm());
            log_exp = log_exp.max(m.distance(&m.exp_map(&x, &m.log_map(&x, &y)), &y));
            dist_norm = dist_norm.max((m.distance(&x, &p) - m.norm(&v)).abs());

            let tv = m.transport(&x, &y, &v);
            let tu = m.transport(&x, &y, &u);
            isometry = isometry.max((m.inner(&tu, &tv) - m.inner(&u, &v)).abs());
            let carried = m.transport(&x, &y, &m.log_map(&x, &y));
            reverses = reverses.max((carried.vec() + m.log_map(&y, &x).vec()).norm());

            let (s, t) = (rng.gen::<f64>(), rng.gen::<f64>());
            let gs = m.geodesic_interpolate(&x, &y, s);
            let gt = m.geodesic_interpolate(&x, &y, t);
            interp = interp.max((m.distance(&gs, &gt) - (t - s).abs() * m.distance(&x, &y)).abs());

            if m.curvature() > 0.0 && m.distance(&x, &y) > 0.1 {
                let bugged = sign_flipped_transport(m, &x, &y, &v);
                bug_seen = bug_seen.max((m.inner(&bugged, &bugged) - m.inner(&v, &v)).abs());
            }
        }
        items.push(VerifyItem::new(format!("exp_log_roundtrip({label})"), exp_log, 1e-9));
        items.push(VerifyItem::new(format!("log_exp_roundtrip({label})"), log_exp, 1e-9));
        items.push(VerifyItem::new(format!("distance_matches_tangent_norm({label})"), dist_norm, 1e-9));
        items.push(VerifyItem::new(format!("transport_isometry({label})"), isometry, 1e-9));
        items.push(VerifyItem::new(format!("transport_reverses_log({label})"), reverses, 1e-9));
        items.push(VerifyItem::new(format!("geodesic_interpolation_metric({label})"), interp, 1e-9));
        if m.curvature() > 0.0 {
            // Sensitivity control: the isometry check must see at least 1e-6
            // of violation from the sign-flipped transport. Reported value is
            // the detector's shortfall (≤ 0 means the bug was caught).
            items.push(VerifyItem::new(
                format!("transport_sign_flip_detected({label})"),
                1e-6 - bug_seen,
                0.0,
            ));
        }

        let mut drift = 0.0f64;
        let mut walker = origin.clone();
        for _ in 0..30 {
            let step = m.random_unit_tangent(&mut rng, &walker).scale(0.5);
            walker = m.exp_map(&walker, &step);
            drift = drift.max(m.constraint_residual(walker.coords()));
        }
        items.push(VerifyItem::new(format!("constraint_drift_under_walk({label})"), drift, 1e-9));
    }
    Ok(items)
}

fn distortion_battery() -> Result<Vec<VerifyItem>> {
    let mut items = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(202);

    for (label, m) in [
        ("euclidean".to_owned(), Manifold::euclidean(3)),
        ("hyperbolic(K=1)".to_owned(), Manifold::hyperbolic(3, 1.0)?),
    ] {
        let origin = m.origin();
        let mut viol = f64::NEG_INFINITY;
        for _ in 0..3000 {
            let x = m.random_in_ball(&mut rng, &origin, 1.5);
            let y = m.random_in_ball(&mut rng, &origin, 1.5);
            let z = m.random_in_ball(&mut rng, &origin, 1.5);
            let direct = m.distance(&x, &y);
            let rebased = m.tangent_distance(&z, &x, &y);
            viol = viol.max(direct * direct - t_rate(m.curvature(), m.distance(&x, &z)) * rebased * rebased);
        }
        items.push(VerifyItem::new(format!("rebase_within_distortion_rate({label})"), viol, 1e-9));
    }

    // S_K sits inside its quadratic envelope on K·r² ≤ 1: between K·r²/3
    // (its r → 0 limit) and e⁻¹·K·r² (sharp at K·r² = 1).
    let inv_e = (-1.0f64).exp();
    let mut envelope = f64::NEG_INFINITY;
    for &k in &[0.25f64, 1.0, 4.0] {
        for i in 1..=500 {
            let r = (i as f64 / 500.0) / k.sqrt();
            let s = s_rate(k, r);
            envelope = envelope.max(s - inv_e * k * r * r).max(k * r * r / 3.0 - s);
        }
    }
    items.push(VerifyItem::new("contraction_quadratic_envelope", envelope, 1e-12));

    let mut floor = f64::NEG_INFINITY;
    let mut monotone = f64::NEG_INFINITY;
    let mut prev = 1.0f64;
    for i in 0..=400 {
        let r = i as f64 * 0.01;
        let t = t_rate(1.0, r);
        floor = floor.max(1.0 - t).max(-s_rate(1.0, r));
        monotone = monotone.max(prev - t);
        prev = t;
    }
    floor = floor.max((t_rate(0.0, 2.5) - 1.0).abs());
    items.push(VerifyItem::new("rates_bounded_below_and_monotone", floor.max(monotone), 1e-12));

    let mut interp = 0.0f64;
    for _ in 0..3000 {
        let dim = 1 + (rng.gen::<f64>() * 16.0) as usize;
        let scale = 10f64.powf(rng.gen::<f64>() * 4.0 - 2.0);
        let x = nalgebra::DVector::from_fn(dim, |_, _| (rng.gen::<f64>() - 0.5) * scale);
        let y = nalgebra::DVector::from_fn(dim, |_, _| (rng.gen::<f64>() - 0.5) * scale);
        let p = rng.gen::<f64>() * 10.0;
        let q = rng.gen::<f64>() * 10.0 + 1e-9;
        let (lhs, rhs) = interpolation_identity(p, q, &x, &y);
        interp = interp.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    items.push(VerifyItem::new("interpolation_identity_random", interp, 1e-10));
    Ok(items)
}

fn iprox_battery() -> Result<Vec<VerifyItem>> {
    let mut items = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(303);
    let flat = Objective::random_quadratic(8, 100.0, 11)?;
    let curved_m = Manifold::hyperbolic(3, 1.0)?;
    let curved = Objective::squared_distance(&curved_m, curved_m.origin(), 2.0)?;

    let strategies: [(&str, Strategy, f64); 5] = [
        ("exact_quadratic", Strategy::ExactQuadratic, 0.0),
        ("nesterov_grad", Strategy::NesterovGrad, 0.6),
        ("two_step_grad", Strategy::TwoStepGrad, 0.75),
        ("raxgd", Strategy::Raxgd, 0.6),
        ("gen_raxgd", Strategy::GenRaxgd { offset: OffsetRule::HashPerturb { fraction: 0.5 } }, 0.6),
    ];

    for (name, strategy, sigma) in &strategies {
        for (space, f) in [("flat", &flat), ("curved", &curved)] {
            if *name == "exact_quadratic" && space == "curved" {
                continue;
            }
            let m = f.manifold();
            let center = f.optimum().unwrap().clone();
            let lambda = strategy.auto_lambda(f, *sigma);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..100 {
                let y = m.random_in_ball(&mut rng, &center, 1.5);
                let cert = strategy.apply(f, &y, lambda, *sigma)?;
                worst = worst
                    .max(cert.lhs_residual)
                    .max(iprox::verify(f, &y, &cert, lambda, f.mu()));
            }
            items.push(VerifyItem::new(format!("certificate({name}, {space})"), worst, RESIDUAL_TOL));
        }
    }

    // Step-size gate: each gradient strategy must reject 2% above its bound
    // and accept 2% below it.
    let mut gate_failures = 0.0;
    for (name, strategy, sigma) in &strategies {
        if *name == "exact_quadratic" {
            continue;
        }
        let bound = strategy.auto_lambda(&flat, *sigma);
        if strategy.check_lambda(&flat, bound * 1.02, *sigma).is_ok() {
            gate_failures += 1.0;
        }
        if strategy.check_lambda(&flat, bound * 0.98, *sigma).is_err() {
            gate_failures += 1.0;
        }
    }
    items.push(VerifyItem::new("step_size_gate", gate_failures, 0.0));

    // Certificates imply an approximate-subgradient inequality; sample it on
    // the flat instance, where the model is directly computable.
    let mut sub_worst = f64::NEG_INFINITY;
    for (_, strategy, sigma) in &strategies {
        let m = flat.manifold();
        let center = flat.optimum().unwrap().clone();
        let lambda = strategy.auto_lambda(&flat, *sigma);
        for _ in 0..20 {
            let y = m.random_in_ball(&mut rng, &center, 1.5);
            let cert = strategy.apply(&flat, &y, lambda, *sigma)?;
            sub_worst = sub_worst.max(iprox::eps_subgradient_check(
                &flat, &cert, lambda, flat.mu(), 300, &mut rng,
            )?);
        }
    }
    items.push(VerifyItem::new("subgradient_sampling(flat)", sub_worst, 1e-9));

    // Objective convexity moduli, sampled.
    let karcher = {
        let m = Manifold::hyperbolic(3, 1.0)?;
        let mut krng = ChaCha20Rng::seed_from_u64(7);
        let anchors: Vec<Point> = (0..12).map(|_| m.random_in_ball(&mut krng, &m.origin(), 0.4)).collect();
        Objective::karcher(&m, anchors, vec![1.0 / 12.0; 12], 1.0)?
    };
    for (label, f) in [("random_quadratic", &flat), ("squared_distance", &curved), ("karcher", &karcher)] {
        let report = f.check_strong_convexity(300, &mut rng);
        items.push(VerifyItem::new(format!("strong_convexity({label})"), report.max_violation, 1e-9));
    }
    // Sensitivity control: an overstated modulus must produce a visible
    // violation (reported as detector shortfall, ≤ 0 when caught).
    let inflated = karcher.check_convexity_modulus(3.0 * karcher.mu(), 300, &mut rng);
    items.push(VerifyItem::new(
        "overstated_modulus_detected(karcher)",
        1e-3 - inflated.max_violation,
        0.0,
    ));
    Ok(items)
}

/// Least-squares slope of `ln(δ_k − 1)` over records still carrying
/// distortion (`δ > 1`); `None` when fewer than 5 such records exist.
fn delta_decay_slope(records: &[TraceRecord]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.delta > 1.0)
        .map(|r| (r.k as f64, (r.delta - 1.0).ln()))
        .collect();
    if pts.len() < 5 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

fn solver_battery() -> Result<Vec<VerifyItem>> {
    let mut items = Vec::new();

    // Flat accelerated run on a poorly-conditioned quadratic.
    let f1 = Objective::random_quadratic(12, 1000.0, 17)?;
    let m1 = *f1.manifold();
    let mut rng = ChaCha20Rng::seed_from_u64(404);
    let x0 = m1.random_point(&mut rng, f1.optimum().unwrap(), 2.0);
    let sigma = 0.7;
    let lambda = Strategy::NesterovGrad.auto_lambda(&f1, sigma);
    let cfg = RunConfig {
        algorithm: Algorithm::Euclid,
        w_rule: WRule::StrategyDetermined,
        lambda,
        sigma,
        a0: 1.0,
        b0: None,
        x0,
        max_iters: 150,
        target_gap: None,
    };
    let out = solvers::run(&f1, Strategy::NesterovGrad, &cfg)?;
    items.push(VerifyItem::new("potential_decrease(flat)", out.diagnostics.worst_potential_excess, 0.0));
    let p0 = out.records[0].potential;
    let gap_viol = out
        .records
        .iter()
        .map(|r| r.f_gap - p0 / r.acc_weight - 1e-9 * p0)
        .fold(f64::NEG_INFINITY, f64::max);
    items.push(VerifyItem::new("gap_within_rate_bound(flat)", gap_viol, 0.0));
    let mu_l = f1.mu() * lambda;
    let limit = 1.0 + mu_l + (mu_l * (1.0 + mu_l)).sqrt();
    let n = out.records.len();
    let ratio = out.records[n - 1].acc_weight / out.records[n - 2].acc_weight;
    items.push(VerifyItem::new(
        "weight_ratio_approaches_limit(flat)",
        (ratio - limit).abs() / limit,
        1e-2,
    ));
    items.push(VerifyItem::new("recursion_residual(flat)", out.diagnostics.worst_xi_residual, 1e-10));

    // The curved loop run on a flat instance reproduces the flat loop.
    let f2 = Objective::random_quadratic(6, 50.0, 29)?;
    let m2 = *f2.manifold();
    let mut rng2 = ChaCha20Rng::seed_from_u64(7);
    let x0 = m2.random_point(&mut rng2, f2.optimum().unwrap(), 1.5);
    let lambda2 = Strategy::NesterovGrad.auto_lambda(&f2, 0.6);
    let base = RunConfig {
        algorithm: Algorithm::Euclid,
        w_rule: WRule::StrategyDetermined,
        lambda: lambda2,
        sigma: 0.6,
        a0: 1.0,
        b0: None,
        x0: x0.clone(),
        max_iters: 0,
        target_gap: None,
    };
    let curved_cfg = RunConfig {
        algorithm: Algorithm::Riemann,
        b0: Some((1.0 + f2.mu() * base.a0) / 2.0),
        x0,
        ..base.clone()
    };
    let mut se = Solver::new(&f2, Strategy::NesterovGrad, &base)?;
    let mut sr = Solver::new(&f2, Strategy::NesterovGrad, &curved_cfg)?;
    let mut agree = 0.0f64;
    for _ in 0..100 {
        se.step()?;
        sr.step()?;
        agree = agree
            .max(m2.distance(&se.state().x, &sr.state().x))
            .max((se.state().acc_weight - sr.state().acc_weight).abs() / se.state().acc_weight);
    }
    items.push(VerifyItem::new("flat_reduction_agreement", agree, 1e-9));

    // Curved runs on a hyperbolic distance objective.
    let m3 = Manifold::hyperbolic(3, 1.0)?;
    let f3 = Objective::squared_distance(&m3, m3.origin(), 2.0)?;
    let mut rng3 = ChaCha20Rng::seed_from_u64(12);
    let x0c = m3.random_point(&mut rng3, f3.optimum().unwrap(), 1.0);
    let sigma_c = 0.7;
    let cfg_c = RunConfig {
        algorithm: Algorithm::Riemann,
        w_rule: WRule::YAnchored,
        lambda: Strategy::NesterovGrad.auto_lambda(&f3, sigma_c),
        sigma: sigma_c,
        a0: 1.0,
        b0: None,
        x0: x0c.clone(),
        max_iters: 200,
        target_gap: Some(1e-10),
    };
    let out_c = solvers::run(&f3, Strategy::NesterovGrad, &cfg_c)?;
    items.push(VerifyItem::new("potential_decrease(curved)", out_c.diagnostics.worst_potential_excess, 0.0));
    items.push(VerifyItem::new("rebase_within_rate(curved)", out_c.diagnostics.worst_rebase_excess, 1e-9));
    items.push(VerifyItem::new("recursion_residual(curved)", out_c.diagnostics.worst_xi_residual, 1e-10));
    let slope_viol = delta_decay_slope(&out_c.records).map_or(0.0, |s| s);
    items.push(VerifyItem::new("distortion_rate_decays(curved)", slope_viol, 0.0));

    let sigma_r = 0.8;
    let cfg_r = RunConfig {
        algorithm: Algorithm::Riemann,
        w_rule: WRule::StrategyDetermined,
        lambda: Strategy::Raxgd.auto_lambda(&f3, sigma_r),
        sigma: sigma_r,
        a0: 1.0,
        b0: None,
        x0: x0c,
        max_iters: 150,
        target_gap: None,
    };
    let out_r = solvers::run(&f3, Strategy::Raxgd, &cfg_r)?;
    items.push(VerifyItem::new(
        "analysis_point_within_bound(curved)",
        out_r.diagnostics.worst_y_gap_excess,
        1e-9,
    ));
    items.push(VerifyItem::new(
        "certificate_residual_in_run(curved)",
        out_r.diagnostics.worst_iprox_residual,
        RESIDUAL_TOL,
    ));

    // Gradient-descent baseline: monotone, and on the pure distance objective
    // its per-step gap ratio is pinned near (1 - 1/L)².
    let f5 = Objective::squared_distance(&m3, m3.origin(), 1000.0)?;
    let mut rng5 = ChaCha20Rng::seed_from_u64(9);
    let x05 = m3.random_point(&mut rng5, f5.optimum().unwrap(), 1.0);
    let out_g = super::rgd_baseline(&f5, 1.0 / f5.l(), x05, 200, None)?;
    items.push(VerifyItem::new("baseline_monotone_descent", out_g.diagnostics.worst_potential_excess, 0.0));
    let lo = 1.0 - 3.0 * f5.mu() / f5.l();
    let mut ratio_viol = f64::NEG_INFINITY;
    let tail_start = out_g.records.len() - out_g.records.len() / 5;
    for pair in out_g.records[tail_start - 1..].windows(2) {
        let ratio = pair[1].f_gap / pair[0].f_gap;
        ratio_viol = ratio_viol.max(ratio - 1.0).max(lo - ratio);
    }
    items.push(VerifyItem::new("baseline_tail_gap_ratio", ratio_viol, 1e-12));

    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scope_parsing() {
        assert_eq!(VerifyScope::from_str("manifold").unwrap(), VerifyScope::Manifold);
        assert_eq!(VerifyScope::from_str("all").unwrap(), VerifyScope::All);
        assert!(VerifyScope::from_str("geometry").is_err());
    }

    #[test]
    fn full_suite_passes() {
        let report = verify_suite(VerifyScope::All).unwrap();
        let failed: Vec<&VerifyItem> = report.items.iter().filter(|i| !i.pass).collect();
        assert!(
            failed.is_empty(),
            "failing invariants:\n{}",
            failed
                .iter()
                .map(|i| format!("  {} violation {:.3e} tol {:.1e}", i.name, i.max_violation, i.tolerance))
                .collect::<Vec<_>>()
                .join("\n")
        );
        assert!(report.pass());
        // Scope batteries are strict subsets of the full run.
        let solver_only = verify_suite(VerifyScope::Solver).unwrap();
        assert!(solver_only.items.len() < report.items.len());
        assert!(!solver_only.items.is_empty());
    }

    #[test]
    fn render_lists_every_item() {
        let report = verify_suite(VerifyScope::Distortion).unwrap();
        let shown = report.render();
        for item in &report.items {
            assert!(shown.contains(&item.name), "{} missing from render", item.name);
        }
        assert!(shown.contains("checked"));
    }

    #[test]
    fn sign_flipped_transport_breaks_isometry() {
        let m = Manifold::hyperbolic(3, 1.0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(55);
        let x = m.random_in_ball(&mut rng, &m.origin(), 1.5);
        let y = m.random_in_ball(&mut rng, &m.origin(), 1.5);
        let v = m.random_unit_tangent(&mut rng, &x);
        let good = m.transport(&x, &y, &v);
        assert!((m.inner(&good, &good) - m.inner(&v, &v)).abs() < 1e-10);
        let bad = sign_flipped_transport(&m, &x, &y, &v);
        assert!((m.inner(&bad, &bad) - m.inner(&v, &v)).abs() > 1e-6);
    }
}
