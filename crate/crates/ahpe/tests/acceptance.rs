//! The acceptance suite: ten end-to-end checks, one per test, each printing a
//! single `[PASS]`/`[FAIL]` line (visible with `--nocapture`) before asserting.
//! Together they pin the behavior the library promises: the algebraic identity
//! behind the contraction argument, the flat and curved convergence rates, the
//! flat-space reduction of the curved loop, distortion-rate envelopes,
//! certificate validity at the documented step sizes, the analysis-point
//! deviation bound, local acceleration, the head-to-head win over gradient
//! descent, and the burn-in bound for the coefficient ratio.

use ahpe::distortion::{interpolation_identity, s_rate, t_rate};
use ahpe::harness::{build_experiment, compare, preset, run_experiment, AutoOr, ExperimentConfig};
use ahpe::iprox::{eps_subgradient_check, OffsetRule, Strategy, RESIDUAL_TOL};
use ahpe::manifold::Manifold;
use ahpe::solvers::{Algorithm, RunConfig, Solver, WRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Print the criterion's verdict line, then enforce it.
fn report(name: &str, pass: bool, details: &str) {
    println!("[{}] {name}: {details}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {details}");
}

fn karcher_setup() -> ExperimentConfig {
    let mut cfg = preset("hyper-karcher-nesterov").unwrap();
    cfg.run.target_gap = None; // run all 300 iterations, not just to the gap target
    cfg
}

#[test]
fn a01_interpolation_identity_is_exact() {
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let dim = 1 + i % 64;
        let x = nalgebra::DVector::from_fn(dim, |_, _| rng.gen_range(-5.0..5.0));
        let y = nalgebra::DVector::from_fn(dim, |_, _| rng.gen_range(-5.0..5.0));
        // Log-uniform weights across six decades exercise the cancellation
        // paths a uniform draw would miss.
        let p = 10f64.powf(rng.gen_range(-3.0..3.0));
        let q = 10f64.powf(rng.gen_range(-3.0..3.0));
        let (lhs, rhs) = interpolation_identity(p, q, &x, &y);
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300));
    }
    report(
        "weighted-mean splitting identity",
        worst <= 1e-10,
        &format!("worst relative error {worst:.3e} over 10^4 random (p, q, x, y), dims 1-64 (tolerance 1e-10)"),
    );
}

#[test]
fn a02_flat_loop_rate_on_ill_conditioned_quadratic() {
    // 50-dim random quadratic, condition 1e4, exact proximal steps at λ = 1/L.
    let mut cfg = preset("flat-quadratic").unwrap();
    cfg.run.target_gap = None;
    cfg.run.max_iters = 500;
    let (f, _) = build_experiment(&cfg).unwrap();
    let out = run_experiment(&cfg).unwrap();
    assert!((out.lambda * f.l() - 1.0).abs() <= 1e-12, "auto step size should be exactly 1/L");

    let mu_lambda = f.mu() * out.lambda;
    let p0 = out.records[0].potential;
    let a0 = out.records[0].acc_weight;
    let growth = 1.0 + mu_lambda.sqrt();

    let mut worst_increase_ratio = f64::NEG_INFINITY; // p_{k+1}/p_k - 1
    let mut worst_gap_ratio = f64::NEG_INFINITY; // gap_k · A_k / p_0 - 1
    let mut worst_growth_ratio = f64::INFINITY; // A_k / (A_0·(1+√(μλ))^k)
    for pair in out.records.windows(2) {
        worst_increase_ratio = worst_increase_ratio.max(pair[1].potential / pair[0].potential - 1.0);
    }
    for r in &out.records {
        worst_gap_ratio = worst_gap_ratio.max(r.f_gap * r.acc_weight / p0 - 1.0);
        worst_growth_ratio = worst_growth_ratio.min(r.acc_weight / (a0 * growth.powi(r.k as i32)));
    }
    let pass = worst_increase_ratio <= 1e-10 && worst_gap_ratio <= 1e-12 && worst_growth_ratio >= 1.0;
    report(
        "flat accelerated rate",
        pass,
        &format!(
            "500 iterations at condition 1e4: potential increase ≤ {worst_increase_ratio:.3e} \
             (tol 1e-10), gap·A/p0 - 1 ≤ {worst_gap_ratio:.3e}, A_k/(A_0(1+√(μλ))^k) ≥ \
             {worst_growth_ratio:.6} (must be ≥ 1)"
        ),
    );
}

#[test]
fn a03_curved_loop_reduces_to_flat_loop_on_flat_space() {
    // Identical problem and start; the curved loop with B_0 = (1+μA_0)/2 must
    // retrace the flat loop point for point.
    let cfg_e = preset("flat-pair-euclid").unwrap();
    let cfg_r = preset("flat-pair-riemann").unwrap();
    let (f, x0_e) = build_experiment(&cfg_e).unwrap();
    let (_, x0_r) = build_experiment(&cfg_r).unwrap();
    assert_eq!(x0_e.coords(), x0_r.coords(), "paired configs must share the start");

    let sigma = 0.6;
    let lambda = Strategy::NesterovGrad.auto_lambda(&f, sigma);
    let mk = |algorithm, b0| RunConfig {
        algorithm,
        w_rule: WRule::StrategyDetermined,
        lambda,
        sigma,
        a0: 1.0,
        b0,
        x0: x0_e.clone(),
        max_iters: 200,
        target_gap: None,
    };
    let mu = f.mu();
    let b0 = (1.0 + mu * 1.0) / 2.0;
    let mut flat = Solver::new(&f, Strategy::NesterovGrad, &mk(Algorithm::Euclid, None)).unwrap();
    let mut curved =
        Solver::new(&f, Strategy::NesterovGrad, &mk(Algorithm::Riemann, Some(b0))).unwrap();

    let mut worst_x = 0.0f64;
    let mut worst_z = 0.0f64;
    let mut worst_coeff = 0.0f64;
    for _ in 0..200 {
        flat.step().unwrap();
        curved.step().unwrap();
        let (sf, sc) = (flat.state(), curved.state());
        worst_x = worst_x.max((sf.x.coords() - sc.x.coords()).norm());
        worst_z = worst_z.max((sf.z.coords() - sc.z.coords()).norm());
        worst_coeff = worst_coeff
            .max((sf.acc_weight - sc.acc_weight).abs() / sf.acc_weight)
            .max((sf.dist_weight - sc.dist_weight).abs() / sf.dist_weight);
    }
    let pass = worst_x <= 1e-9 && worst_z <= 1e-9 && worst_coeff <= 1e-9;
    report(
        "flat reduction of the curved loop",
        pass,
        &format!(
            "200 iterations on a flat quadratic: max |x_flat - x_curved| = {worst_x:.3e}, \
             max |z_flat - z_curved| = {worst_z:.3e} (tol 1e-9), worst A/B relative drift \
             {worst_coeff:.3e}"
        ),
    );
}

#[test]
fn a04_coefficient_ratio_settles_at_its_fixed_point() {
    // Fréchet-mean problem on hyperbolic space: ξ_k must sit within 1% of
    // √(μλ/(1+μλ)) over the last 50 of 300 iterations, with the recursion
    // residual at most 1e-10 at every step.
    let cfg = karcher_setup();
    let (f, _) = build_experiment(&cfg).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let mu_lambda = f.mu() * out.lambda;
    let fixed_point = (mu_lambda / (1.0 + mu_lambda)).sqrt();

    assert_eq!(out.records.last().unwrap().k, 300);
    let mut worst_rel = 0.0f64;
    for r in out.records.iter().filter(|r| r.k > 250) {
        worst_rel = worst_rel.max((r.xi - fixed_point).abs() / fixed_point);
    }
    let worst_residual = out.diagnostics.worst_xi_residual;
    let pass = worst_rel <= 0.01 && worst_residual <= 1e-10;
    report(
        "coefficient-ratio fixed point",
        pass,
        &format!(
            "ξ within {:.4}% of √(μλ/(1+μλ)) = {fixed_point:.6} over iterations 251-300 \
             (tol 1%), recursion residual ≤ {worst_residual:.3e} at every step (tol 1e-10)",
            100.0 * worst_rel
        ),
    );
}

#[test]
fn a05_distortion_rate_envelopes() {
    // (a) The tangent-distance domination bound over 10^4 random triples.
    let mut rng = ChaCha20Rng::seed_from_u64(505);
    let mut worst_violation = f64::NEG_INFINITY;
    let curvatures = [0.25, 1.0, 4.0];
    let dims = [2usize, 3, 5, 8];
    for i in 0..10_000 {
        let k = curvatures[i % curvatures.len()];
        let m = Manifold::hyperbolic(dims[i % dims.len()], k).unwrap();
        let o = m.origin();
        let radius = 1.2 / k.sqrt();
        let x = m.random_in_ball(&mut rng, &o, radius);
        let y = m.random_in_ball(&mut rng, &o, radius);
        let z = m.random_in_ball(&mut rng, &o, radius);
        let d = m.distance(&x, &y);
        let dz = m.tangent_distance(&z, &x, &y);
        worst_violation = worst_violation.max(d * d - t_rate(k, m.distance(&x, &z)) * dz * dz);
    }

    // (b) The quadratic envelope of the interpolation-drift factor on the
    // range K·r² ≤ 1. Its ratio to K·r² rises monotonically from 1/3 (the
    // r → 0 limit) to exactly 1/e at K·r² = 1, so 1/3 is the lower envelope
    // constant and the sharp uniform upper constant on this range is 1/e,
    // not 1/3.
    let inv_e = (-1.0f64).exp();
    let mut ratio_low = f64::INFINITY;
    let mut ratio_high = f64::NEG_INFINITY;
    let mut monotone = true;
    for &k in &[0.5f64, 1.0, 2.0, 4.0] {
        let mut prev = 0.0;
        for i in 1..=250 {
            let r = (i as f64 / 250.0) / k.sqrt();
            let ratio = s_rate(k, r) / (k * r * r);
            ratio_low = ratio_low.min(ratio);
            ratio_high = ratio_high.max(ratio);
            monotone &= ratio >= prev - 1e-12;
            prev = ratio;
        }
    }
    let pass = worst_violation <= 1e-9
        && ratio_low >= 1.0 / 3.0 - 1e-12
        && ratio_high <= inv_e + 1e-12
        && monotone;
    report(
        "distortion-rate envelopes",
        pass,
        &format!(
            "d² ≤ T_K(d(x,z))·d_z² violated by at most {worst_violation:.3e} over 10^4 triples \
             (tol 1e-9); S_K(r)/(K·r²) in [{ratio_low:.6}, {ratio_high:.6}] on K·r² ≤ 1, \
             monotone = {monotone} — lower envelope K·r²/3 and sharp upper envelope K·r²/e \
             both hold (1/3 is only the r → 0 limit of the ratio, so it cannot serve as the \
             uniform upper constant)"
        ),
    );
}

#[test]
fn a06_certificates_hold_at_documented_step_sizes() {
    // Each inexact strategy at exactly its documented largest step, over 100
    // random reference points per manifold; plus the sampled subgradient
    // minorant on the flat instance.
    let flat: ExperimentConfig = ahpe::harness::parse_config(
        r#"
        [manifold]
        kind = "euclidean"
        dim = 8
        [objective]
        kind = "random_quadratic"
        condition = 100.0
        seed = 5
        [method]
        algorithm = "euclid"
        strategy = "nesterov_grad"
        sigma = 0.7
        [run]
        max_iters = 1
        "#,
    )
    .unwrap();
    let curved: ExperimentConfig = ahpe::harness::parse_config(
        r#"
        [manifold]
        kind = "hyperbolic"
        dim = 5
        curvature = 1.0
        [objective]
        kind = "karcher"
        anchors = 10
        anchor_radius = 0.5
        domain_radius = 1.0
        seed = 11
        [method]
        algorithm = "riemann"
        strategy = "nesterov_grad"
        sigma = 0.7
        [run]
        max_iters = 1
        "#,
    )
    .unwrap();

    let sigma = 0.7;
    let strategies: [(&str, Strategy); 4] = [
        ("one-gradient-step", Strategy::NesterovGrad),
        ("two-gradient-steps", Strategy::TwoStepGrad),
        ("gradient-output", Strategy::Raxgd),
        ("generalized-gradient", Strategy::GenRaxgd { offset: OffsetRule::HashPerturb { fraction: 0.75 } }),
    ];

    let mut rng = ChaCha20Rng::seed_from_u64(606);
    let mut worst_residual = f64::NEG_INFINITY;
    let mut worst_minorant = f64::NEG_INFINITY;
    for (is_flat, cfg, radii) in
        [(true, &flat, [0.3, 1.5, 4.0]), (false, &curved, [0.1, 0.5, 0.8])]
    {
        let (f, _) = build_experiment(cfg).unwrap();
        let m = f.manifold();
        for (name, strategy) in &strategies {
            let lambda = strategy.auto_lambda(&f, sigma);
            for i in 0..100 {
                let y = m.random_in_ball(&mut rng, &m.origin(), radii[i % radii.len()]);
                let cert = strategy
                    .apply(&f, &y, lambda, sigma)
                    .unwrap_or_else(|e| panic!("{name} rejected a documented step: {e}"));
                worst_residual = worst_residual.max(cert.lhs_residual);
                if is_flat {
                    let v = eps_subgradient_check(&f, &cert, lambda, f.mu(), 50, &mut rng).unwrap();
                    worst_minorant = worst_minorant.max(v);
                }
            }
        }
    }
    let pass = worst_residual <= RESIDUAL_TOL && worst_minorant <= 1e-9;
    report(
        "certificates at documented step sizes",
        pass,
        &format!(
            "4 strategies × 2 manifolds × 100 states: worst defining-inequality residual \
             {worst_residual:.3e} (tol 1e-12); worst sampled subgradient-minorant violation \
             {worst_minorant:.3e} on the flat instance (tol 1e-9)"
        ),
    );
}

#[test]
fn a07_analysis_point_deviation_stays_under_its_bound() {
    // The recorded deviation d_w(y, y′) must never exceed the
    // interpolation-drift bound by more than 1e-9, along gradient-output
    // trajectories both local and far from the optimum.
    let local = preset("hyper-raxgd-local").unwrap();
    let mut far = preset("hyper-raxgd-local").unwrap();
    far.run.x0_radius = Some(1.0);
    far.run.target_gap = None;
    far.run.output = None;

    let mut worst = f64::NEG_INFINITY;
    for cfg in [&local, &far] {
        let out = run_experiment(cfg).unwrap();
        worst = worst.max(out.diagnostics.worst_y_gap_excess);
    }
    report(
        "analysis-point deviation bound",
        worst <= 1e-9,
        &format!(
            "worst recorded d_w(y, y′) excess over the drift bound: {worst:.3e} across a local \
             and a unit-distance trajectory (tol 1e-9)"
        ),
    );
}

#[test]
fn a08_local_acceleration_of_the_gradient_output_strategy() {
    // Condition-100 squared distance, start at 0.01·(μ/L)^(3/4): the log-gap
    // must fall linearly with a per-iteration factor at least as good as
    // 1 - 0.05·√(μ/L), with a monotone potential. This is a qualitative rate
    // check; no sharper constant is claimed.
    let mut cfg = preset("hyper-raxgd-local").unwrap();
    cfg.run.target_gap = None;
    cfg.run.max_iters = 300;
    let (f, _) = build_experiment(&cfg).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let required = 1.0 - 0.05 * (f.mu() / f.l()).sqrt();

    // The gap starts near 5e-8 and the hyperboloid distance underlying it is
    // only measurable to ~1e-8 absolute, so the trailing records sit on a
    // ~1e-16 noise floor. Measure the rate over the clean regime, cut three
    // decades above the floor; that still spans five decades of decay.
    let clean: Vec<&ahpe::solvers::TraceRecord> =
        out.records.iter().take_while(|r| r.f_gap >= 1e-13).collect();
    assert!(clean.len() >= 50, "too few records above the noise floor: {}", clean.len());
    let gaps: Vec<f64> = clean.iter().map(|r| r.f_gap).collect();
    let factors: Vec<f64> = gaps.windows(2).map(|p| p[1] / p[0]).collect();
    let worst_factor = factors.iter().copied().fold(0.0f64, f64::max);
    // The factor itself improves monotonically through a warm-up (~50
    // iterations while μA_k grows away from μA_0 = 1) and then settles, so
    // the log-gap is convex early and linear thereafter: check the cap and
    // the monotone improvement everywhere, and fit the line on the settled
    // second half.
    let mut factor_backslide = f64::NEG_INFINITY;
    for pair in factors.windows(2) {
        factor_backslide = factor_backslide.max(pair[1] - pair[0]);
    }

    let logs: Vec<f64> = gaps[gaps.len() / 2..].iter().map(|g| g.ln()).collect();
    let n = logs.len() as f64;
    let k_mean = (logs.len() - 1) as f64 / 2.0;
    let l_mean = logs.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (k, l) in logs.iter().enumerate() {
        sxx += (k as f64 - k_mean).powi(2);
        sxy += (k as f64 - k_mean) * (l - l_mean);
    }
    let slope = sxy / sxx;
    let max_resid = logs
        .iter()
        .enumerate()
        .map(|(k, l)| (l - (l_mean + slope * (k as f64 - k_mean))).abs())
        .fold(0.0f64, f64::max);

    let mut worst_potential = f64::NEG_INFINITY;
    for pair in clean.windows(2) {
        worst_potential = worst_potential.max(pair[1].potential / pair[0].potential - 1.0);
    }

    let pass = worst_factor <= required
        && factor_backslide <= 1e-9
        && max_resid <= 0.25
        && worst_potential <= 1e-10;
    report(
        "local acceleration",
        pass,
        &format!(
            "per-iteration gap factor ≤ {worst_factor:.6} everywhere (required ≤ {required:.6} \
             = 1 - 0.05√(μ/L)), improving monotonically (worst backslide {factor_backslide:.1e}) \
             to a settled factor {:.6}; settled-half log-gap linear to ±{max_resid:.3e}; \
             potential increase ≤ {worst_potential:.3e} (tol 1e-10) over the {} iterations \
             above the measurement floor",
            slope.exp(),
            gaps.len()
        ),
    );
}

#[test]
fn a09_accelerated_loop_beats_gradient_descent() {
    // Shared condition-1e3 problem, shared start, shared 1e-6 target: the
    // accelerated loop must need at most half the iterations.
    let entries = vec![
        ("accelerated".to_owned(), preset("hyper-compare-ahpe").unwrap()),
        ("baseline".to_owned(), preset("hyper-compare-rgd").unwrap()),
    ];
    let out = compare(&entries).unwrap();
    let iters = |label: &str| {
        out.report
            .methods
            .iter()
            .find(|m| m.label == label)
            .unwrap_or_else(|| panic!("{label} missing from report"))
            .iterations_to_target
            .unwrap_or_else(|| panic!("{label} never reached the target"))
    };
    let accel = iters("accelerated");
    let baseline = iters("baseline");
    let ratio = accel as f64 / baseline as f64;
    report(
        "acceleration versus gradient descent",
        accel < baseline && ratio <= 0.5,
        &format!(
            "iterations to gap 1e-6 at condition 1e3: accelerated {accel}, gradient descent \
             {baseline}, ratio {ratio:.3} (required ≤ 0.5)"
        ),
    );
}

#[test]
fn a10_burn_in_reaches_half_the_fixed_point_quickly() {
    // Order-of-magnitude check: started an order of magnitude below its fixed
    // point, ξ must recover half the fixed point within C·κ·max(ln κ, 1)
    // iterations for a modest constant C ≤ 20. With the default B_0 the start
    // is already at the fixed point, so the bound is trivially met at k = 0;
    // the deliberately small B_0 makes it non-vacuous.
    let cfg = karcher_setup();
    let (f, _) = build_experiment(&cfg).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let mu_lambda = f.mu() * out.lambda;
    let fixed_point = (mu_lambda / (1.0 + mu_lambda)).sqrt();
    let default_start_ok = out.records[0].xi >= 0.5 * fixed_point;

    let mut small = karcher_setup();
    small.method.b0 = Some(AutoOr::Number(0.01 * (f.mu() / 2.0) * 1.0));
    let out_small = run_experiment(&small).unwrap();
    assert!(
        out_small.records[0].xi <= 0.11 * fixed_point,
        "small-B_0 variant should start an order of magnitude below the fixed point, got ξ_0 = {}",
        out_small.records[0].xi
    );
    let crossing = out_small
        .records
        .iter()
        .find(|r| r.xi >= 0.5 * fixed_point)
        .map(|r| r.k);

    let kappa = f.l() / f.mu();
    let allowance = kappa * kappa.ln().max(1.0);
    let (pass, details) = match crossing {
        Some(k) => {
            let fitted_c = k as f64 / allowance;
            (
                default_start_ok && fitted_c <= 20.0,
                format!(
                    "default B_0 starts at the fixed point (ξ_0/ξ* = {:.3}); with B_0 a hundredth \
                     of the default, ξ crosses ξ*/2 at k = {k}, fitted constant \
                     {fitted_c:.2}·κ·max(ln κ, 1) (required ≤ 20, κ = {kappa:.3})",
                    out.records[0].xi / fixed_point
                ),
            )
        }
        None => (false, "ξ never recovered half its fixed point".to_owned()),
    };
    report("burn-in bound", pass, &details);
}
