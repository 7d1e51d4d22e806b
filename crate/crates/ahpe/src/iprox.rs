//! Inexact proximal strategies and the certificate checker.
//!
//! An inexact proximal step at reference point `y` with step `λ` on a
//! `μ`-strongly-convex `f` is a tuple `(x, v, w, ε)` with `v ∈ T_w`
//! satisfying `v - μ·log_w(x) ∈ ∂f(w)` and
//!
//! ```text
//! ‖log_w(x) - log_w(y) + λv‖²        λ  ⎛                                μ          ⎞
//! ───────────────────────────── + ────── ⎜f(x) - f(w) - ⟨log_w(x), v⟩ + ─── d²(x, w)⎟ ≤ ε.
//!        2(1 + λμ)²               1 + λμ ⎝                                2          ⎠
//! ```
//!
//! With `ε = 0` and `w = x` this recovers the exact proximal point
//! (`x + λv = y` in flat space). Every strategy here constructs `(x, v, w)`
//! first, then sets `ε` from the produced `x` via the relative-error rule
//! `ε = σ²/(2(1+λμ)²)·d_w²(x, y)` and verifies the inequality — that is how
//! the error budget is defined per-iteration, and it resolves the apparent
//! circularity of `ε` depending on the output.
//!
//! Strategies are stateless given `(f, y, parameters)` and therefore
//! thread-safe.

use crate::manifold::{Manifold, ManifoldKind, Point, Tangent};
use crate::objectives::Objective;
use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Residuals above this fail certificate construction.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// The tuple produced by an inexact proximal strategy.
///
/// `lhs_residual` stores the left-hand side of the defining inequality minus
/// `eps`; valid certificates have it at or below [`RESIDUAL_TOL`], and the
/// harness logs the worst value seen per run.
#[derive(Clone, Debug)]
pub struct Certificate {
    /// The proximal output `x`.
    pub x: Point,
    /// The anchor `w` carrying the (sub)gradient information.
    pub w: Point,
    /// The certificate vector `v ∈ T_w` with `v - μ·log_w(x) ∈ ∂f(w)`.
    pub v: Tangent,
    /// `∇f(w)`, kept for diagnostics.
    pub grad_w: Tangent,
    /// The error budget `ε ≥ 0`.
    pub eps: f64,
    /// Defining-inequality left-hand side minus `eps`.
    pub lhs_residual: f64,
    /// The σ for which `eps = σ²/(2(1+λμ)²)·d_w²(x, y)` (0 for exact steps).
    pub sigma_eff: f64,
}

/// How the generalized gradient strategy picks its output `x` near `w`.
#[derive(Clone, Debug, PartialEq)]
pub enum OffsetRule {
    /// `x = w`: the plain gradient-step special case.
    Identity,
    /// Deterministic pseudo-random offset: `x = exp_w(t·u)` with `u` a unit
    /// direction hashed from `w`'s coordinates and `t` a `fraction` of the
    /// largest admissible offset `(1-σ)/3·d(y, x)`. `fraction` must lie in
    /// `(0, 1)`; the offset is shrunk geodesically toward `w` until the
    /// distance constraint holds.
    HashPerturb { fraction: f64 },
}

/// The available inexact proximal strategies.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// Closed-form exact proximal point for flat-space quadratics (`ε = 0`).
    ExactQuadratic,
    /// One gradient step from `y`, anchored at `w = y`. Valid for
    /// `λ ≤ σ²/(2L)`.
    NesterovGrad,
    /// Two successive gradient steps from `y`, anchored at `w = y`, with the
    /// fixed budget `σ = 3/4`. Valid for `λ ≤ (3/4)²/(2L) = 9/(32L)` — the
    /// step sizes `σ²/(2L)` reachable with `σ` up to the budget. (The weaker
    /// condition `L·λ·(1+μλ) ≤ 1/2` is *not* sufficient: steps near its
    /// boundary produce certificates that fail the defining inequality on
    /// quadratics, which the checker here would reject at runtime.)
    TwoStepGrad,
    /// One gradient step with `w = x` and `v = ∇f(x)`. Valid for `λ ≤ σ/L`.
    Raxgd,
    /// Gradient step to `w`, then a nearby `x` chosen by the offset rule
    /// under `d(w, x) ≤ (1-σ)/3·d(y, x)`. Valid for `λ ≤ σ/(2L)`.
    GenRaxgd { offset: OffsetRule },
}

impl Strategy {
    /// The largest step size under the strategy's documented validity
    /// condition (`1/L` for the exact strategy, which is valid at any step —
    /// the returned value is the conventional default, not a bound).
    pub fn auto_lambda(&self, f: &Objective, sigma: f64) -> f64 {
        let l = f.l();
        match self {
            Strategy::ExactQuadratic => 1.0 / l,
            Strategy::NesterovGrad => sigma * sigma / (2.0 * l),
            // σ²/(2L) at the fixed budget σ = 3/4.
            Strategy::TwoStepGrad => 9.0 / (32.0 * l),
            Strategy::Raxgd => sigma / l,
            Strategy::GenRaxgd { .. } => sigma / (2.0 * l),
        }
    }

    /// Validate a step size against the strategy's condition.
    pub fn check_lambda(&self, f: &Objective, lambda: f64, sigma: f64) -> Result<()> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Validation(format!("step size must be positive, got {lambda}")));
        }
        if !matches!(self, Strategy::ExactQuadratic | Strategy::TwoStepGrad) && !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::Validation(format!("sigma must lie in (0, 1), got {sigma}")));
        }
        // A hair of slack so λ computed as the exact bound is not rejected.
        let slack = 1.0 + 1e-9;
        let l = f.l();
        match self {
            Strategy::ExactQuadratic => Ok(()),
            Strategy::NesterovGrad => {
                if lambda <= sigma * sigma / (2.0 * l) * slack {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "the gradient-anchored strategy requires lambda <= sigma^2/(2L) = {:.6e}, got {lambda:.6e}",
                        sigma * sigma / (2.0 * l)
                    )))
                }
            }
            Strategy::TwoStepGrad => {
                if lambda <= 9.0 / (32.0 * l) * slack {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "the two-step strategy requires lambda <= 9/(32L) = {:.6e}, got {lambda:.6e}",
                        9.0 / (32.0 * l)
                    )))
                }
            }
            Strategy::Raxgd => {
                if lambda <= sigma / l * slack {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "the gradient-output strategy requires lambda <= sigma/L = {:.6e}, got {lambda:.6e}",
                        sigma / l
                    )))
                }
            }
            Strategy::GenRaxgd { .. } => {
                if lambda <= sigma / (2.0 * l) * slack {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "the generalized gradient strategy requires lambda <= sigma/(2L) = {:.6e}, got {lambda:.6e}",
                        sigma / (2.0 * l)
                    )))
                }
            }
        }
    }

    /// Whether the strategy anchors its certificate at the reference point
    /// (`w = y`), which keeps `w` on the geodesic the solver interpolated.
    pub fn anchors_at_reference(&self) -> bool {
        matches!(self, Strategy::NesterovGrad | Strategy::TwoStepGrad)
    }

    /// The effective error budget σ the strategy reports (fixed 3/4 for the
    /// two-step method, 0 for exact steps).
    pub fn effective_sigma(&self, sigma: f64) -> f64 {
        match self {
            Strategy::ExactQuadratic => 0.0,
            Strategy::TwoStepGrad => 0.75,
            _ => sigma,
        }
    }

    /// Run the strategy at reference point `y`.
    pub fn apply(&self, f: &Objective, y: &Point, lambda: f64, sigma: f64) -> Result<Certificate> {
        match self {
            Strategy::ExactQuadratic => exact_quadratic(f, y, lambda),
            Strategy::NesterovGrad => nesterov_grad(f, y, lambda, sigma),
            Strategy::TwoStepGrad => two_step_grad(f, y, lambda),
            Strategy::Raxgd => raxgd(f, y, lambda, sigma),
            Strategy::GenRaxgd { offset } => gen_raxgd(f, y, lambda, sigma, offset),
        }
    }
}

/// Left-hand side of the defining inequality minus `cert.eps`.
///
/// Always returns the diagnostic, even when positive; strategy outputs must
/// come out at or below [`RESIDUAL_TOL`].
pub fn verify(f: &Objective, y: &Point, cert: &Certificate, lambda: f64, mu: f64) -> f64 {
    let m = f.manifold();
    let log_wx = m.log_map(&cert.w, &cert.x);
    let log_wy = m.log_map(&cert.w, y);
    let combo = Tangent::assemble(cert.w.clone(), log_wx.vec() - log_wy.vec() + cert.v.vec() * lambda);
    let first = m.norm(&combo).powi(2) / (2.0 * (1.0 + lambda * mu).powi(2));
    let dxw = m.distance(&cert.x, &cert.w);
    let second = lambda / (1.0 + lambda * mu)
        * (f.value(&cert.x) - f.value(&cert.w) - m.inner(&log_wx, &cert.v) + 0.5 * mu * dxw * dxw);
    first + second - cert.eps
}

/// Shared tail of every constructor: compute `ε` by the relative-error rule,
/// verify the inequality, and reject invalid certificates.
#[allow(clippy::too_many_arguments)] // takes exactly the certificate's parts
fn finish(
    f: &Objective,
    y: &Point,
    x: Point,
    w: Point,
    v: Tangent,
    grad_w: Tangent,
    lambda: f64,
    sigma_eff: f64,
    exact: bool,
) -> Result<Certificate> {
    let m = f.manifold();
    let mu = f.mu();
    let eps = if exact {
        0.0
    } else {
        let dw = m.tangent_distance(&w, &x, y);
        sigma_eff * sigma_eff / (2.0 * (1.0 + lambda * mu).powi(2)) * dw * dw
    };
    let mut cert = Certificate { x, w, v, grad_w, eps, lhs_residual: 0.0, sigma_eff };
    cert.lhs_residual = verify(f, y, &cert, lambda, mu);
    if cert.lhs_residual > RESIDUAL_TOL {
        return Err(Error::Certificate(format!(
            "inexact proximal inequality violated by {:.3e} (budget eps = {:.3e})",
            cert.lhs_residual, cert.eps
        )));
    }
    Ok(cert)
}

/// Exact proximal point of a flat-space quadratic: for
/// `f(x) = ½(x-c)ᵀH(x-c)` the minimizer of `f(u) + ‖u-y‖²/(2λ)` is
/// `x = (I + λH)⁻¹(y + λHc)`, which collapses to `(y + λμc)/(1 + λμ)` in the
/// isotropic case. Sets `w = x`, `v = (y - x)/λ` (so `x + λv = y` exactly)
/// and `ε = 0`.
pub fn exact_quadratic(f: &Objective, y: &Point, lambda: f64) -> Result<Certificate> {
    let m = f.manifold();
    if m.kind() != ManifoldKind::Euclidean {
        return Err(Error::Validation("exact proximal steps are flat-space only".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::Validation(format!("step size must be positive, got {lambda}")));
    }
    let x = match f.quadratic_parts() {
        Some((h, c)) => {
            let n = y.coords().len();
            let a = DMatrix::identity(n, n) + &h * lambda;
            let rhs = y.coords() + (h * c) * lambda;
            let sol = a
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::Numeric("proximal linear system is singular".into()))?;
            Point::from_manifold_coords(m, sol)
        }
        None => {
            return Err(Error::Validation(
                "exact proximal steps need a quadratic or flat squared-distance objective".into(),
            ))
        }
    };
    let v = m.project_tangent(&x, (y.coords() - x.coords()) / lambda);
    let grad_w = f.grad(&x);
    finish(f, y, x.clone(), x, v, grad_w, lambda, 0.0, true)
}

/// One gradient step anchored at the reference point:
/// `w = y`, `x = exp_y(-λ∇f(y))`, `v = ∇f(y) + μ·log_y(x)`.
pub fn nesterov_grad(f: &Objective, y: &Point, lambda: f64, sigma: f64) -> Result<Certificate> {
    Strategy::NesterovGrad.check_lambda(f, lambda, sigma)?;
    let m = f.manifold();
    let g = f.grad(y);
    let x = m.exp_map(y, &g.scale(-lambda));
    let log_yx = m.log_map(y, &x);
    let v = m.add(&g, &log_yx.scale(f.mu()));
    finish(f, y, x, y.clone(), v, g, lambda, sigma, false)
}

/// Two successive gradient steps anchored at the reference point, with the
/// fixed budget `σ = 3/4`:
/// `x̃ = exp_y(-λ∇f(y))`, `x = exp_x̃(-λ∇f(x̃))`, `w = y`,
/// `v = ∇f(y) + μ·log_y(x)`.
pub fn two_step_grad(f: &Objective, y: &Point, lambda: f64) -> Result<Certificate> {
    Strategy::TwoStepGrad.check_lambda(f, lambda, 0.75)?;
    let m = f.manifold();
    let g = f.grad(y);
    let mid = m.exp_map(y, &g.scale(-lambda));
    let g_mid = f.grad(&mid);
    let x = m.exp_map(&mid, &g_mid.scale(-lambda));
    let log_yx = m.log_map(y, &x);
    let v = m.add(&g, &log_yx.scale(f.mu()));
    finish(f, y, x, y.clone(), v, g, lambda, 0.75, false)
}

/// Gradient step whose output is also the anchor:
/// `w = x = exp_y(-λ∇f(y))`, `v = ∇f(x)`.
///
/// Because `w = x`, the second term of the defining inequality vanishes
/// identically and validity reduces to `‖log_x(y) - λ∇f(x)‖ ≤ σ·d(x, y)`.
pub fn raxgd(f: &Objective, y: &Point, lambda: f64, sigma: f64) -> Result<Certificate> {
    Strategy::Raxgd.check_lambda(f, lambda, sigma)?;
    let m = f.manifold();
    let g = f.grad(y);
    let x = m.exp_map(y, &g.scale(-lambda));
    let v = f.grad(&x);
    finish(f, y, x.clone(), x, v.clone(), v, lambda, sigma, false)
}

/// Generalized form: gradient step to the anchor `w = exp_y(-λ∇f(y))`, output
/// `x` near `w` under `d(w, x) ≤ (1-σ)/3·d(y, x)`, `v = ∇f(w) + μ·log_w(x)`.
///
/// The offset rule proposes `x`; proposals violating the constraint are
/// pulled back toward `w` along the geodesic until it holds.
pub fn gen_raxgd(
    f: &Objective,
    y: &Point,
    lambda: f64,
    sigma: f64,
    offset: &OffsetRule,
) -> Result<Certificate> {
    Strategy::GenRaxgd { offset: offset.clone() }.check_lambda(f, lambda, sigma)?;
    let m = f.manifold();
    let g = f.grad(y);
    let w = m.exp_map(y, &g.scale(-lambda));
    let x = match offset {
        OffsetRule::Identity => w.clone(),
        OffsetRule::HashPerturb { fraction } => {
            if !(*fraction > 0.0 && *fraction < 1.0) {
                return Err(Error::Validation(format!(
                    "offset fraction must lie in (0, 1), got {fraction}"
                )));
            }
            propose_offset(m, &w, y, sigma, *fraction)?
        }
    };
    let grad_w = f.grad(&w);
    let log_wx = m.log_map(&w, &x);
    let v = m.add(&grad_w, &log_wx.scale(f.mu()));
    finish(f, y, x, w, v, grad_w, lambda, sigma, false)
}

/// Deterministic pseudo-random offset from `w`, shrunk until the
/// `d(w, x) ≤ (1-σ)/3·d(y, x)` constraint holds.
fn propose_offset(m: &Manifold, w: &Point, y: &Point, sigma: f64, fraction: f64) -> Result<Point> {
    let d_yw = m.distance(y, w);
    if d_yw < 1e-14 {
        return Ok(w.clone());
    }
    let mut seed = 0u64;
    for c in w.coords().iter() {
        seed = seed.rotate_left(7) ^ c.to_bits();
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let dir = m.random_unit_tangent(&mut rng, w);
    let cap = (1.0 - sigma) / 3.0;
    // d(y,x) ≥ d(y,w) - t, so t ≤ fraction·cap·d(y,w)/(1 + cap) keeps the
    // constraint satisfiable; the loop below then enforces it exactly.
    let mut t = fraction * cap * d_yw / (1.0 + cap);
    for _ in 0..64 {
        let x = m.exp_map(w, &dir.scale(t));
        if m.distance(w, &x) <= cap * m.distance(y, &x) {
            return Ok(x);
        }
        t *= 0.5;
    }
    Err(Error::Numeric(
        "offset proposal could not satisfy its distance constraint after geodesic shrinking".into(),
    ))
}

/// Sample the flat-space approximate-subgradient inequality implied by a
/// certificate: for every `z`,
/// `f(z) ≥ f(x) + ⟨v, z - x⟩ + (μ/2)‖x - z‖² - (1 + λμ)/λ·ε`.
/// Returns the worst violation over `samples` random `z` (≤ 1e-9 for valid
/// certificates; positive values expose a corrupted `v`).
pub fn eps_subgradient_check<R: Rng + ?Sized>(
    f: &Objective,
    cert: &Certificate,
    lambda: f64,
    mu: f64,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let m = f.manifold();
    if m.kind() != ManifoldKind::Euclidean {
        return Err(Error::Validation("the subgradient sampling check is flat-space only".into()));
    }
    let slack = (1.0 + lambda * mu) / lambda * cert.eps;
    let radius = if f.domain_radius().is_finite() { f.domain_radius() } else { 5.0 };
    let mut worst = f64::NEG_INFINITY;
    let fx = f.value(&cert.x);
    for _ in 0..samples {
        let z = m.random_in_ball(rng, &cert.x, radius);
        let dz = z.coords() - cert.x.coords();
        let d = dz.norm();
        let minorant = fx + cert.v.vec().dot(&dz) + 0.5 * mu * d * d - slack;
        worst = worst.max(minorant - f.value(&z));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Manifold;
    use nalgebra::DVector;

    fn flat_quadratic() -> Objective {
        let m = Manifold::euclidean(2);
        let p = m.point(vec![2.0, 0.0]).unwrap();
        Objective::squared_distance(&m, p, 10.0).unwrap()
    }

    #[test]
    fn exact_prox_recovers_closed_form() {
        // μ = 1, λ = 1, y = 0, p = (2,0): x = (y + λμp)/(1+λμ) = (1,0),
        // v = (y - x)/λ = (-1,0), and x + λv = y exactly.
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![0.0, 0.0]).unwrap();
        let cert = exact_quadratic(&f, &y, 1.0).unwrap();
        assert!((cert.x.as_slice()[0] - 1.0).abs() < 1e-12);
        assert!((cert.v.vec()[0] + 1.0).abs() < 1e-12);
        assert_eq!(cert.eps, 0.0);
        assert!(cert.lhs_residual.abs() <= 1e-12);
        let back = cert.x.coords() + cert.v.vec() * 1.0;
        assert!((back - y.coords()).norm() == 0.0);
    }

    #[test]
    fn exact_prox_small_step_stays_near_reference() {
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![0.5, -0.25]).unwrap();
        let cert = exact_quadratic(&f, &y, 1e-9).unwrap();
        assert!((cert.x.coords() - y.coords()).norm() < 1e-8);
    }

    #[test]
    fn exact_prox_fixed_point_at_optimum() {
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![2.0, 0.0]).unwrap();
        let cert = exact_quadratic(&f, &y, 0.7).unwrap();
        assert!((cert.x.coords() - y.coords()).norm() < 1e-14);
        assert!(cert.v.vec().norm() < 1e-14);
    }

    #[test]
    fn gradient_step_at_stationary_point_is_trivial() {
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![2.0, 0.0]).unwrap(); // the optimum
        let cert = nesterov_grad(&f, &y, 0.1, 0.5).unwrap();
        assert!(m.distance(&cert.x, &y) < 1e-14);
        assert!(cert.v.vec().norm() < 1e-14);
        assert_eq!(cert.eps, 0.0);
    }

    #[test]
    fn gradient_step_certificate_verifies_on_quadratic() {
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![0.0, 1.0]).unwrap();
        // μ = L = 1, λ = 1/8, σ = 1/2 satisfies λ ≤ σ²/(2L).
        let cert = nesterov_grad(&f, &y, 0.125, 0.5).unwrap();
        assert!(cert.lhs_residual <= RESIDUAL_TOL);
    }

    #[test]
    fn step_size_conditions_are_enforced() {
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![0.0, 1.0]).unwrap();
        assert!(matches!(nesterov_grad(&f, &y, 0.2, 0.5), Err(Error::Validation(_))));
        assert!(matches!(two_step_grad(&f, &y, 0.45), Err(Error::Validation(_))));
        assert!(matches!(raxgd(&f, &y, 0.95, 0.9), Err(Error::Validation(_))));
        assert!(matches!(
            gen_raxgd(&f, &y, 0.5, 0.9, &OffsetRule::Identity),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn corrupted_vector_fails_verification() {
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![0.0, 1.0]).unwrap();
        let mut cert = nesterov_grad(&f, &y, 0.125, 0.5).unwrap();
        let bad = cert.v.vec() + DVector::from_vec(vec![3.0, -4.0]);
        cert.v.set_vec(bad);
        assert!(verify(&f, &y, &cert, 0.125, f.mu()) > 1e-3);
    }

    #[test]
    fn two_step_descends_twice() {
        let f = Objective::random_quadratic(6, 50.0, 9).unwrap();
        let m = f.manifold();
        let y = m.point(vec![1.0, -0.5, 0.3, 0.8, -1.2, 0.4]).unwrap();
        let lambda = 1.0 / (4.0 * f.l());
        let g = f.grad(&y);
        let mid = m.exp_map(&y, &g.scale(-lambda));
        let cert = two_step_grad(&f, &y, lambda).unwrap();
        assert!(f.value(&cert.x) <= f.value(&mid));
        assert!(f.value(&mid) <= f.value(&y));
        assert!(cert.lhs_residual <= RESIDUAL_TOL);
    }

    #[test]
    fn gradient_output_reduces_inequality_to_first_term() {
        // With w = x the relative-error condition is
        // ‖log_x(y) - λ∇f(x)‖ ≤ σ·d(x, y).
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![0.0, 1.0]).unwrap();
        let sigma = 0.9;
        let lambda = sigma / f.l();
        let cert = raxgd(&f, &y, lambda, sigma).unwrap();
        let log_xy = m.log_map(&cert.x, &y);
        let gap = (log_xy.vec() - cert.v.vec() * lambda).norm();
        assert!(gap <= sigma * m.distance(&cert.x, &y) + 1e-15);
        assert!(cert.lhs_residual <= RESIDUAL_TOL);
    }

    #[test]
    fn generalized_identity_offset_matches_gradient_output() {
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![0.4, 0.9]).unwrap();
        let lambda = 0.9 / (2.0 * f.l());
        let gen = gen_raxgd(&f, &y, lambda, 0.9, &OffsetRule::Identity).unwrap();
        let plain = raxgd(&f, &y, lambda, 0.9).unwrap();
        assert!((gen.x.coords() - plain.x.coords()).norm() < 1e-15);
        assert!((gen.v.vec() - plain.v.vec()).norm() < 1e-12);
    }

    #[test]
    fn generalized_offset_respects_constraint_and_verifies() {
        let m = Manifold::hyperbolic(3, 1.0).unwrap();
        let f = Objective::squared_distance(&m, m.origin(), 2.0).unwrap();
        let o = m.origin();
        let dir = m.tangent(&o, vec![0.0, 0.5, -0.3, 0.2]).unwrap();
        let y = m.exp_map(&o, &dir);
        let sigma = 0.7;
        let lambda = sigma / (2.0 * f.l());
        let cert = gen_raxgd(&f, &y, lambda, sigma, &OffsetRule::HashPerturb { fraction: 0.75 }).unwrap();
        let cap = (1.0 - sigma) / 3.0;
        assert!(m.distance(&cert.w, &cert.x) <= cap * m.distance(&y, &cert.x) + 1e-15);
        assert!(cert.lhs_residual <= RESIDUAL_TOL);
        assert!(m.distance(&cert.w, &cert.x) > 0.0, "offset rule should actually move x");
    }

    #[test]
    fn subgradient_sampling_flags_corruption() {
        let f = flat_quadratic();
        let m = f.manifold();
        let y = m.point(vec![0.0, 1.0]).unwrap();
        let cert = exact_quadratic(&f, &y, 1.0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let ok = eps_subgradient_check(&f, &cert, 1.0, f.mu(), 500, &mut rng).unwrap();
        assert!(ok <= 1e-12, "violation {ok}");

        let mut bad = cert.clone();
        let v = bad.v.vec() + DVector::from_vec(vec![0.0, 2.0]);
        bad.v.set_vec(v);
        let flagged = eps_subgradient_check(&f, &bad, 1.0, f.mu(), 500, &mut rng).unwrap();
        assert!(flagged > 1e-3);
    }
}
