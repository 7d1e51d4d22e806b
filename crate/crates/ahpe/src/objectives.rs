//! Geodesically strongly convex, smooth test objectives with value/gradient
//! oracles and known minimizers.
//!
//! Three families are provided:
//!
//! - [`Objective::squared_distance`] — `f(x) = ½·d²(x, p)` on either
//!   manifold; 1-strongly convex with smoothness `√K·D·coth(√K·D)` over a
//!   declared domain radius `D` (exactly 1 in flat space).
//! - [`Objective::karcher`] — weighted Fréchet-mean objective
//!   `f(x) = ½·Σ wᵢ·d²(x, pᵢ)`; the minimizer has no closed form and is
//!   computed at construction by gradient descent to gradient norm `1e-12`.
//! - [`Objective::quadratic`] — flat-space `f(x) = ½·(x-c)ᵀH(x-c)` with an
//!   arbitrary symmetric positive definite `H`, used for conditioning
//!   experiments.
//!
//! Distance-based objectives on curvature `-K` are only smooth on bounded
//! sets, so each carries a domain radius; solvers monitor iterates against it
//! and warn on exit rather than failing.

use crate::manifold::{Manifold, ManifoldKind, Point, Tangent};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// `√K·D·coth(√K·D)`: the smoothness modulus of `½d²(·, p)` within geodesic
/// distance `D` of `p` under curvature `-K`. Evaluated through `tanh` so it
/// stays finite for very large `√K·D`.
pub fn distance_smoothness(k: f64, d: f64) -> f64 {
    let a = k.sqrt() * d;
    if a < 1e-4 {
        let a2 = a * a;
        1.0 + a2 / 3.0 - a2 * a2 / 45.0
    } else {
        a / a.tanh()
    }
}

enum Kind {
    SquaredDistance { target: Point },
    Karcher { anchors: Vec<Point>, weights: Vec<f64> },
    Quadratic { h: DMatrix<f64>, center: DVector<f64> },
}

/// A geodesically `mu`-strongly-convex, `l`-smooth function on a manifold,
/// with a known minimizer.
pub struct Objective {
    manifold: Manifold,
    kind: Kind,
    mu: f64,
    l: f64,
    optimum: Option<Point>,
    optimal_value: Option<f64>,
    /// Whether the optimum was obtained numerically rather than analytically.
    numeric_optimum: bool,
    domain_center: Point,
    domain_radius: f64,
}

/// Result of sampling a convexity inequality: the worst violation seen.
#[derive(Clone, Copy, Debug)]
pub struct ConvexityReport {
    pub samples: usize,
    pub max_violation: f64,
}

/// The strong-convexity minorant anchored at a point:
/// `f_w(y) = f(w) + ⟨grad, log_w(y)⟩ + (μ/2)·d²(w, y) ≤ f(y)`.
pub struct LowerModel {
    pub anchor: Point,
    pub value: f64,
    pub grad: Tangent,
    pub mu: f64,
}

impl LowerModel {
    /// Evaluate the minorant at `y`.
    pub fn eval(&self, manifold: &Manifold, y: &Point) -> f64 {
        let log = manifold.log_map(&self.anchor, y);
        let d = manifold.distance(&self.anchor, y);
        self.value + manifold.inner(&self.grad, &log) + 0.5 * self.mu * d * d
    }
}

impl Objective {
    /// `f(x) = ½·d²(x, p)`, minimized at `p` with value 0. `domain_radius`
    /// declares how far from `p` iterates are expected to travel; it sets the
    /// smoothness modulus on curved manifolds.
    pub fn squared_distance(manifold: &Manifold, target: Point, domain_radius: f64) -> Result<Objective> {
        if !(domain_radius > 0.0) {
            return Err(Error::Validation("domain radius must be positive".into()));
        }
        let l = distance_smoothness(manifold.curvature(), domain_radius);
        Ok(Objective {
            manifold: *manifold,
            mu: 1.0,
            l,
            optimum: Some(target.clone()),
            optimal_value: Some(0.0),
            numeric_optimum: false,
            domain_center: target.clone(),
            domain_radius,
            kind: Kind::SquaredDistance { target },
        })
    }

    /// Weighted Fréchet-mean objective `f(x) = ½·Σ wᵢ·d²(x, pᵢ)` with
    /// weights summing to one. The anchors should lie within `domain_radius`
    /// of each other; the smoothness modulus uses twice that radius so it
    /// covers iterates on the far side of the anchor cloud.
    ///
    /// The minimizer is found at construction by gradient descent down to
    /// gradient norm `1e-12` and flagged as numerically obtained.
    pub fn karcher(
        manifold: &Manifold,
        anchors: Vec<Point>,
        weights: Vec<f64>,
        domain_radius: f64,
    ) -> Result<Objective> {
        if anchors.is_empty() {
            return Err(Error::Validation("the anchor list must not be empty".into()));
        }
        if anchors.len() != weights.len() {
            return Err(Error::Validation(format!(
                "{} anchors but {} weights",
                anchors.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Validation("all weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("weights must sum to 1, got {total}")));
        }
        if !(domain_radius > 0.0) {
            return Err(Error::Validation("domain radius must be positive".into()));
        }
        // The smoothness modulus below assumes every anchor lies within
        // `domain_radius` of every other (so any domain point is within twice
        // that of any anchor); reject anchor clouds that spread wider.
        let mut spread = 0.0f64;
        for (i, a) in anchors.iter().enumerate() {
            for b in &anchors[i + 1..] {
                spread = spread.max(manifold.distance(a, b));
            }
        }
        if spread > domain_radius * (1.0 + 1e-12) {
            return Err(Error::Validation(format!(
                "anchor spread {spread:.6} exceeds the domain radius {domain_radius}; \
                 the declared smoothness modulus requires anchors within the domain radius of each other"
            )));
        }
        // Exact normalization so downstream identities see Σw = 1 to roundoff.
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let l = distance_smoothness(manifold.curvature(), 2.0 * domain_radius);

        let mut obj = Objective {
            manifold: *manifold,
            mu: 1.0,
            l,
            optimum: None,
            optimal_value: None,
            numeric_optimum: true,
            domain_center: anchors[0].clone(),
            domain_radius,
            kind: Kind::Karcher { anchors, weights },
        };
        let opt = obj.descend_to_optimum()?;
        obj.optimal_value = Some(obj.value(&opt));
        obj.domain_center = opt.clone();
        obj.optimum = Some(opt);
        Ok(obj)
    }

    /// Flat-space quadratic `f(x) = ½·(x-c)ᵀH(x-c)` for symmetric positive
    /// definite `H`; `mu`/`l` are the extreme eigenvalues of `H`.
    pub fn quadratic(manifold: &Manifold, h: DMatrix<f64>, center: DVector<f64>) -> Result<Objective> {
        if manifold.kind() != ManifoldKind::Euclidean {
            return Err(Error::Validation("quadratic objectives are flat-space only".into()));
        }
        let n = manifold.ambient_dim();
        if h.nrows() != n || h.ncols() != n || center.len() != n {
            return Err(Error::Validation("quadratic shape does not match the manifold dimension".into()));
        }
        if (&h - h.transpose()).norm() > 1e-9 * (1.0 + h.norm()) {
            return Err(Error::Validation("quadratic matrix must be symmetric".into()));
        }
        let eig = h.clone().symmetric_eigen().eigenvalues;
        let mu = eig.min();
        let l = eig.max();
        if !(mu > 0.0) {
            return Err(Error::Validation(format!(
                "quadratic matrix must be positive definite (smallest eigenvalue {mu:.3e})"
            )));
        }
        let optimum = Point::from_manifold_coords(manifold, center.clone());
        Ok(Objective {
            manifold: *manifold,
            mu,
            l,
            optimum: Some(optimum.clone()),
            optimal_value: Some(0.0),
            numeric_optimum: false,
            domain_center: optimum,
            domain_radius: f64::INFINITY,
            kind: Kind::Quadratic { h, center },
        })
    }

    /// A reproducible random quadratic: eigenvalues log-spaced over
    /// `[1, condition]` under a seeded random orthogonal change of basis,
    /// centered at a seeded random point.
    pub fn random_quadratic(dim: usize, condition: f64, seed: u64) -> Result<Objective> {
        if dim == 0 {
            return Err(Error::Validation("quadratic dimension must be positive".into()));
        }
        if !(condition >= 1.0) {
            return Err(Error::Validation("condition number must be at least 1".into()));
        }
        let manifold = Manifold::euclidean(dim);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut gauss = || -> f64 {
            let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        };
        let g = DMatrix::from_fn(dim, dim, |_, _| gauss());
        let q = g.qr().q();
        let spectrum = DVector::from_fn(dim, |i, _| {
            if dim == 1 {
                condition
            } else {
                condition.powf(i as f64 / (dim - 1) as f64)
            }
        });
        let h = &q * DMatrix::from_diagonal(&spectrum) * q.transpose();
        // Symmetrize exactly: Q Λ Qᵀ is symmetric only up to roundoff.
        let h = (&h + h.transpose()) * 0.5;
        let center = DVector::from_fn(dim, |_, _| gauss());
        Objective::quadratic(&manifold, h, center)
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    /// Strong-convexity modulus `μ`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Smoothness modulus `L` over the declared domain.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// The minimizer, when known.
    pub fn optimum(&self) -> Option<&Point> {
        self.optimum.as_ref()
    }

    /// The minimal value, when known.
    pub fn optimal_value(&self) -> Option<f64> {
        self.optimal_value
    }

    /// Whether the stored optimum came from a numerical solve rather than a
    /// closed form.
    pub fn numeric_optimum(&self) -> bool {
        self.numeric_optimum
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn domain_center(&self) -> &Point {
        &self.domain_center
    }

    /// How far `x` sits outside the declared smoothness domain (0 inside).
    pub fn domain_violation(&self, x: &Point) -> f64 {
        (self.manifold.distance(x, &self.domain_center) - self.domain_radius).max(0.0)
    }

    /// Function value at `x`.
    pub fn value(&self, x: &Point) -> f64 {
        match &self.kind {
            Kind::SquaredDistance { target } => {
                let d = self.manifold.distance(x, target);
                0.5 * d * d
            }
            Kind::Karcher { anchors, weights } => {
                let mut s = 0.0;
                for (p, w) in anchors.iter().zip(weights) {
                    let d = self.manifold.distance(x, p);
                    s += w * d * d;
                }
                0.5 * s
            }
            Kind::Quadratic { h, center } => {
                let r = x.coords() - center;
                0.5 * (h * &r).dot(&r)
            }
        }
    }

    /// Value and Riemannian gradient at `x`. For the distance-based
    /// objectives the gradient is `-Σ wᵢ·log_x(pᵢ)`.
    pub fn eval_grad(&self, x: &Point) -> (f64, Tangent) {
        match &self.kind {
            Kind::SquaredDistance { target } => {
                let log = self.manifold.log_map(x, target);
                let d = self.manifold.norm(&log);
                (0.5 * d * d, log.scale(-1.0))
            }
            Kind::Karcher { anchors, weights } => {
                let mut value = 0.0;
                let mut grad = self.manifold.zero_tangent(x);
                for (p, w) in anchors.iter().zip(weights) {
                    let log = self.manifold.log_map(x, p);
                    let d = self.manifold.norm(&log);
                    value += 0.5 * w * d * d;
                    grad = self.manifold.add(&grad, &log.scale(-w));
                }
                (value, grad)
            }
            Kind::Quadratic { h, center } => {
                let r = x.coords() - center;
                let g = h * &r;
                let value = 0.5 * g.dot(&r);
                (value, self.manifold.project_tangent(x, g))
            }
        }
    }

    /// Gradient only.
    pub fn grad(&self, x: &Point) -> Tangent {
        self.eval_grad(x).1
    }

    /// The `(H, c)` of a flat-space representation `½(x-c)ᵀH(x-c) + const`,
    /// when one exists: quadratics return their data, flat squared-distance
    /// and Fréchet-mean objectives return the identity Hessian with the
    /// (weighted) anchor mean. `None` on curved manifolds.
    pub fn quadratic_parts(&self) -> Option<(DMatrix<f64>, DVector<f64>)> {
        if self.manifold.kind() != ManifoldKind::Euclidean {
            return None;
        }
        let n = self.manifold.ambient_dim();
        match &self.kind {
            Kind::SquaredDistance { target } => {
                Some((DMatrix::identity(n, n), target.coords().clone()))
            }
            Kind::Karcher { anchors, weights } => {
                let mut mean = DVector::zeros(n);
                for (p, w) in anchors.iter().zip(weights) {
                    mean += p.coords() * *w;
                }
                Some((DMatrix::identity(n, n), mean))
            }
            Kind::Quadratic { h, center } => Some((h.clone(), center.clone())),
        }
    }

    /// The strong-convexity minorant anchored at `w` with this objective's `μ`.
    pub fn lower_model(&self, w: &Point) -> LowerModel {
        let (value, grad) = self.eval_grad(w);
        LowerModel { anchor: w.clone(), value, grad, mu: self.mu }
    }

    /// Sample the geodesic strong-convexity inequality
    /// `f(y) ≥ f(x) + ⟨∇f(x), log_x(y)⟩ + (μ/2)·d²(x, y)` on random pairs in
    /// the domain and report the worst violation (should be ≤ 1e-9).
    pub fn check_strong_convexity<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> ConvexityReport {
        self.check_convexity_modulus(self.mu, samples, rng)
    }

    /// Same check with an arbitrary trial modulus, so an overstated `μ′` can
    /// be demonstrated to produce positive violations.
    pub fn check_convexity_modulus<R: Rng + ?Sized>(
        &self,
        mu: f64,
        samples: usize,
        rng: &mut R,
    ) -> ConvexityReport {
        let radius = if self.domain_radius.is_finite() { self.domain_radius } else { 10.0 };
        let mut max_violation = f64::NEG_INFINITY;
        for _ in 0..samples {
            let x = self.manifold.random_in_ball(rng, &self.domain_center, radius);
            let y = self.manifold.random_in_ball(rng, &self.domain_center, radius);
            let (fx, gx) = self.eval_grad(&x);
            let log = self.manifold.log_map(&x, &y);
            let d = self.manifold.distance(&x, &y);
            let minorant = fx + self.manifold.inner(&gx, &log) + 0.5 * mu * d * d;
            max_violation = max_violation.max(minorant - self.value(&y));
        }
        ConvexityReport { samples, max_violation }
    }

    /// Gradient descent to the minimizer, used for Fréchet means.
    fn descend_to_optimum(&self) -> Result<Point> {
        let Kind::Karcher { anchors, .. } = &self.kind else {
            unreachable!("only Fréchet means are solved numerically");
        };
        let mut x = anchors[0].clone();
        let step = 1.0 / self.l;
        for _ in 0..200_000 {
            let g = self.grad(&x);
            if self.manifold.norm(&g) <= 1e-12 {
                return Ok(x);
            }
            x = self.manifold.exp_map(&x, &g.scale(-step));
        }
        Err(Error::Numeric(
            "Fréchet-mean descent failed to reach gradient norm 1e-12 within 200000 steps".into(),
        ))
    }
}

impl Point {
    /// Internal helper: wrap coordinates already known to satisfy the
    /// manifold constraint (used where `Vec` round-trips would be noise).
    pub(crate) fn from_manifold_coords(manifold: &Manifold, coords: DVector<f64>) -> Point {
        manifold
            .point(coords.as_slice().to_vec())
            .expect("internal coordinates must already be valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squared_distance_flat_values() {
        let m = Manifold::euclidean(2);
        let p = m.point(vec![0.0, 0.0]).unwrap();
        let f = Objective::squared_distance(&m, p, 10.0).unwrap();
        let x = m.point(vec![3.0, 4.0]).unwrap();
        let (v, g) = f.eval_grad(&x);
        assert_eq!(v, 12.5);
        assert_eq!(g.vec().as_slice(), &[3.0, 4.0]);
        assert_eq!(f.l(), 1.0);
        assert_eq!(f.mu(), 1.0);
    }

    #[test]
    fn gradient_vanishes_at_optimum() {
        let m = Manifold::hyperbolic(2, 1.0).unwrap();
        let p = m.origin();
        let f = Objective::squared_distance(&m, p.clone(), 1.0).unwrap();
        assert_eq!(f.value(&p), 0.0);
        assert!(m.norm(&f.grad(&p)) <= 1e-8);
    }

    #[test]
    fn hyperbolic_smoothness_is_coth() {
        let m = Manifold::hyperbolic(2, 1.0).unwrap();
        let f = Objective::squared_distance(&m, m.origin(), 1.0).unwrap();
        assert!((f.l() - 1.3130352854993313).abs() < 1e-12, "L = {}", f.l());
    }

    #[test]
    fn karcher_mean_of_two_flat_anchors() {
        let m = Manifold::euclidean(2);
        let a = m.point(vec![0.0, 0.0]).unwrap();
        let b = m.point(vec![2.0, 0.0]).unwrap();
        let f = Objective::karcher(&m, vec![a, b], vec![0.5, 0.5], 2.0).unwrap();
        let opt = f.optimum().unwrap();
        assert!((opt.as_slice()[0] - 1.0).abs() < 1e-10);
        assert!(opt.as_slice()[1].abs() < 1e-10);
        // f* = ½(0.5·1 + 0.5·1) = 0.5 at the midpoint.
        assert!((f.optimal_value().unwrap() - 0.5).abs() < 1e-10);
        assert!(f.numeric_optimum());
    }

    #[test]
    fn karcher_symmetric_anchors_center_on_origin() {
        let m = Manifold::hyperbolic(2, 1.0).unwrap();
        let o = m.origin();
        let dir = m.tangent(&o, vec![0.0, 1.0, 0.0]).unwrap();
        let a = m.exp_map(&o, &dir);
        let b = m.exp_map(&o, &dir.scale(-1.0));
        // The two anchors sit 2 apart, so the domain radius must cover that.
        let f = Objective::karcher(&m, vec![a.clone(), b.clone()], vec![0.5, 0.5], 2.0).unwrap();
        assert!(m.distance(f.optimum().unwrap(), &o) < 1e-9);
        assert!(matches!(
            Objective::karcher(&m, vec![a, b], vec![0.5, 0.5], 1.5),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn single_anchor_karcher_matches_squared_distance() {
        let m = Manifold::hyperbolic(2, 1.0).unwrap();
        let o = m.origin();
        let dir = m.tangent(&o, vec![0.0, 0.4, -0.3]).unwrap();
        let p = m.exp_map(&o, &dir);
        let k = Objective::karcher(&m, vec![p.clone()], vec![1.0], 1.0).unwrap();
        let s = Objective::squared_distance(&m, p, 1.0).unwrap();
        let x = m.exp_map(&o, &m.tangent(&o, vec![0.0, -0.2, 0.5]).unwrap());
        assert!((k.value(&x) - s.value(&x)).abs() < 1e-12);
        let (_, gk) = k.eval_grad(&x);
        let (_, gs) = s.eval_grad(&x);
        assert!((gk.vec() - gs.vec()).norm() < 1e-12);
    }

    #[test]
    fn karcher_rejects_bad_weights() {
        let m = Manifold::euclidean(1);
        let a = m.point(vec![0.0]).unwrap();
        assert!(Objective::karcher(&m, vec![], vec![], 1.0).is_err());
        assert!(Objective::karcher(&m, vec![a.clone()], vec![-1.0], 1.0).is_err());
        assert!(Objective::karcher(&m, vec![a.clone()], vec![0.4], 1.0).is_err());
        assert!(Objective::karcher(&m, vec![a], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn random_quadratic_conditioning() {
        let f = Objective::random_quadratic(8, 100.0, 3).unwrap();
        assert!((f.mu() - 1.0).abs() < 1e-9);
        assert!((f.l() - 100.0).abs() < 1e-6 * 100.0);
        assert_eq!(f.optimal_value(), Some(0.0));
        assert!(f.grad(f.optimum().unwrap()).vec().norm() <= 1e-8);
    }

    #[test]
    fn wrong_modulus_is_detected() {
        let m = Manifold::hyperbolic(2, 1.0).unwrap();
        let o = m.origin();
        let dir = m.tangent(&o, vec![0.0, 0.8, 0.1]).unwrap();
        let f = Objective::squared_distance(&m, m.exp_map(&o, &dir), 1.5).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let honest = f.check_strong_convexity(500, &mut rng);
        assert!(honest.max_violation <= 1e-9, "violation {}", honest.max_violation);
        let dishonest = f.check_convexity_modulus(2.0 * f.l(), 500, &mut rng);
        assert!(dishonest.max_violation > 1e-3);
    }
}
