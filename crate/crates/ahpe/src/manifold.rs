//! Geometric primitives for the two supported Hadamard manifolds: Euclidean
//! space `R^d` (curvature 0) and the hyperboloid model of hyperbolic space
//! `H^d` with constant sectional curvature `-K`, `K > 0`.
//!
//! Hyperbolic points live on the upper sheet of the hyperboloid embedded in
//! Minkowski space `R^{d+1}`: `⟨x, x⟩_M = -1/K` with `x_0 > 0`, where
//! `⟨x, y⟩_M = -x_0 y_0 + Σ_i x_i y_i`. Realizing curvature `-K` by scaling
//! the unit hyperboloid keeps a single code path for every `K > 0`, and the
//! Lorentz model has closed-form exponential/logarithm maps and parallel
//! transport that stay numerically stable far better than ball models near
//! their boundary.
//!
//! All operations are pure; values can be shared freely across threads.

use crate::{Error, Result};
use nalgebra::DVector;
use rand::Rng;

/// Constraint drift up to this size is left untouched.
const DRIFT_OK: f64 = 1e-9;
/// Drift in `(DRIFT_OK, DRIFT_REPROJECT]` is silently re-projected; anything
/// larger is rejected as corrupted input.
const DRIFT_REPROJECT: f64 = 1e-6;
/// Below this argument the `sinh(a)/a`-style ratios switch to series.
const SERIES_CUTOFF: f64 = 1e-4;

/// Which of the two supported geometries a [`Manifold`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifoldKind {
    /// Flat `R^d`; ambient representation is the point itself.
    Euclidean,
    /// Hyperboloid model of `H^d` with curvature `-K`; ambient `R^{d+1}`.
    Hyperbolic,
}

/// A Hadamard manifold: flat space or constant-curvature hyperbolic space.
///
/// `curvature` stores the bound `K ≥ 0`; the sectional curvature lies in
/// `[-K, 0]` everywhere (exactly `-K` for the hyperbolic kind, `0` for the
/// Euclidean kind). Both geometries are uniquely geodesic, so `log_map` is
/// total and single-valued.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Manifold {
    kind: ManifoldKind,
    dim: usize,
    curvature: f64,
}

/// A point in the ambient representation of its manifold.
///
/// Construct through [`Manifold::point`] (which validates and re-projects) or
/// receive from manifold operations, which only produce valid points.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: DVector<f64>,
}

impl Point {
    /// Ambient coordinates (length `dim` flat, `dim + 1` hyperbolic).
    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Coordinates as a plain slice.
    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }
}

/// A tangent vector together with the point whose tangent space it lives in.
#[derive(Clone, Debug)]
pub struct Tangent {
    base: Point,
    vec: DVector<f64>,
}

impl Tangent {
    /// The point this vector is attached to.
    pub fn base(&self) -> &Point {
        &self.base
    }

    /// Ambient components of the vector.
    pub fn vec(&self) -> &DVector<f64> {
        &self.vec
    }

    /// In-place scaling, keeping the base point.
    pub fn scale(&self, s: f64) -> Tangent {
        Tangent { base: self.base.clone(), vec: &self.vec * s }
    }

    /// In-crate constructor for components produced by linear algebra on
    /// vectors already lying in `T_base` (sums and differences stay tangent).
    pub(crate) fn assemble(base: Point, vec: DVector<f64>) -> Tangent {
        Tangent { base, vec }
    }

    /// Replace the components without re-projecting — test hooks use this to
    /// inject deliberately corrupted vectors.
    pub(crate) fn set_vec(&mut self, vec: DVector<f64>) {
        self.vec = vec;
    }
}

/// Minkowski inner product `-x_0 y_0 + Σ_{i≥1} x_i y_i`.
pub fn minkowski_dot(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let mut s = -x[0] * y[0];
    for i in 1..x.len() {
        s += x[i] * y[i];
    }
    s
}

/// `sinh(a)/a`, series below [`SERIES_CUTOFF`] to avoid 0/0.
fn sinh_ratio(a: f64) -> f64 {
    if a.abs() < SERIES_CUTOFF {
        let a2 = a * a;
        1.0 + a2 / 6.0 + a2 * a2 / 120.0
    } else {
        a.sinh() / a
    }
}

/// `a/sinh(a)`, series below [`SERIES_CUTOFF`].
fn inv_sinh_ratio(a: f64) -> f64 {
    if a.abs() < SERIES_CUTOFF {
        let a2 = a * a;
        1.0 - a2 / 6.0 + 7.0 * a2 * a2 / 360.0
    } else {
        a / a.sinh()
    }
}

impl Manifold {
    /// Flat `R^dim`.
    pub fn euclidean(dim: usize) -> Manifold {
        Manifold { kind: ManifoldKind::Euclidean, dim, curvature: 0.0 }
    }

    /// Hyperbolic space of the given dimension with curvature `-k`, `k > 0`.
    pub fn hyperbolic(dim: usize, k: f64) -> Result<Manifold> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Validation(format!(
                "hyperbolic curvature bound must be a positive finite number, got {k}"
            )));
        }
        if dim == 0 {
            return Err(Error::Validation("manifold dimension must be positive".into()));
        }
        Ok(Manifold { kind: ManifoldKind::Hyperbolic, dim, curvature: k })
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    /// Intrinsic dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Curvature bound `K ≥ 0` (sectional curvature lies in `[-K, 0]`).
    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    /// Length of the ambient representation: `d` flat, `d + 1` hyperbolic.
    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Euclidean => self.dim,
            ManifoldKind::Hyperbolic => self.dim + 1,
        }
    }

    /// The canonical base point: zero vector, or the hyperboloid apex
    /// `(1/√K, 0, …, 0)`.
    pub fn origin(&self) -> Point {
        match self.kind {
            ManifoldKind::Euclidean => Point { coords: DVector::zeros(self.dim) },
            ManifoldKind::Hyperbolic => {
                let mut c = DVector::zeros(self.dim + 1);
                c[0] = 1.0 / self.curvature.sqrt();
                Point { coords: c }
            }
        }
    }

    /// Constraint residual of an ambient vector: `|K⟨x,x⟩_M + 1|` on the
    /// hyperboloid, `0` in flat space.
    pub fn constraint_residual(&self, coords: &DVector<f64>) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean => 0.0,
            ManifoldKind::Hyperbolic => (self.curvature * minkowski_dot(coords, coords) + 1.0).abs(),
        }
    }

    /// Validate ambient coordinates as a point.
    ///
    /// Hyperbolic coordinates with constraint drift in `(1e-9, 1e-6]` are
    /// re-projected onto the sheet (rescaling keeps long solver runs from
    /// accumulating drift); drift above `1e-6`, a non-positive leading
    /// coordinate, wrong length, or non-finite entries are rejected.
    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        let v = DVector::from_vec(coords);
        if v.len() != self.ambient_dim() {
            return Err(Error::Validation(format!(
                "expected {} ambient coordinates, got {}",
                self.ambient_dim(),
                v.len()
            )));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation("point has non-finite coordinates".into()));
        }
        match self.kind {
            ManifoldKind::Euclidean => Ok(Point { coords: v }),
            ManifoldKind::Hyperbolic => {
                if v[0] <= 0.0 {
                    return Err(Error::Validation(
                        "hyperboloid points need a positive leading coordinate".into(),
                    ));
                }
                let drift = self.constraint_residual(&v);
                if drift <= DRIFT_OK {
                    Ok(Point { coords: v })
                } else if drift <= DRIFT_REPROJECT {
                    Ok(self.reproject(v))
                } else {
                    Err(Error::Validation(format!(
                        "coordinates are off the hyperboloid by {drift:.3e} (limit {DRIFT_REPROJECT:.0e})"
                    )))
                }
            }
        }
    }

    /// Rescale ambient coordinates back onto the hyperboloid sheet.
    fn reproject(&self, coords: DVector<f64>) -> Point {
        let m = minkowski_dot(&coords, &coords);
        debug_assert!(m < 0.0, "cannot re-project a non-timelike vector");
        let scale = 1.0 / (-self.curvature * m).sqrt();
        Point { coords: coords * scale }
    }

    /// Apply the drift policy to freshly computed hyperbolic coordinates.
    fn finish_point(&self, coords: DVector<f64>) -> Point {
        if self.kind == ManifoldKind::Euclidean {
            return Point { coords };
        }
        let drift = self.constraint_residual(&coords);
        if drift <= DRIFT_OK {
            Point { coords }
        } else if drift <= DRIFT_REPROJECT {
            self.reproject(coords)
        } else {
            panic!("internal geometry produced a point {drift:.3e} off the hyperboloid — corrupted input upstream");
        }
    }

    /// Wrap ambient components as a tangent vector at `x`, projecting onto
    /// the tangent space (Minkowski-orthogonalizing against the base on the
    /// hyperboloid). Returns an error for wrong lengths or non-finite input.
    pub fn tangent(&self, x: &Point, vec: Vec<f64>) -> Result<Tangent> {
        let v = DVector::from_vec(vec);
        if v.len() != self.ambient_dim() {
            return Err(Error::Validation(format!(
                "expected {} ambient components, got {}",
                self.ambient_dim(),
                v.len()
            )));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation("tangent vector has non-finite components".into()));
        }
        Ok(self.project_tangent(x, v))
    }

    /// Orthogonal projection of an ambient vector onto `T_x`.
    pub fn project_tangent(&self, x: &Point, v: DVector<f64>) -> Tangent {
        match self.kind {
            ManifoldKind::Euclidean => Tangent { base: x.clone(), vec: v },
            ManifoldKind::Hyperbolic => {
                // ⟨v + K⟨v,x⟩x, x⟩_M = ⟨v,x⟩(1 + K⟨x,x⟩) = 0.
                let coef = self.curvature * minkowski_dot(&v, &x.coords);
                let vec = v + &x.coords * coef;
                Tangent { base: x.clone(), vec }
            }
        }
    }

    /// The zero vector of `T_x`.
    pub fn zero_tangent(&self, x: &Point) -> Tangent {
        Tangent { base: x.clone(), vec: DVector::zeros(self.ambient_dim()) }
    }

    /// Riemannian inner product of two tangent vectors at the same base.
    ///
    /// # Panics
    /// If the vectors are attached to different points.
    pub fn inner(&self, u: &Tangent, v: &Tangent) -> f64 {
        assert_same_point(&u.base, &v.base, "inner product needs a common base point");
        match self.kind {
            ManifoldKind::Euclidean => u.vec.dot(&v.vec),
            ManifoldKind::Hyperbolic => minkowski_dot(&u.vec, &v.vec),
        }
    }

    /// Riemannian norm of a tangent vector.
    pub fn norm(&self, v: &Tangent) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean => v.vec.norm(),
            // Tangent vectors are spacelike; clamp the tiny negative values
            // roundoff can produce.
            ManifoldKind::Hyperbolic => minkowski_dot(&v.vec, &v.vec).max(0.0).sqrt(),
        }
    }

    /// Sum of two tangent vectors at the same base.
    ///
    /// # Panics
    /// If the vectors are attached to different points.
    pub fn add(&self, u: &Tangent, v: &Tangent) -> Tangent {
        assert_same_point(&u.base, &v.base, "tangent sum needs a common base point");
        Tangent { base: u.base.clone(), vec: &u.vec + &v.vec }
    }

    /// Follow the geodesic from `x` with initial velocity `v` for unit time.
    ///
    /// The returned point satisfies `distance(x, exp_map(x, v)) = ‖v‖`.
    /// Exact down to the zero vector: the `sinh(a)/a` ratio switches to its
    /// series expansion below `a = 1e-4`, so there is no small-norm cutoff
    /// and arbitrarily small motions land.
    ///
    /// # Panics
    /// If `v` is not attached to `x`.
    pub fn exp_map(&self, x: &Point, v: &Tangent) -> Point {
        assert_same_point(x, &v.base, "exp_map needs the vector to be attached to the base point");
        match self.kind {
            ManifoldKind::Euclidean => Point { coords: &x.coords + &v.vec },
            ManifoldKind::Hyperbolic => {
                // exp_x(v) = cosh(a)·x + sinh(a)/a · v, a = √K‖v‖. The series
                // form of sinh(a)/a keeps this exact down to a = 0, so even
                // sub-roundoff motions are applied rather than dropped —
                // descent loops rely on arbitrarily small steps landing.
                let a = self.curvature.sqrt() * self.norm(v);
                let coords = &x.coords * a.cosh() + &v.vec * sinh_ratio(a);
                self.finish_point(coords)
            }
        }
    }

    /// The tangent vector at `x` pointing to `y` with `‖log_map(x,y)‖ = distance(x,y)`.
    ///
    /// Inverse of [`Manifold::exp_map`]: `exp_map(x, log_map(x, y)) = y` up to
    /// roundoff. Degrades gracefully as `y → x` — for nearby points the
    /// formula tends to the projected ambient difference, and coincident
    /// points give the zero vector.
    pub fn log_map(&self, x: &Point, y: &Point) -> Tangent {
        match self.kind {
            ManifoldKind::Euclidean => Tangent { base: x.clone(), vec: &y.coords - &x.coords },
            ManifoldKind::Hyperbolic => {
                let d = self.distance(x, y);
                let k = self.curvature;
                let alpha = (-k * minkowski_dot(&x.coords, &y.coords)).max(1.0);
                let a = k.sqrt() * d;
                // log_x(y) = a/sinh(a) · (y - α x);  ‖y - αx‖_M = sinh(a)/√K.
                let vec = (&y.coords - &x.coords * alpha) * inv_sinh_ratio(a);
                // The algebra is exactly tangent; projection only sweeps up roundoff.
                self.project_tangent(x, vec)
            }
        }
    }

    /// Geodesic distance.
    ///
    /// The hyperbolic branch evaluates `d = (2/√K)·asinh(√(K·⟨x-y, x-y⟩_M)/2)`,
    /// which is exact on the sheet and keeps full relative precision for
    /// nearby points where `arccosh(-K⟨x,y⟩)` would cancel.
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean => (&x.coords - &y.coords).norm(),
            ManifoldKind::Hyperbolic => {
                let diff = &x.coords - &y.coords;
                let q = minkowski_dot(&diff, &diff).max(0.0);
                let k = self.curvature;
                2.0 / k.sqrt() * ((k * q).sqrt() / 2.0).asinh()
            }
        }
    }

    /// Tangent-space distance `d_w(x, y) = ‖log_w(x) - log_w(y)‖`.
    ///
    /// Under non-positive curvature this never exceeds the geodesic distance
    /// `distance(x, y)`, with equality in flat space.
    pub fn tangent_distance(&self, w: &Point, x: &Point, y: &Point) -> f64 {
        let lx = self.log_map(w, x);
        let ly = self.log_map(w, y);
        let diff = Tangent { base: lx.base, vec: lx.vec - ly.vec };
        self.norm(&diff)
    }

    /// Parallel transport of `v ∈ T_x` to `T_y` along the connecting geodesic.
    ///
    /// Preserves norms and pairwise inner products. Uses the space-form
    /// identity `Γ(v) = v - ⟨log_x(y), v⟩/d² · (log_x(y) + log_y(x))`; for
    /// base points closer than `1e-8` the transported vector is simply
    /// re-projected at `y`, which is the more accurate branch there.
    ///
    /// # Panics
    /// If `v` is not attached to `x`.
    pub fn transport(&self, x: &Point, y: &Point, v: &Tangent) -> Tangent {
        assert_same_point(x, &v.base, "transport needs the vector to be attached to the start point");
        match self.kind {
            ManifoldKind::Euclidean => Tangent { base: y.clone(), vec: v.vec.clone() },
            ManifoldKind::Hyperbolic => {
                let d = self.distance(x, y);
                if d < 1e-8 {
                    return self.project_tangent(y, v.vec.clone());
                }
                let u_xy = self.log_map(x, y);
                let u_yx = self.log_map(y, x);
                let coef = minkowski_dot(&u_xy.vec, &v.vec) / (d * d);
                let vec = &v.vec - (&u_xy.vec + &u_yx.vec) * coef;
                self.project_tangent(y, vec)
            }
        }
    }

    /// The point a fraction `t` of the way along the geodesic from `x` to `y`:
    /// `exp_map(x, t·log_map(x, y))`.
    ///
    /// # Panics
    /// If `t` is outside `[0, 1]`.
    pub fn geodesic_interpolate(&self, x: &Point, y: &Point, t: f64) -> Point {
        assert!(
            (0.0..=1.0).contains(&t),
            "geodesic interpolation parameter must lie in [0, 1], got {t}"
        );
        if t == 0.0 {
            return x.clone();
        }
        if t == 1.0 {
            return y.clone();
        }
        let l = self.log_map(x, y);
        self.exp_map(x, &l.scale(t))
    }

    /// A point at exact geodesic distance `radius` from `center`, in a
    /// uniformly random direction.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, center: &Point, radius: f64) -> Point {
        if radius == 0.0 {
            return center.clone();
        }
        let dir = self.random_unit_tangent(rng, center);
        self.exp_map(center, &dir.scale(radius))
    }

    /// A point uniformly distributed (in exp-map pullback coordinates) in the
    /// geodesic ball of the given radius around `center`.
    pub fn random_in_ball<R: Rng + ?Sized>(&self, rng: &mut R, center: &Point, radius: f64) -> Point {
        let u: f64 = rng.gen::<f64>();
        let r = radius * u.powf(1.0 / self.dim as f64);
        self.random_point(rng, center, r)
    }

    /// A uniformly random unit vector in `T_x`.
    pub fn random_unit_tangent<R: Rng + ?Sized>(&self, rng: &mut R, x: &Point) -> Tangent {
        loop {
            let g: Vec<f64> = (0..self.ambient_dim())
                .map(|_| {
                    // Box-Muller keeps the dependency surface small.
                    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
                    let u2: f64 = rng.gen();
                    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                })
                .collect();
            let t = self.project_tangent(x, DVector::from_vec(g));
            let n = self.norm(&t);
            if n > 1e-6 {
                return t.scale(1.0 / n);
            }
        }
    }
}

/// Panic with a clear message when two points that must coincide do not.
fn assert_same_point(a: &Point, b: &Point, what: &str) {
    let scale = 1.0 + a.coords.norm().max(b.coords.norm());
    assert!(
        (&a.coords - &b.coords).norm() <= 1e-9 * scale,
        "{what} (points differ by {:.3e})",
        (&a.coords - &b.coords).norm()
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyp(dim: usize, k: f64) -> Manifold {
        Manifold::hyperbolic(dim, k).unwrap()
    }

    #[test]
    fn euclidean_exp_is_translation() {
        let m = Manifold::euclidean(2);
        let x = m.point(vec![0.0, 0.0]).unwrap();
        let v = m.tangent(&x, vec![1.0, 0.0]).unwrap();
        let y = m.exp_map(&x, &v);
        assert_eq!(y.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn zero_vector_maps_to_base() {
        for m in [Manifold::euclidean(3), hyp(2, 1.0), hyp(2, 2.5)] {
            let x = m.origin();
            let v = m.zero_tangent(&x);
            let y = m.exp_map(&x, &v);
            assert!(m.distance(&x, &y) <= 1e-15);
        }
    }

    #[test]
    fn hyperbolic_exp_known_value() {
        // Unit-speed geodesic from the apex of the unit hyperboloid reaches
        // (cosh 1, sinh 1, 0); the independent check against the geodesic ODE
        // lives in tests/manifold_checks.rs.
        let m = hyp(2, 1.0);
        let x = m.origin();
        let v = m.tangent(&x, vec![0.0, 1.0, 0.0]).unwrap();
        let y = m.exp_map(&x, &v);
        assert!((y.as_slice()[0] - 1.5430806348152437).abs() < 1e-12);
        assert!((y.as_slice()[1] - 1.1752011936438014).abs() < 1e-12);
        assert!(y.as_slice()[2].abs() < 1e-15);
        assert!((m.distance(&x, &y) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_distance_is_pythagoras() {
        let m = Manifold::euclidean(2);
        let x = m.point(vec![0.0, 0.0]).unwrap();
        let y = m.point(vec![3.0, 4.0]).unwrap();
        assert_eq!(m.distance(&x, &y), 5.0);
    }

    #[test]
    fn log_of_same_point_is_zero() {
        let m = hyp(3, 1.0);
        let x = m.origin();
        assert_eq!(m.norm(&m.log_map(&x, &x)), 0.0);
    }

    #[test]
    fn euclidean_log_is_difference() {
        let m = Manifold::euclidean(2);
        let x = m.point(vec![1.0, 2.0]).unwrap();
        let y = m.point(vec![4.0, -2.0]).unwrap();
        assert_eq!(m.log_map(&x, &y).vec().as_slice(), &[3.0, -4.0]);
    }

    #[test]
    fn transport_to_same_point_is_identity() {
        let m = hyp(2, 1.0);
        let x = m.origin();
        let v = m.tangent(&x, vec![0.0, 0.3, -0.4]).unwrap();
        let w = m.transport(&x, &x, &v);
        assert!((w.vec() - v.vec()).norm() < 1e-15);
    }

    #[test]
    fn interpolation_endpoints() {
        let m = hyp(2, 1.0);
        let x = m.origin();
        let v = m.tangent(&x, vec![0.0, 0.7, 0.1]).unwrap();
        let y = m.exp_map(&x, &v);
        assert_eq!(m.geodesic_interpolate(&x, &y, 0.0), x);
        assert_eq!(m.geodesic_interpolate(&x, &y, 1.0), y);
    }

    #[test]
    fn point_validation_rejects_garbage() {
        let m = hyp(2, 1.0);
        assert!(m.point(vec![1.0, 0.0]).is_err()); // wrong ambient length
        assert!(m.point(vec![0.5, 0.0, 0.0]).is_err()); // badly off the sheet
        assert!(m.point(vec![-1.0, 0.0, 0.0]).is_err()); // wrong sheet
        assert!(m.point(vec![f64::NAN, 0.0, 0.0]).is_err());
        assert!(Manifold::euclidean(2).point(vec![1.0]).is_err());
    }

    #[test]
    fn point_validation_reprojects_small_drift() {
        let m = hyp(2, 1.0);
        // 1e-8 relative drift: inside the re-projection band.
        let p = m.point(vec![1.0 + 5e-9, 0.0, 0.0]).unwrap();
        assert!(m.constraint_residual(p.coords()) <= 1e-12);
    }

    #[test]
    fn tangent_projection_is_minkowski_orthogonal() {
        let m = hyp(3, 2.0);
        let x = m.origin();
        let t = m.tangent(&x, vec![0.4, 0.1, -0.2, 0.9]).unwrap();
        assert!(minkowski_dot(t.vec(), x.coords()).abs() < 1e-12);
    }
}
