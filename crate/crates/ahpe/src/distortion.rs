//! Curvature-distortion rates and the interpolation-contraction identity.
//!
//! On a manifold with sectional curvature in `[-K, 0]`, tangent-space
//! distances taken at different base points differ by bounded multiplicative
//! factors. [`t_rate`] evaluates the rate `T_K` that certifies
//! `d²(x, y) ≤ T_K(d(x, z)) · d_z²(x, y)`, and [`s_rate`] the contraction
//! factor `S_K` controlling how far a tangent-space interpolation can drift
//! from the corresponding geodesic interpolation. Both are exact formulas
//! with series guards near zero. [`interpolation_identity`] is the algebraic
//! identity behind the contraction argument; it is exact in real arithmetic.

use crate::manifold::{Manifold, Point};
use nalgebra::DVector;

/// A multiplicative distortion factor together with the distance that
/// produced it. `delta ≥ 1` always, with equality at distance zero or in
/// flat space.
#[derive(Clone, Copy, Debug)]
pub struct DistortionRate {
    pub delta: f64,
    pub source_distance: f64,
}

/// `√K·r / tanh(√K·r)`, series below the cutoff.
fn coth_ratio(a: f64) -> f64 {
    if a < 1e-4 {
        let a2 = a * a;
        1.0 + a2 / 3.0 - a2 * a2 / 45.0
    } else {
        a / a.tanh()
    }
}

/// `sinh(b)/b`, series below the cutoff.
fn sinh_ratio(b: f64) -> f64 {
    if b < 1e-4 {
        let b2 = b * b;
        1.0 + b2 / 6.0 + b2 * b2 / 120.0
    } else {
        b.sinh() / b
    }
}

/// The distortion rate `T_K(r)`: the larger of `1 + 4(√K·r/tanh(√K·r) - 1)`
/// and `(sinh(2√K·r)/(2√K·r))²`, which bounds how much squared tangent-space
/// distances can grow when the base point moves by `r`. Returns `1` at
/// `r = 0` or `K = 0`.
pub fn t_rate(k: f64, r: f64) -> f64 {
    debug_assert!(k >= 0.0 && r >= 0.0);
    if k == 0.0 || r == 0.0 {
        return 1.0;
    }
    let a = k.sqrt() * r;
    let first = 1.0 + 4.0 * (coth_ratio(a) - 1.0);
    let s = sinh_ratio(2.0 * a);
    first.max(s * s)
}

/// The contraction factor `S_K(r) = cosh(√K·r) - sinh(√K·r)/(√K·r)`.
///
/// Vanishes at `r = 0` (series limit) and for `K = 0`. The ratio
/// `S_K(r)/(K·r²)` increases from `1/3` (the `r → 0` limit, from the series
/// `a²/3 + a⁴/30 + …`) to `e⁻¹` at `K·r² = 1`, so on that range
/// `K·r²/3 ≤ S_K(r) ≤ e⁻¹·K·r²`, with both ends sharp. `S_K(r)/r` is
/// increasing in `r`.
pub fn s_rate(k: f64, r: f64) -> f64 {
    debug_assert!(k >= 0.0 && r >= 0.0);
    if k == 0.0 || r == 0.0 {
        return 0.0;
    }
    let a = k.sqrt() * r;
    if a < 1e-4 {
        let a2 = a * a;
        a2 / 3.0 + a2 * a2 / 30.0
    } else {
        a.cosh() - a.sinh() / a
    }
}

/// A valid distortion rate for moving the tangent-space base point from `w`
/// to anywhere else while measuring distances from `z`: `T_K(d(w, z))`.
///
/// This is exactly the construction whose validity is guaranteed (rather
/// than empirical): `d²(x, y) ≤ t_rate(K, d(x, z)) · d_z²(x, y)` for all
/// `x, y, z`, so no tighter ad-hoc rate is substituted.
pub fn valid_rate(manifold: &Manifold, w: &Point, z: &Point) -> DistortionRate {
    let r = manifold.distance(w, z);
    DistortionRate { delta: t_rate(manifold.curvature(), r), source_distance: r }
}

/// Both sides of the interpolation identity
/// `p‖x‖² + q‖y‖² = (p+q)·‖(px + qy)/(p+q)‖² + pq/(p+q)·‖x - y‖²`,
/// returned as `(lhs, rhs)`. Exact in real arithmetic for any `p + q > 0`.
///
/// # Panics
/// If `p + q ≤ 0`.
pub fn interpolation_identity(p: f64, q: f64, x: &DVector<f64>, y: &DVector<f64>) -> (f64, f64) {
    assert!(p + q > 0.0, "interpolation identity needs p + q > 0, got {}", p + q);
    let lhs = p * x.norm_squared() + q * y.norm_squared();
    let mid = (x * p + y * q) / (p + q);
    let rhs = (p + q) * mid.norm_squared() + p * q / (p + q) * (x - y).norm_squared();
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_rate_limits() {
        assert_eq!(t_rate(1.0, 0.0), 1.0);
        assert_eq!(t_rate(0.0, 3.7), 1.0);
        assert_eq!(t_rate(0.0, 0.0), 1.0);
    }

    #[test]
    #[allow(clippy::excessive_precision)] // reference value kept verbatim
    fn t_rate_known_value() {
        // At K = 1, r = 1 the sinh branch dominates:
        // 1 + 4(1/tanh(1) - 1) ≈ 2.252141, (sinh(2)/2)² ≈ 3.288529.
        let t = t_rate(1.0, 1.0);
        assert!((t - 3.2885291045020608).abs() < 1e-13, "t_rate(1,1) = {t}");
    }

    #[test]
    fn s_rate_limits_and_value() {
        assert_eq!(s_rate(1.0, 0.0), 0.0);
        assert_eq!(s_rate(0.0, 2.0), 0.0);
        // cosh(1) - sinh(1) = 1/e.
        assert!((s_rate(1.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn s_rate_quadratic_envelope() {
        // On K·r² ≤ 1 the ratio S_K(r)/(K·r²) runs from 1/3 (at r → 0) up to
        // exactly e⁻¹ (at K·r² = 1) and is nondecreasing along the way.
        let inv_e = (-1.0f64).exp();
        for &k in &[0.25f64, 1.0, 4.0] {
            let mut prev_ratio = 1.0 / 3.0;
            for i in 1..=400 {
                let r = (i as f64 / 400.0) / k.sqrt(); // K·r² runs up to 1
                let ratio = s_rate(k, r) / (k * r * r);
                assert!(ratio >= 1.0 / 3.0 - 1e-12, "ratio {ratio} below 1/3 at K={k}, r={r}");
                assert!(ratio <= inv_e + 1e-12, "ratio {ratio} above 1/e at K={k}, r={r}");
                assert!(ratio >= prev_ratio - 1e-12, "ratio not monotone at K={k}, r={r}");
                prev_ratio = ratio;
            }
            assert!((prev_ratio - inv_e).abs() < 1e-12, "end ratio {prev_ratio}");
        }
    }

    #[test]
    fn series_matches_direct_formula_at_crossover() {
        // The guards switch at √K·r = 1e-4; both branches must agree there.
        // The direct formulas subtract O(1) quantities to produce O(a²)
        // results, so their own rounding floor is a few ulps of 1 — the
        // comparison has to be absolute at that floor, not relative to the
        // tiny difference.
        for &a in &[0.9e-4f64, 1.1e-4] {
            let direct_t = 1.0 + 4.0 * (a / a.tanh() - 1.0);
            let series_t = 1.0 + 4.0 * (coth_ratio(a) - 1.0);
            assert!((direct_t - series_t).abs() <= 4e-15, "t mismatch at a = {a}");
            let direct_s = a.cosh() - a.sinh() / a;
            assert!((s_rate(1.0, a) - direct_s).abs() <= 1e-15, "s mismatch at a = {a}");
        }
    }

    #[test]
    fn interpolation_identity_trivial_cases() {
        let x = DVector::from_vec(vec![1.0, 0.0]);
        let y = DVector::from_vec(vec![-1.0, 0.0]);
        let (lhs, rhs) = interpolation_identity(1.0, 1.0, &x, &y);
        assert_eq!(lhs, 2.0);
        assert!((rhs - 2.0).abs() < 1e-15); // 0 + (1/2)·4

        let (l2, r2) = interpolation_identity(3.0, 0.0, &x, &y);
        assert!((l2 - r2).abs() < 1e-15); // q = 0 degenerates to p‖x‖²

        let (l3, r3) = interpolation_identity(2.0, 5.0, &x, &x);
        assert!((l3 - r3).abs() < 1e-15); // x == y
    }

    #[test]
    #[should_panic(expected = "p + q > 0")]
    fn interpolation_identity_rejects_nonpositive_mass() {
        let x = DVector::from_vec(vec![1.0]);
        interpolation_identity(1.0, -1.0, &x, &x);
    }
}
