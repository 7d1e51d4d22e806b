//! Accelerated hybrid proximal extragradient (A-HPE) solvers on Euclidean
//! space and Hadamard manifolds, with pluggable inexact-proximal strategies,
//! per-iteration certificate checking, and a reproducible experiment harness.
//!
//! The crate is organized bottom-up:
//!
//! - [`manifold`] — geometric primitives (exponential/logarithm maps, parallel
//!   transport, distances) for flat space and the hyperboloid model of
//!   hyperbolic space with curvature `-K`.
//! - [`objectives`] — geodesically strongly convex, smooth test objectives
//!   with value/gradient oracles and known minimizers.
//! - [`distortion`] — curvature-distortion rates `T_K`/`S_K` and the
//!   interpolation-contraction identity used by the convergence analysis.
//! - [`iprox`] — inexact proximal strategies producing certificates
//!   `(x, v, w, eps)` together with the checker for the defining inequality.
//! - [`solvers`] — the accelerated proximal-extragradient loops (flat and
//!   manifold variants), coefficient recursions, and potential telemetry.
//! - [`harness`] — config-driven experiments, a gradient-descent baseline,
//!   CSV traces, and the invariant verification suite behind the CLI.
//!
//! # Example
//!
//! ```
//! use ahpe::manifold::Manifold;
//! use ahpe::objectives::Objective;
//!
//! let m = Manifold::hyperbolic(3, 1.0).unwrap();
//! let f = Objective::squared_distance(&m, m.origin(), 2.0).unwrap();
//! assert_eq!(f.value(&m.origin()), 0.0);
//! ```

// Validation throughout uses `!(v > 0.0)` rather than `v <= 0.0`: the negated
// form also fails for NaN, which is exactly what input checking wants.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distortion;
pub mod harness;
pub mod iprox;
pub mod manifold;
pub mod objectives;
pub mod solvers;

/// Crate-wide error type.
///
/// The variants map one-to-one onto the CLI exit codes: validation problems
/// exit 1, solver/certificate failures exit 2, and I/O problems exit 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid inputs: malformed points, inconsistent dimensions, parameter
    /// values outside a strategy's documented validity range, bad configs.
    #[error("validation error: {0}")]
    Validation(String),

    /// A produced iprox certificate failed its defining inequality, or a
    /// solver step violated a guarded runtime check.
    #[error("certificate failure: {0}")]
    Certificate(String),

    /// Internal numeric failure (no root in range, non-finite value, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Filesystem/serialization failure while reading configs or writing traces.
    #[error("i/o error: {0}")]
    Io(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
