//! Steady-state electronic transport through a non-interacting junction coupled
//! to two finite reservoirs of damped modes.
//!
//! Each reservoir mode `k` has frequency `ω_k`, couples to the system sites
//! through a vector `v_k`, and relaxes at rate `γ_k > 0` toward a Fermi-Dirac
//! target. The target is either pinned at the mode's own frequency
//! ([`model::RelaxationKind::Markovian`]) or frequency-resolved
//! ([`model::RelaxationKind::NonMarkovianWideBand`]).
//!
//! The crate provides several independent routes to the steady-state current:
//!
//! * frequency-space Green's-function integrals ([`current::current_general`],
//!   [`current::current_noninteracting`], [`current::current_pc_integral`]),
//! * a closed form for proportional couplings ([`current::current_pc_analytic`]),
//! * weak- and strong-damping asymptotics,
//! * a continuum Landauer reference, and
//! * a direct correlation-matrix steady-state solve ([`steadystate`]).
//!
//! These routes cross-validate each other; the integration tests exercise the
//! agreements systematically.
//!
//! Units: `ħ = e = 1`, so currents are `e × energy / ħ`. Positive current flows
//! from the left reservoir into the system.

use num_complex::Complex;

pub mod current;
pub mod greens;
mod linalg;
pub mod model;
pub mod quad;
pub mod steadystate;
#[cfg(test)]
pub(crate) mod test_util;

/// Double-precision complex scalar used throughout.
pub type C64 = Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Errors reported by model construction, solvers, and current evaluation.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A bias specification is malformed (negative temperature, non-finite μ).
    #[error("invalid bias: {0}")]
    InvalidBias(String),
    /// A model or solver parameter is out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// An operation requiring proportional coupling was given a junction whose
    /// reservoirs are not proportional.
    #[error("junction is not proportionally coupled: {0}")]
    NotProportional(String),
    /// The requested operation does not support the given relaxation kind.
    #[error("unsupported relaxation kind: {0}")]
    UnsupportedKind(String),
    /// Adaptive quadrature failed to reach the requested tolerance. The best
    /// available estimate and its error bound are carried along.
    #[error(
        "quadrature did not converge: best estimate {best:.6e} ± {error_estimate:.3e} \
         after {n_evaluations} integrand evaluations"
    )]
    QuadratureFailure {
        best: f64,
        error_estimate: f64,
        n_evaluations: usize,
    },
    /// A linear system was singular to working precision.
    #[error("singular linear system: {0}")]
    SingularMatrix(String),
    /// The one-particle dynamics has an eigenvalue with non-negative real part,
    /// so no unique relaxed steady state exists.
    #[error("undamped subspace: {0}")]
    UndampedSubspace(String),
    /// An occupation number lies outside `[0, 1]`.
    #[error("invalid occupancy: {0}")]
    InvalidOccupancy(String),
    /// Matrix or vector dimensions are inconsistent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A transient integration step size violates the stability bound.
    #[error("step size too large: {0}")]
    StepSize(String),
    /// An internal cross-check failed (e.g. an imaginary residue that should
    /// vanish did not).
    #[error("numerical consistency check failed: {0}")]
    Inconsistent(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
