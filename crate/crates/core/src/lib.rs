//! Special Lagrangian submanifolds of the nearly Kähler CP³.
//!
//! The crate works in the affine chart `Z₀ = 1` of CP³ = Sp(2)/(S¹×S³):
//!
//! * [`algebra`]: quaternions, `sp(2)` and small complex matrices.
//! * [`chart`]: local section into Sp(2), unitary coframe and the forms ω, ψ, ω_V, g.
//! * [`symmetry`]: Killing fields of SU(2) subgroups, moment-type maps μ, ν, the
//!   angle θ of an orbit and slice scans.
//! * [`linear_model`]: special Lagrangian subspaces of ℂ³ under S(U(2)×U(1)).
//! * [`homogeneous`]: induced metric, Ricci spectrum and fundamental cubic of orbits.
//! * [`structure_eqs`]: gauge-fixed structure equations and Bonnet-type assembly.
//! * [`flag`]: adjoint orbits of su(3) and the cohomogeneity-one test on the flag manifold.
//! * [`cli`]: report-producing drivers used by the `nkslag` binary.

pub mod algebra;
pub mod chart;
pub mod cli;
pub mod flag;
pub mod homogeneous;
pub mod linear_model;
pub mod rng;
pub mod structure_eqs;
pub mod symmetry;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NkError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    Asymmetric(f64),
    #[error("point is not finite: section undefined")]
    NonFinite,
    #[error("point is outside the chart Z0 != 0")]
    OutOfChart,
    #[error("orbit has dimension {0}, expected 3")]
    OrbitDimension(usize),
    #[error("not special Lagrangian: {0}")]
    NotSpecialLagrangian(String),
    #[error("degenerate basis")]
    DegenerateBasis,
    #[error("inconsistent solution constants (residual {0:e})")]
    InconsistentConstants(f64),
    #[error("non-positive-definite metric")]
    NotPositiveDefinite,
    #[error("θ = π/4 is not allowed here")]
    ThetaQuarterPi,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, NkError>;

pub use algebra::{Quaternion, QuatMat2, C64};
pub use chart::{ChartPoint, CoframeValue, HomPoint, TangentVec};
pub use symmetry::{GeneratorSet, GroupId, MomentValue};
