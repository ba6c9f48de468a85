//! Quantum f-divergences of positive semidefinite operators on finite-dimensional
//! complex Hilbert spaces, together with a small laboratory for studying which maps
//! on the positive cone leave every such divergence unchanged.
//!
//! For PSD operators `A`, `B` and a convex generator `f: [0, inf) -> R`, the
//! divergence `S_f(A || B)` is computed here by three deliberately independent
//! routes, so each can serve as an oracle for the others:
//!
//! | route | idea | entry point |
//! |-------|------|-------------|
//! | spectral | weight `f` over eigenvalue pairs of `A` and `B` by eigenvector overlaps | [`divergence_spectral`] |
//! | superoperator | apply `f` to the map `X -> A X B^-1` on Hilbert-Schmidt space | [`divergence_superoperator`] |
//! | perturbative | evaluate against `B + eps*I` and drive `eps` to zero | [`divergence_limit`] |
//!
//! Classical special cases (relative entropy, Tsallis relative entropy, squared
//! Hellinger distance) get closed-form evaluators in [`divergence`] that bypass
//! the generic machinery, again for cross-checking.
//!
//! The [`preserver`] module exercises the structural side: unitary and antiunitary
//! conjugations preserve `S_f` for every generator, trace-respecting maps that are
//! not conjugations measurably distort it, and a black-box preserver can be probed
//! on a handful of rank-one inputs to reconstruct the conjugating matrix and decide
//! whether it acts linearly or antilinearly.
//!
//! Divergences take values in `[some real, +inf]`, so arithmetic runs on
//! [`ExtendedReal`], which keeps the `0 * inf = 0` convention used throughout.
//!
//! # Example
//!
//! ```
//! use qfdiv::{divergence_spectral, make_entropy, ExtendedReal, PsdOperator};
//!
//! let a = PsdOperator::diagonal(&[2.0, 1.0]).unwrap();
//! let b = PsdOperator::identity(2);
//! let f = make_entropy();
//! let result = divergence_spectral(&a, &b, &f).unwrap();
//! match result.value {
//!     ExtendedReal::Finite(v) => assert!((v - 2.0 * 2.0_f64.ln()).abs() < 1e-12),
//!     ExtendedReal::PosInfinity => unreachable!("supports are compatible"),
//! }
//! ```
//!
//! # What can go wrong
//!
//! Support matters: when the kernel of `B` sees mass of `A` and the generator
//! grows superlinearly, the divergence is genuinely `+inf` and is reported as
//! such, never as a large float. Operators are validated at construction
//! (Hermiticity, positivity up to a scale-aware tolerance), so the numerical
//! kernels can assume clean inputs.

pub mod cli;
pub mod divergence;
pub mod generator;
pub mod linalg;
pub mod preserver;

pub use divergence::{
    boundary_values, divergence_epsilon, divergence_limit, divergence_spectral,
    divergence_spectral_with_breakdown, divergence_superoperator, hellinger_sq, trace_rule,
    tsallis_closed, umegaki, ConvergenceReport, DivergenceResult, EpsilonSchedule, Route,
    TermContribution,
};
pub use generator::{
    certify_strict_convexity, default_convexity_grid, estimate_omega, make_affine, make_custom,
    make_entropy, make_exp_decreasing, make_sqrt_deviation, make_tsallis, ConvexityCertificate,
    ConvexityWitness, ExtendedReal, GeneratorFunction,
};
pub use linalg::{
    eig_hermitian, hs_inner, overlap_table, random_psd, random_rank_one_projection, random_unitary,
    support_contained, support_projection, CMatrix, Complex, HermitianOperator, OverlapTable,
    Projection, PsdOperator, SpectralDecomposition, UnitaryMatrix,
};
pub use preserver::{
    check_preservation, extremal_checks, falsify, rank_one_overlap_check, recover_operator,
    zero_characterization, ConjugationKind, ExtremalReport, InfBoundCheck, MaxBoundCheck,
    PairSampler, PreservationReport, RankOneOverlapReport, RecoveryResult, TransformSpec, Witness,
    ZeroCharacterizationReport,
};

use thiserror::Error;

/// Everything this crate can refuse to do, and why.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error(
        "not Hermitian: entry ({row}, {col}) differs from the conjugate of its \
         transpose by {violation:.3e} (tolerance {tolerance:.1e})"
    )]
    NotHermitian {
        row: usize,
        col: usize,
        violation: f64,
        tolerance: f64,
    },

    #[error("not positive semidefinite: eigenvalue {eigenvalue:.6e} is below the tolerance band")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error(
        "eigensolver did not converge within {sweeps} sweeps: \
         off-diagonal mass {off_diagonal:.3e} remains"
    )]
    EigenNonConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("not unitary: ||U^* U - I||_HS = {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("not a projection: idempotence residual {residual:.3e}")]
    NotProjection { residual: f64 },

    #[error("scalar function undefined at eigenvalue {eigenvalue:.6e}")]
    FunctionDomain { eigenvalue: f64 },

    #[error("rank {rank} is invalid for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },

    #[error("generator evaluated to a non-finite value at x = {x:.6e}")]
    NonFiniteGenerator { x: f64 },

    #[error("not convex-like: difference quotient decreases at x = {x:.3e}")]
    NotConvexLike { x: f64 },

    #[error("support of the first operator is not contained in the support of the second")]
    SupportViolation,

    #[error("map is not a conjugation: {reason}")]
    NotConjugation { reason: String },

    #[error("map output is not positive semidefinite: eigenvalue {eigenvalue:.6e}")]
    NonPsdOutput { eigenvalue: f64 },

    #[error("numerical invariant violated: {what} (residual {residual:.3e})")]
    InvariantViolated { what: &'static str, residual: f64 },

    #[error("malformed matrix file: {reason}")]
    MatrixFormat { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
