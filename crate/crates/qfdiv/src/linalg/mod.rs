//! Complex linear algebra on small dense matrices: validated operator types,
//! a Jacobi eigensolver, support projections, overlap tables, spectral scalar
//! calculus, seeded random generation, and the matrix file format.
//!
//! Everything here is dimension-generic but tuned for the sizes the divergence
//! machinery actually uses (up to 64); no sparsity, no blocking, no BLAS.

mod eig;
mod json;
mod matrix;
mod psd;
mod random;

pub use eig::{
    eig_hermitian, SpectralDecomposition, EIG_CONVERGENCE_REL, EIG_MAX_SWEEPS,
    EIG_ORTHONORMALITY_TOL, EIG_RECONSTRUCTION_REL,
};
pub use json::{load_hermitian, parse_hermitian, to_json_string, FILE_HERMITICITY_TOL};
pub use matrix::{
    hs_inner, CMatrix, Complex, HermitianOperator, Projection, UnitaryMatrix, HERMITICITY_TOL,
    PROJECTION_TOL, UNITARITY_TOL,
};
pub use psd::{
    matrix_function, overlap_table, support_contained, support_projection, OverlapEntry,
    OverlapTable, PsdOperator, OVERLAP_ROW_SUM_TOL, PSD_CLAMP_REL, SUPPORT_TOL,
};
pub use random::{mix, random_psd, random_rank_one_projection, random_unitary, rng_for};
