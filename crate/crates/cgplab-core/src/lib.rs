//! Numerical toolkit for the coherence generating power (CGP) of unital
//! quantum maps and the induced metric geometry on maximally abelian
//! subalgebras (MASAs).
//!
//! Every physically meaningful quantity in this crate is computable through
//! at least two independent routes (closed form, superoperator, commutator
//! sum, Monte Carlo, ...), and the test suites hold those routes against each
//! other at tight tolerances. The modules are layered:
//!
//! * [`linalg`] — dense complex matrices, Hilbert–Schmidt inner product,
//!   structural validators, Hermitian eigensolver and singular values.
//! * [`mori`] — maximal orthogonal resolutions of the identity (MORIs),
//!   the labels of MASAs: construction, canonicalization, comparison.
//! * [`channel`] — Kraus channels, the dephasing projection and its
//!   complement, superoperator matrices, incoherence tests.
//! * [`mod@coherence`] — the state-level coherence measure and its
//!   commutator-form cross-check.
//! * [`cgp`] — coherence generating power: closed forms, Monte-Carlo
//!   estimation, Haar and Fourier samplers.
//! * [`grassmann`] — distances between MASAs, overlap matrices, the
//!   projective pull-back distance and related measures.
//! * [`diffgeo`] — differential metric along Hamiltonian paths:
//!   per-level susceptibilities and metric speeds.
//! * [`qubit`] — closed-form two-level expressions used as analytic
//!   oracles for every general-dimension module.
//!
//! All values are immutable and all operations pure, so everything here is
//! safe to use from multiple threads.

// index-based loops mirror the matrix formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod cgp;
pub mod channel;
pub mod coherence;
pub mod diffgeo;
pub mod grassmann;
pub mod linalg;
pub mod mori;
pub mod qubit;

use thiserror::Error;

/// Errors for every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {a_rows}x{a_cols} vs {b_rows}x{b_cols}")]
    ShapeMismatch {
        a_rows: usize,
        a_cols: usize,
        b_rows: usize,
        b_cols: usize,
    },

    #[error("dimension mismatch: {expected} vs {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("entry data length {len} does not match {rows}x{cols}")]
    BadEntryCount {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not unitary (max deviation {deviation:e} > {tol:e})")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e} > {tol:e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("not a valid density matrix: {reason}")]
    NotDensity { reason: String },

    #[error("degenerate spectrum: eigenvalue gap {gap:e} <= gap tolerance {gap_tol:e}")]
    DegenerateSpectrum { gap: f64, gap_tol: f64 },

    #[error("dimension {dim} exceeds the superoperator cap {cap}")]
    DimOverCap { dim: usize, cap: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("invalid tolerance: {reason}")]
    InvalidTolerance { reason: String },

    #[error("bloch vector has norm {norm}, expected 1")]
    NonUnitBloch { norm: f64 },

    #[error("argument {value} outside valid range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("invalid hamiltonian path: {reason}")]
    InvalidPath { reason: String },

    #[error("evaluation point {t} outside path domain [{t0}, {t1}]")]
    OutOfDomain { t: f64, t0: f64, t1: f64 },

    #[error("level tracking ambiguous: best overlap {overlap} below 0.5")]
    LevelTrackingAmbiguous { overlap: f64 },

    #[error("invalid kraus channel: {reason}")]
    InvalidChannel { reason: String },

    #[error("overlap determinant {det} exceeds 1 beyond the diagnostic slack")]
    DetAboveOne { det: f64 },

    #[error("sample count {got} below minimum {min}")]
    TooFewSamples { got: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub use cgp::{
    cgp_from_distance, cgp_normalization, cgp_unital, cgp_unitary, estimate_cgp, fourier_unitary,
    haar_unitary, sample_incoherent_state, sample_simplex_point, CgpEstimate,
};
pub use channel::{
    dephase, is_incoherent, is_incoherent_weak, q_project, KrausChannel, Superoperator,
    SUPEROP_DIM_CAP,
};
pub use coherence::{coherence, coherence_commutator, coherence_raw};
pub use diffgeo::{
    align_to, aligned_frames, metric_speed, susceptibilities, susceptibilities_from_frames, sweep,
    ClosedFormPath, HamiltonianCurve, HamiltonianPath, MetricSample,
};
pub use grassmann::{
    abs_det_overlap, cgp_tilde, dfs_distance, masa_distance, masa_distance_commutator,
    masa_distance_superop, overlap_matrix, phi_measure, x_matrix, OverlapMatrix,
};
pub use linalg::{
    commutator, eigh, hs_inner, hs_norm, hs_norm_sq, kron, singular_values, validate_density,
    validate_unitary, Complex64, ComplexMatrix, Tolerance,
};
pub use mori::{frame_deviation, Mori};
pub use qubit::{
    mori_from_bloch, qubit_cgp, qubit_dfs, qubit_distance, qubit_unitary, BlochVector,
};
