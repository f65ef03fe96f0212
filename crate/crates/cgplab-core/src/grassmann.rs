//! Metric geometry on the set of MASAs.
//!
//! The Hilbert–Schmidt distance between two dephasing projections is
//! computable three independent ways (closed form over the overlap matrix,
//! Frobenius norm of superoperator matrices, double commutator sum); their
//! agreement is a standing cross-check. The overlap determinant gives the
//! projective pull-back distance and the two derived generating-power
//! measures.

use crate::channel::Superoperator;
use crate::linalg::{commutator, hs_norm_sq, singular_values, ComplexMatrix, Tolerance};
use crate::mori::Mori;
use crate::{Error, Result};

/// Distances this far below round-off floor collapse to exact zero; the
/// closed-form distance subtracts O(d) sums whose round-off sits orders of
/// magnitude below this cutoff, and genuinely distinct MASAs sit orders of
/// magnitude above it.
const DISTANCE_SQ_FLOOR: f64 = 1e-12;

/// Singular values below this count as rank deficiency. One-sided Jacobi
/// leaves true zeros at round-off scale, a comfortable ten orders below
/// any singular value a well-posed overlap matrix produces.
fn rank_cutoff(dim: usize, s_max: f64) -> f64 {
    s_max * dim as f64 * f64::EPSILON * 64.0
}

/// The matrix of squared frame overlaps between two MORIs; doubly
/// stochastic with entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl OverlapMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Squared Frobenius norm; lands in `[1, d]` for overlap matrices.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum()
    }

    /// Max deviation of any row or column sum from 1.
    pub fn stochasticity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..d {
            let row: f64 = (0..d).map(|j| self.get(i, j)).sum();
            let col: f64 = (0..d).map(|j| self.get(j, i)).sum();
            dev = dev.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        dev
    }

    pub fn is_doubly_stochastic(&self, tol: &Tolerance) -> bool {
        self.stochasticity_deviation() <= tol.structural
            && self
                .entries
                .iter()
                .all(|&x| (-tol.structural..=1.0 + tol.structural).contains(&x))
    }

    /// View as a complex matrix, for the singular-value machinery.
    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.dim, |i, j| {
            crate::linalg::Complex64::new(self.get(i, j), 0.0)
        })
    }
}

/// Overlap matrix `O_ij = |<i|j~>|^2` between the frames of two MORIs.
pub fn overlap_matrix(a: &Mori, b: &Mori) -> Result<OverlapMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let d = a.dim();
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            entries.push(a.vector_overlap(b, i, j));
        }
    }
    Ok(OverlapMatrix { dim: d, entries })
}

/// The overlap matrix between `basis` and its image under `U`:
/// entries `|<i|U|j>|^2`.
pub fn x_matrix(u: &ComplexMatrix, basis: &Mori, tol: &Tolerance) -> Result<OverlapMatrix> {
    overlap_matrix(basis, &basis.rotated(u, tol)?)
}

/// Hilbert–Schmidt distance between the MASAs of two MORIs, closed form:
/// `sqrt(2 (d - ||O||_2^2))`. Symmetric, zero exactly when the MORIs
/// generate the same MASA.
pub fn masa_distance(a: &Mori, b: &Mori) -> Result<f64> {
    let overlap = overlap_matrix(a, b)?;
    let gap = 2.0 * (a.dim() as f64 - overlap.frobenius_norm_sq());
    // round-off can leave a residue of either sign for equal MASAs
    if gap < DISTANCE_SQ_FLOOR {
        return Ok(0.0);
    }
    Ok(gap.sqrt())
}

/// The same distance through the superoperator route: Frobenius norm of
/// the difference of the two dephasing matrices. Capped in dimension.
pub fn masa_distance_superop(a: &Mori, b: &Mori) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let ma = Superoperator::of_dephasing(a)?;
    let mb = Superoperator::of_dephasing(b)?;
    Ok(crate::linalg::hs_norm(&ma.matrix().sub(mb.matrix())?))
}

/// The same distance through the commutator route:
/// `sqrt(sum_ij ||[P_i, Q_j]||_2^2)`.
pub fn masa_distance_commutator(a: &Mori, b: &Mori) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let pa = a.projectors();
    let pb = b.projectors();
    let mut total = 0.0;
    for p in &pa {
        for q in &pb {
            total += hs_norm_sq(&commutator(p, q)?);
        }
    }
    Ok(total.sqrt())
}

/// `|det O|` computed through singular values in log space, exactly zero
/// when the matrix is rank deficient. Results within round-off of 1 snap
/// to exactly 1 (same floor as the closed-form distance), the rest is
/// clamped into [0, 1]; values beyond `1 + 1e-8` raise a diagnostic error.
pub fn abs_det_overlap(overlap: &OverlapMatrix) -> Result<f64> {
    let svals = singular_values(&overlap.to_complex())?;
    let det = exp_log_det(&svals, overlap.dim());
    if det > 1.0 + 1e-8 {
        return Err(Error::DetAboveOne { det });
    }
    if det > 1.0 - DISTANCE_SQ_FLOOR {
        return Ok(1.0);
    }
    Ok(det)
}

fn exp_log_det(svals: &[f64], dim: usize) -> f64 {
    let s_max = svals.first().copied().unwrap_or(0.0);
    let cutoff = rank_cutoff(dim, s_max);
    let mut log_sum = 0.0;
    for &s in svals {
        if s <= cutoff {
            return 0.0;
        }
        log_sum += s.ln();
    }
    log_sum.exp()
}

/// Projective pull-back distance between two MASAs:
/// `arccos(|det O|)`, in `[0, pi/2]`; zero exactly for equal MASAs.
pub fn dfs_distance(a: &Mori, b: &Mori) -> Result<f64> {
    let det = abs_det_overlap(&overlap_matrix(a, b)?)?;
    Ok(det.clamp(0.0, 1.0).acos())
}

/// Generating-power measure based on the pull-back distance:
/// the distance between the MASA of `basis` and its image under `U`.
pub fn cgp_tilde(u: &ComplexMatrix, basis: &Mori, tol: &Tolerance) -> Result<f64> {
    dfs_distance(basis, &basis.rotated(u, tol)?)
}

/// Additive generating-power measure
/// `-(1/d) ln |det X(U)|`, `+infinity` when the overlap matrix of `U` is
/// singular; zero exactly for incoherent unitaries.
pub fn phi_measure(u: &ComplexMatrix, basis: &Mori, tol: &Tolerance) -> Result<f64> {
    let x = x_matrix(u, basis, tol)?;
    let svals = singular_values(&x.to_complex())?;
    let s_max = svals.first().copied().unwrap_or(0.0);
    let cutoff = rank_cutoff(x.dim(), s_max);
    let mut log_sum = 0.0;
    for &s in &svals {
        if s <= cutoff {
            return Ok(f64::INFINITY);
        }
        log_sum += s.ln();
    }
    // round-off floor: incoherent unitaries give log-determinants at
    // machine scale, not exactly zero
    if log_sum > -DISTANCE_SQ_FLOOR {
        return Ok(0.0);
    }
    Ok(-log_sum / x.dim() as f64)
}
