//! Unital CP maps in Kraus form, the dephasing projection onto a MASA and
//! its complement, superoperator matrices and the incoherence test.
//!
//! Operators on the d-dimensional Hilbert space are vectorized
//! column-major; under that convention the map `X -> A X B` has
//! superoperator matrix `transpose(B) (x) A`, so a unitary conjugation
//! becomes `conj(U) (x) U`. The convention is fixed crate-wide.

use crate::linalg::{hs_norm, kron, unitarity_deviation, Complex64, ComplexMatrix, Tolerance};
use crate::mori::Mori;
use crate::{Error, Result};

/// Default dimension cap for superoperator-matrix construction; a d = 8
/// problem already means 64x64 superoperators, ample for desk-scale
/// cross-checks while staying instant.
pub const SUPEROP_DIM_CAP: usize = 8;

/// A completely positive map given by a list of Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Build from a non-empty list of equal-dimension square Kraus
    /// operators. Unitality and trace preservation are properties checked
    /// on demand, not requirements.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidChannel {
            reason: "empty Kraus list".into(),
        })?;
        if !first.is_square() {
            return Err(Error::NotSquare {
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        let dim = first.rows();
        for k in &kraus {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::InvalidChannel {
                    reason: format!(
                        "Kraus operators must all be {dim}x{dim}, got {}x{}",
                        k.rows(),
                        k.cols()
                    ),
                });
            }
        }
        Ok(KrausChannel { dim, kraus })
    }

    /// The identity channel on dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        KrausChannel {
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// The unitary channel `X -> U X U†`.
    pub fn unitary(u: &ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::NotSquare {
                rows: u.rows(),
                cols: u.cols(),
            });
        }
        let deviation = unitarity_deviation(u);
        if deviation > tol.structural {
            return Err(Error::NotUnitary {
                deviation,
                tol: tol.structural,
            });
        }
        Ok(KrausChannel {
            dim: u.rows(),
            kraus: vec![u.clone()],
        })
    }

    /// The dephasing channel of a MORI, with the projectors as Kraus
    /// operators; unital and trace preserving by construction.
    pub fn dephasing(basis: &Mori) -> Self {
        KrausChannel {
            dim: basis.dim(),
            kraus: basis.projectors(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// True iff `sum_a K_a K_a† = I` within `tol.structural`.
    pub fn is_unital(&self, tol: &Tolerance) -> bool {
        self.deviation_from(|k| k.mul(&k.adjoint()).unwrap()) <= tol.structural
    }

    /// True iff `sum_a K_a† K_a = I` within `tol.structural`.
    pub fn is_trace_preserving(&self, tol: &Tolerance) -> bool {
        self.deviation_from(|k| k.adjoint().mul(k).unwrap()) <= tol.structural
    }

    fn deviation_from(&self, term: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            sum = sum.add(&term(k)).unwrap();
        }
        hs_norm(&sum.sub(&ComplexMatrix::identity(self.dim)).unwrap())
    }

    /// Apply the channel: `sum_a K_a X K_a†`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: x.rows(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = out.add(&k.mul(x)?.mul(&k.adjoint())?)?;
        }
        Ok(out)
    }
}

/// Dephasing projection of `X` onto the MASA of `basis`:
/// `sum_j P_j X P_j`, evaluated through the rank-one structure
/// `P_j X P_j = <j|X|j> P_j`.
pub fn dephase(basis: &Mori, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = basis.dim();
    if x.rows() != d || x.cols() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: x.rows(),
        });
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let weight = basis.expectation(j, x);
        out = out.add(&basis.projector(j).scale(weight))?;
    }
    Ok(out)
}

/// Complementary projection `X - dephase(basis, X)`; kills everything
/// diagonal in the basis and is orthogonal to the dephased part.
pub fn q_project(basis: &Mori, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.sub(&dephase(basis, x)?)
}

/// A linear map on operators represented as a d^2 x d^2 matrix acting on
/// column-major vectorizations.
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    /// Superoperator matrix of a Kraus channel:
    /// `sum_a conj(K_a) (x) K_a`. Errors above the default dimension cap.
    pub fn of_channel(channel: &KrausChannel) -> Result<Self> {
        Self::of_channel_with_cap(channel, SUPEROP_DIM_CAP)
    }

    pub fn of_channel_with_cap(channel: &KrausChannel, cap: usize) -> Result<Self> {
        let d = channel.dim();
        if d > cap {
            return Err(Error::DimOverCap { dim: d, cap });
        }
        let mut matrix = ComplexMatrix::zeros(d * d, d * d);
        for k in channel.kraus() {
            matrix = matrix.add(&kron(&k.conj(), k))?;
        }
        Ok(Superoperator { dim: d, matrix })
    }

    /// Superoperator matrix of the dephasing projection of a MORI.
    pub fn of_dephasing(basis: &Mori) -> Result<Self> {
        Self::of_dephasing_with_cap(basis, SUPEROP_DIM_CAP)
    }

    pub fn of_dephasing_with_cap(basis: &Mori, cap: usize) -> Result<Self> {
        let d = basis.dim();
        if d > cap {
            return Err(Error::DimOverCap { dim: d, cap });
        }
        let mut matrix = ComplexMatrix::zeros(d * d, d * d);
        for p in basis.projectors() {
            matrix = matrix.add(&kron(&p.conj(), &p))?;
        }
        Ok(Superoperator { dim: d, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Apply through the matrix representation: unvec(M vec(X)).
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: x.rows(),
            });
        }
        let v = vec_column_major(x);
        let n = self.dim * self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (r, out_r) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..n {
                acc += self.matrix.get(r, c) * v[c];
            }
            *out_r = acc;
        }
        Ok(unvec_column_major(self.dim, &out))
    }
}

/// Column-major vectorization: `vec(X)[col*d + row] = X[row, col]`.
pub fn vec_column_major(x: &ComplexMatrix) -> Vec<Complex64> {
    let (r, c) = (x.rows(), x.cols());
    let mut v = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            v.push(x.get(i, j));
        }
    }
    v
}

/// Inverse of [`vec_column_major`] for square matrices.
pub fn unvec_column_major(dim: usize, v: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |i, j| v[j * dim + i])
}

/// Incoherence of a channel with respect to a MORI: the superoperator of
/// the channel commutes with the dephasing projection,
/// `||M_T M_D - M_D M_T|| <= tol.structural`.
pub fn is_incoherent(channel: &KrausChannel, basis: &Mori, tol: &Tolerance) -> Result<bool> {
    if channel.dim() != basis.dim() {
        return Err(Error::DimMismatch {
            expected: basis.dim(),
            got: channel.dim(),
        });
    }
    let mt = Superoperator::of_channel(channel)?;
    let md = Superoperator::of_dephasing(basis)?;
    let comm = crate::linalg::commutator(mt.matrix(), md.matrix())?;
    Ok(hs_norm(&comm) <= tol.structural)
}

/// The weaker dephasing-covariance diagnostic `D T D = T D`, which
/// coincides with [`is_incoherent`] for normal maps.
pub fn is_incoherent_weak(channel: &KrausChannel, basis: &Mori, tol: &Tolerance) -> Result<bool> {
    if channel.dim() != basis.dim() {
        return Err(Error::DimMismatch {
            expected: basis.dim(),
            got: channel.dim(),
        });
    }
    let mt = Superoperator::of_channel(channel)?;
    let md = Superoperator::of_dephasing(basis)?;
    let td = mt.matrix().mul(md.matrix())?;
    let dtd = md.matrix().mul(&td)?;
    Ok(hs_norm(&dtd.sub(&td)?) <= tol.structural)
}
