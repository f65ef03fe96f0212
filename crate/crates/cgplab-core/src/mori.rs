//! Maximal orthogonal resolutions of the identity (MORIs).
//!
//! A MORI is a family of d rank-one orthogonal projectors summing to the
//! identity, stored here through an orthonormal frame (a unitary whose
//! column i is the i-th basis vector). Two frames describe the same MASA
//! exactly when they differ by column permutations and per-column phases,
//! so comparison goes through either a canonical representative of that
//! equivalence class or a direct projector matching.

use crate::linalg::{kron, unitarity_deviation, Complex64, ComplexMatrix, Tolerance};
use crate::{Error, Result};

/// A maximal orthogonal resolution of the identity, identified with the
/// MASA of operators diagonal in its frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Mori {
    dim: usize,
    frame: ComplexMatrix,
}

impl Mori {
    /// Build from an orthonormal frame. The frame must pass
    /// `validate_unitary` at `tol.structural`.
    pub fn from_frame(frame: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !frame.is_square() {
            return Err(Error::NotSquare {
                rows: frame.rows(),
                cols: frame.cols(),
            });
        }
        let deviation = unitarity_deviation(&frame);
        if deviation > tol.structural {
            return Err(Error::NotUnitary {
                deviation,
                tol: tol.structural,
            });
        }
        Ok(Mori {
            dim: frame.rows(),
            frame,
        })
    }

    /// Construct without re-validating; for internal use where unitarity
    /// is guaranteed by construction (products of validated unitaries,
    /// eigenframes, phase/permutation rearrangements).
    fn from_frame_unchecked(frame: ComplexMatrix) -> Self {
        Mori {
            dim: frame.rows(),
            frame,
        }
    }

    /// The MORI of eigenvectors of a Hermitian matrix, ordered by ascending
    /// eigenvalue. Fails with a degeneracy error when any eigenvalue gap is
    /// `<= gap_tol`: the associated MASA is then ill-defined under
    /// perturbations.
    pub fn from_hermitian(h: &ComplexMatrix, gap_tol: f64, tol: &Tolerance) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::NotSquare {
                rows: h.rows(),
                cols: h.cols(),
            });
        }
        let deviation = h.hermiticity_deviation();
        if deviation > tol.structural {
            return Err(Error::NotHermitian {
                deviation,
                tol: tol.structural,
            });
        }
        let (evals, evecs) = crate::linalg::eigh(h)?;
        for w in evals.windows(2) {
            let gap = w[1] - w[0];
            if gap <= gap_tol {
                return Err(Error::DegenerateSpectrum { gap, gap_tol });
            }
        }
        Ok(Mori::from_frame_unchecked(evecs))
    }

    /// The computational-basis MORI (identity frame).
    pub fn computational(dim: usize) -> Self {
        Mori::from_frame_unchecked(ComplexMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    /// Basis vector `i` (column `i` of the frame).
    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.frame.column(i)
    }

    /// Rank-one projector onto basis vector `i`.
    pub fn projector(&self, i: usize) -> ComplexMatrix {
        let v = self.vector(i);
        ComplexMatrix::from_fn(self.dim, self.dim, |r, c| v[r] * v[c].conj())
    }

    /// All d projectors in frame order.
    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.dim).map(|i| self.projector(i)).collect()
    }

    /// `<i| X |i>` for basis vector `i`; the diagonal of `X` in this frame.
    pub fn expectation(&self, i: usize, x: &ComplexMatrix) -> Complex64 {
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..d {
            let mut row = Complex64::new(0.0, 0.0);
            for c in 0..d {
                row += x.get(r, c) * self.frame.get(c, i);
            }
            acc += self.frame.get(r, i).conj() * row;
        }
        acc
    }

    /// Canonical representative of the permutation/phase equivalence class.
    ///
    /// Each column is rephased so its first component of magnitude above
    /// `tol.structural` becomes real positive, then the columns are sorted
    /// lexicographically by their (re, im) entry sequences. Two MORIs
    /// generating the same MASA canonicalize to frames equal within
    /// round-off; the map is exactly idempotent.
    pub fn canonical_form(&self, tol: &Tolerance) -> Mori {
        let d = self.dim;
        let mut columns: Vec<Vec<Complex64>> = (0..d).map(|j| self.vector(j)).collect();
        for col in &mut columns {
            let pivot_idx = col
                .iter()
                .position(|z| z.norm() > tol.structural)
                .unwrap_or(0);
            let pivot = col[pivot_idx];
            // Already canonical pivots are left untouched so a second pass
            // is an exact no-op.
            if !(pivot.im == 0.0 && pivot.re > 0.0) {
                let r = pivot.norm();
                let phase = Complex64::new(pivot.re / r, -pivot.im / r);
                for z in col.iter_mut() {
                    *z *= phase;
                }
                // the rephased pivot is |pivot| by construction; write it
                // exactly so the imaginary part carries no cross-term
                // residue
                col[pivot_idx] = Complex64::new(r, 0.0);
            }
            for z in col.iter_mut() {
                // fold -0.0 into +0.0 so ordering is stable
                *z = Complex64::new(z.re + 0.0, z.im + 0.0);
            }
        }
        // descending lexicographic order, so the computational frame is a
        // fixed point of canonicalization
        columns.sort_by(|a, b| {
            for (x, y) in a.iter().zip(b.iter()) {
                match y.re.total_cmp(&x.re) {
                    std::cmp::Ordering::Equal => {}
                    other => return other,
                }
                match y.im.total_cmp(&x.im) {
                    std::cmp::Ordering::Equal => {}
                    other => return other,
                }
            }
            std::cmp::Ordering::Equal
        });
        let frame = ComplexMatrix::from_fn(d, d, |i, j| columns[j][i]);
        Mori::from_frame_unchecked(frame)
    }

    /// True iff the two MORIs generate the same MASA: some permutation
    /// matches every projector within `tol` in Hilbert–Schmidt norm.
    ///
    /// The overlap matrix between two MORIs is doubly stochastic, so greedy
    /// matching on the largest overlap per row suffices; the candidate pair
    /// is then held to `||P_i - Q_j|| <= tol` on the actual projector
    /// difference.
    pub fn equal_as_masa(&self, other: &Mori, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let d = self.dim;
        let mut used = vec![false; d];
        for i in 0..d {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..d {
                if used[j] {
                    continue;
                }
                let overlap = self.vector_overlap(other, i, j);
                if best.is_none_or(|(_, b)| overlap > b) {
                    best = Some((j, overlap));
                }
            }
            match best {
                Some((j, _)) => {
                    let diff = self
                        .projector(i)
                        .sub(&other.projector(j))
                        .expect("projectors share dimensions");
                    if crate::linalg::hs_norm(&diff) > tol {
                        return false;
                    }
                    used[j] = true;
                }
                None => return false,
            }
        }
        true
    }

    /// Squared overlap `|<i|j~>|^2` between basis vector `i` of `self` and
    /// `j` of `other`.
    pub fn vector_overlap(&self, other: &Mori, i: usize, j: usize) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.dim {
            acc += self.frame.get(k, i).conj() * other.frame.get(k, j);
        }
        acc.norm_sqr()
    }

    /// Product MORI on the tensor-product space, with projectors
    /// `P_i (x) Q_j` ordered row-major in `(i, j)`.
    pub fn product(&self, other: &Mori) -> Mori {
        Mori::from_frame_unchecked(kron(&self.frame, &other.frame))
    }

    /// The MORI with frame `U * frame`, i.e. projectors `U P_i U†`.
    pub fn rotated(&self, u: &ComplexMatrix, tol: &Tolerance) -> Result<Mori> {
        if u.rows() != self.dim || u.cols() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: u.rows(),
            });
        }
        let deviation = unitarity_deviation(u);
        if deviation > tol.structural {
            return Err(Error::NotUnitary {
                deviation,
                tol: tol.structural,
            });
        }
        Ok(Mori::from_frame_unchecked(u.mul(&self.frame)?))
    }
}

/// Maximum entry-wise deviation between two frames, used by tests to
/// compare canonical forms.
pub fn frame_deviation(a: &Mori, b: &Mori) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            dev = dev.max((a.frame().get(i, j) - b.frame().get(i, j)).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgp::haar_unitary;
    use crate::linalg::hs_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hadamard() -> ComplexMatrix {
        let h = 1.0 / 2.0f64.sqrt();
        ComplexMatrix::from_rows(vec![
            vec![c(h, 0.0), c(h, 0.0)],
            vec![c(h, 0.0), c(-h, 0.0)],
        ])
        .unwrap()
    }

    fn dft(d: usize) -> ComplexMatrix {
        let norm = 1.0 / (d as f64).sqrt();
        ComplexMatrix::from_fn(d, d, |j, k| {
            let arg = 2.0 * std::f64::consts::PI * ((j * k) % d) as f64 / d as f64;
            Complex64::from_polar(norm, arg)
        })
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap()
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn from_frame_identity_gives_computational_projectors() {
        let tol = Tolerance::default();
        let b = Mori::from_frame(ComplexMatrix::identity(2), &tol).unwrap();
        let p0 = b.projector(0);
        assert!((p0.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(p0.get(1, 1).norm() < 1e-15);
        let p1 = b.projector(1);
        assert!((p1.get(1, 1) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn from_frame_hadamard_projectors() {
        let tol = Tolerance::default();
        let b = Mori::from_frame(hadamard(), &tol).unwrap();
        // (I + sigma_x)/2 and (I - sigma_x)/2
        for (i, sign) in [(0usize, 1.0), (1usize, -1.0)] {
            let expected = ComplexMatrix::identity(2)
                .add(&pauli_x().scale(c(sign, 0.0)))
                .unwrap()
                .scale(c(0.5, 0.0));
            assert!(hs_norm(&b.projector(i).sub(&expected).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn from_frame_rejects_non_unitary() {
        let tol = Tolerance::default();
        let mut m = ComplexMatrix::identity(2);
        m.set(0, 1, c(0.1, 0.0));
        assert!(matches!(
            Mori::from_frame(m, &tol),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn dft_overlaps_with_computational_are_flat() {
        let tol = Tolerance::default();
        let b = Mori::computational(3);
        let f = Mori::from_frame(dft(3), &tol).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((b.vector_overlap(&f, i, j) - 1.0 / 3.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn projectors_resolve_identity() {
        let tol = Tolerance::default();
        let b = Mori::from_frame(haar_unitary(4, 17), &tol).unwrap();
        let mut sum = ComplexMatrix::zeros(4, 4);
        for p in b.projectors() {
            sum = sum.add(&p).unwrap();
            // idempotent, hermitian, trace one
            assert!(hs_norm(&p.mul(&p).unwrap().sub(&p).unwrap()) < 1e-13);
            assert!(p.hermiticity_deviation() < 1e-14);
            assert!((p.trace().re - 1.0).abs() < 1e-13);
        }
        assert!(hs_norm(&sum.sub(&ComplexMatrix::identity(4)).unwrap()) < 1e-13);
    }

    #[test]
    fn from_hermitian_pauli_z_orders_by_ascending_eigenvalue() {
        let tol = Tolerance::default();
        let b = Mori::from_hermitian(&pauli_z(), 1e-6, &tol).unwrap();
        // eigenvalue -1 first: |1>
        assert!(b.frame().get(1, 0).norm() > 0.99);
        assert!(b.frame().get(0, 1).norm() > 0.99);
    }

    #[test]
    fn from_hermitian_pauli_x_gives_hadamard_masa() {
        let tol = Tolerance::default();
        let b = Mori::from_hermitian(&pauli_x(), 1e-6, &tol).unwrap();
        let h = Mori::from_frame(hadamard(), &tol).unwrap();
        assert!(b.equal_as_masa(&h, 1e-10));
    }

    #[test]
    fn from_hermitian_rejects_degenerate() {
        let tol = Tolerance::default();
        assert!(matches!(
            Mori::from_hermitian(&ComplexMatrix::identity(2), 1e-6, &tol),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn from_hermitian_monotone_function_same_masa() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..5 {
            let d = 4;
            let g = ComplexMatrix::from_fn(d, d, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let h = g.add(&g.adjoint()).unwrap().scale(c(0.5, 0.0));
            let b = Mori::from_hermitian(&h, 1e-8, &tol).unwrap();
            // strictly increasing affine map
            let scaled = h
                .scale(c(2.0, 0.0))
                .add(&ComplexMatrix::identity(d).scale(c(3.0, 0.0)))
                .unwrap();
            let b2 = Mori::from_hermitian(&scaled, 1e-8, &tol).unwrap();
            assert!(b.equal_as_masa(&b2, 1e-10));
            // strictly decreasing map reverses the order, same MASA
            let negated = h.scale(c(-1.0, 0.0));
            let b3 = Mori::from_hermitian(&negated, 1e-8, &tol).unwrap();
            assert!(b.equal_as_masa(&b3, 1e-10));
        }
    }

    #[test]
    fn canonical_form_quotients_phase_and_permutation() {
        let tol = Tolerance::default();
        // computational basis with columns swapped and multiplied by i
        let frame = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let b = Mori::from_frame(frame, &tol).unwrap();
        let canon = b.canonical_form(&tol);
        assert!(frame_deviation(&canon, &Mori::computational(2)) < 1e-15);
    }

    #[test]
    fn canonical_form_idempotent_exactly() {
        let tol = Tolerance::default();
        for seed in 0..6u64 {
            let b = Mori::from_frame(haar_unitary(4, 700 + seed), &tol).unwrap();
            let once = b.canonical_form(&tol);
            let twice = once.canonical_form(&tol);
            assert_eq!(once.frame(), twice.frame());
        }
    }

    #[test]
    fn canonical_form_randomized_round_trip() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for seed in 0..10u64 {
            let d = 4;
            let b = Mori::from_frame(haar_unitary(d, 800 + seed), &tol).unwrap();
            // random permutation + random phases applied to the frame
            let mut perm: Vec<usize> = (0..d).collect();
            for i in (1..d).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            let phases: Vec<Complex64> = (0..d)
                .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
                .collect();
            let shuffled =
                ComplexMatrix::from_fn(d, d, |i, j| b.frame().get(i, perm[j]) * phases[j]);
            let b2 = Mori::from_frame(shuffled, &tol).unwrap();
            let dev = frame_deviation(&b.canonical_form(&tol), &b2.canonical_form(&tol));
            assert!(dev < 1e-10, "deviation {dev}");
        }
    }

    #[test]
    fn equal_as_masa_cases() {
        let tol = Tolerance::default();
        let b = Mori::from_frame(haar_unitary(3, 23), &tol).unwrap();
        // phase-shuffled permutation of itself
        let shuffled = ComplexMatrix::from_fn(3, 3, |i, j| {
            let perm = [2usize, 0, 1];
            b.frame().get(i, perm[j]) * Complex64::from_polar(1.0, 0.7 * (j as f64 + 1.0))
        });
        let b2 = Mori::from_frame(shuffled, &tol).unwrap();
        assert!(b.equal_as_masa(&b2, 1e-10));

        let comp = Mori::computational(2);
        let had = Mori::from_frame(hadamard(), &tol).unwrap();
        assert!(!comp.equal_as_masa(&had, 1e-10));
    }

    #[test]
    fn equal_as_masa_diagonal_rotation_is_incoherent() {
        let tol = Tolerance::default();
        let diag = ComplexMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, 0.3 + i as f64)
            } else {
                c(0.0, 0.0)
            }
        });
        // a diagonal unitary fixes the computational MASA
        let comp = Mori::computational(4);
        assert!(comp.equal_as_masa(&comp.rotated(&diag, &tol).unwrap(), 1e-12));
        // and its conjugate into any frame fixes that frame's MASA
        let b = Mori::from_frame(haar_unitary(4, 31), &tol).unwrap();
        let u = b
            .frame()
            .mul(&diag)
            .unwrap()
            .mul(&b.frame().adjoint())
            .unwrap();
        let rotated = b.rotated(&u, &tol).unwrap();
        assert!(b.equal_as_masa(&rotated, 1e-9));
    }

    #[test]
    fn product_of_computational_bases() {
        let tol = Tolerance::default();
        let c2 = Mori::computational(2);
        let c4 = c2.product(&c2);
        assert_eq!(c4.dim(), 4);
        assert!(frame_deviation(&c4, &Mori::computational(4)) < 1e-15);
        let h = Mori::from_frame(hadamard(), &tol).unwrap();
        let hi = h.product(&c2);
        let expected = kron(&hadamard(), &ComplexMatrix::identity(2));
        assert!(hs_norm(&hi.frame().sub(&expected).unwrap()) < 1e-15);
    }

    #[test]
    fn rotation_cases() {
        let tol = Tolerance::default();
        let b = Mori::from_frame(haar_unitary(3, 47), &tol).unwrap();
        let rotated = b.rotated(&ComplexMatrix::identity(3), &tol).unwrap();
        assert!(frame_deviation(&b, &rotated) < 1e-15);

        let comp = Mori::computational(2);
        let had_basis = comp.rotated(&hadamard(), &tol).unwrap();
        assert!(hs_norm(&had_basis.frame().sub(&hadamard()).unwrap()) < 1e-15);

        let u = haar_unitary(3, 53);
        let round_trip = b
            .rotated(&u, &tol)
            .unwrap()
            .rotated(&u.adjoint(), &tol)
            .unwrap();
        assert!(b.equal_as_masa(&round_trip, 1e-10));
    }

    #[test]
    fn equal_as_masa_iff_canonical_forms_match() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5150);
        for trial in 0..20u64 {
            let d = 2 + (trial as usize % 5);
            let a = Mori::from_frame(haar_unitary(d, 900 + trial), &tol).unwrap();
            let same = rng.random_bool(0.5);
            let b = if same {
                // permute and rephase
                let mut perm: Vec<usize> = (0..d).collect();
                for i in (1..d).rev() {
                    let j = rng.random_range(0..=i);
                    perm.swap(i, j);
                }
                let phases: Vec<Complex64> = (0..d)
                    .map(|_| {
                        Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
                    })
                    .collect();
                let frame =
                    ComplexMatrix::from_fn(d, d, |i, j| a.frame().get(i, perm[j]) * phases[j]);
                Mori::from_frame(frame, &tol).unwrap()
            } else {
                Mori::from_frame(haar_unitary(d, 10_000 + trial), &tol).unwrap()
            };
            let masa_eq = a.equal_as_masa(&b, 1e-8);
            let canon_eq = frame_deviation(&a.canonical_form(&tol), &b.canonical_form(&tol)) < 1e-8;
            assert_eq!(masa_eq, canon_eq, "d={d} same={same}");
            assert_eq!(masa_eq, same);
        }
    }
}
