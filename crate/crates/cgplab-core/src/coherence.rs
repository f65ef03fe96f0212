//! State-level coherence with respect to a MORI.
//!
//! The measure is the squared Hilbert–Schmidt distance from the state to
//! the MASA, i.e. the squared norm of the off-diagonal part. The
//! commutator form is kept as a deliberately separate evaluation route;
//! the agreement of the two is part of the test surface, not an
//! optimization.

use crate::channel::q_project;
use crate::linalg::{commutator, hs_norm_sq, validate_density, ComplexMatrix, Tolerance};
use crate::mori::Mori;
use crate::{Error, Result};

/// Coherence of a quantum state with respect to `basis`:
/// `|| Q_B(rho) ||_2^2`. Lives in `[0, 1 - 1/d]` for valid states.
pub fn coherence(rho: &ComplexMatrix, basis: &Mori, tol: &Tolerance) -> Result<f64> {
    if !validate_density(rho, tol) {
        return Err(Error::NotDensity {
            reason: "input failed the density-matrix validator".into(),
        });
    }
    coherence_raw(rho, basis)
}

/// The same squared off-diagonal norm for an arbitrary operator, without
/// the state validation; used on projectors and other non-state inputs.
pub fn coherence_raw(x: &ComplexMatrix, basis: &Mori) -> Result<f64> {
    Ok(hs_norm_sq(&q_project(basis, x)?))
}

/// Coherence evaluated through the commutator sum
/// `1/2 sum_j ||[P_j, rho]||_2^2`; agrees with [`coherence`] to near
/// machine precision and serves as its independent oracle.
pub fn coherence_commutator(rho: &ComplexMatrix, basis: &Mori, tol: &Tolerance) -> Result<f64> {
    if !validate_density(rho, tol) {
        return Err(Error::NotDensity {
            reason: "input failed the density-matrix validator".into(),
        });
    }
    if rho.rows() != basis.dim() {
        return Err(Error::DimMismatch {
            expected: basis.dim(),
            got: rho.rows(),
        });
    }
    let mut total = 0.0;
    for j in 0..basis.dim() {
        let comm = commutator(&basis.projector(j), rho)?;
        total += hs_norm_sq(&comm);
    }
    Ok(0.5 * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgp::haar_unitary;
    use crate::channel::{dephase, is_incoherent, KrausChannel};
    use crate::linalg::{hs_norm, Complex64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_density(d: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(d, d, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let gg = g.mul(&g.adjoint()).unwrap();
        gg.scale(c(1.0 / gg.trace().re, 0.0))
    }

    fn plus_state() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |_, _| c(0.5, 0.0))
    }

    #[test]
    fn diagonal_states_have_zero_coherence() {
        let tol = Tolerance::default();
        let b = Mori::computational(3);
        let rho = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c([0.5, 0.3, 0.2][i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!(coherence(&rho, &b, &tol).unwrap() < 1e-15);
        assert!(coherence_commutator(&rho, &b, &tol).unwrap() < 1e-15);
    }

    #[test]
    fn plus_state_coherence_is_half() {
        let tol = Tolerance::default();
        let b = Mori::computational(2);
        assert!((coherence(&plus_state(), &b, &tol).unwrap() - 0.5).abs() < 1e-14);
        assert!((coherence_commutator(&plus_state(), &b, &tol).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_state_is_incoherent_in_every_basis() {
        let tol = Tolerance::default();
        let rho = ComplexMatrix::identity(4).scale(c(0.25, 0.0));
        for seed in 0..4u64 {
            let b = Mori::from_frame(haar_unitary(4, seed), &tol).unwrap();
            assert!(coherence(&rho, &b, &tol).unwrap() < 1e-13);
        }
    }

    #[test]
    fn rejects_non_states() {
        let tol = Tolerance::default();
        let b = Mori::computational(2);
        let sigma_x = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            coherence(&sigma_x, &b, &tol),
            Err(Error::NotDensity { .. })
        ));
    }

    #[test]
    fn commutator_route_agrees_with_definition() {
        let tol = Tolerance::default();
        let b = Mori::from_frame(haar_unitary(5, 7), &tol).unwrap();
        let rho = random_density(5, 8);
        let a = coherence(&rho, &b, &tol).unwrap();
        let b_val = coherence_commutator(&rho, &b, &tol).unwrap();
        assert!((a - b_val).abs() < 1e-12);
    }

    #[test]
    fn zero_coherence_iff_dephasing_fixed_point() {
        let tol = Tolerance::default();
        for seed in 0..6u64 {
            let d = 3;
            let b = Mori::from_frame(haar_unitary(d, 20 + seed), &tol).unwrap();
            let rho = random_density(d, 30 + seed);
            let dephased = dephase(&b, &rho).unwrap();
            // dephased states are exactly incoherent
            assert!(coherence(&dephased, &b, &tol).unwrap() < 1e-13);
            // generic states are not, and their coherence equals the
            // distance to their dephased version
            let cval = coherence(&rho, &b, &tol).unwrap();
            let dist_sq = hs_norm(&rho.sub(&dephased).unwrap()).powi(2);
            assert!((cval - dist_sq).abs() < 1e-13);
        }
    }

    #[test]
    fn monotone_under_incoherent_unital_channels() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for trial in 0..8u64 {
            let d = 2 + (trial as usize % 3);
            let b = Mori::from_frame(haar_unitary(d, 50 + trial), &tol).unwrap();
            // mixture of the dephasing with a basis-diagonal unitary:
            // incoherent and unital
            let lambda: f64 = rng.random_range(0.1..0.9);
            let diag = ComplexMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    Complex64::from_polar(1.0, 1.1 * i as f64)
                } else {
                    c(0.0, 0.0)
                }
            });
            let u = b
                .frame()
                .mul(&diag)
                .unwrap()
                .mul(&b.frame().adjoint())
                .unwrap();
            let mut kraus: Vec<ComplexMatrix> = KrausChannel::dephasing(&b)
                .kraus()
                .iter()
                .map(|k| k.scale(c(lambda.sqrt(), 0.0)))
                .collect();
            kraus.push(u.scale(c((1.0 - lambda).sqrt(), 0.0)));
            let t = KrausChannel::new(kraus).unwrap();
            assert!(t.is_unital(&tol));
            assert!(is_incoherent(&t, &b, &tol).unwrap());
            let rho = random_density(d, 60 + trial);
            let before = coherence(&rho, &b, &tol).unwrap();
            let after = coherence(&t.apply(&rho).unwrap(), &b, &tol).unwrap();
            assert!(after <= before + 1e-10, "after={after} before={before}");
        }
    }

    #[test]
    fn coherence_bounded_by_one_minus_inverse_dim() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        for d in 2..=4usize {
            let b = Mori::computational(d);
            let bound = 1.0 - 1.0 / d as f64;
            for _ in 0..200 {
                // random pure state
                let v: Vec<Complex64> = (0..d)
                    .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let rho =
                    ComplexMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj() / c(norm * norm, 0.0));
                let cval = coherence(&rho, &b, &tol).unwrap();
                assert!(cval <= bound + 1e-10);
            }
            // the uniform superposition attains the bound
            let amp = 1.0 / (d as f64).sqrt();
            let uniform = ComplexMatrix::from_fn(d, d, |_, _| c(amp * amp, 0.0));
            let cval = coherence(&uniform, &b, &tol).unwrap();
            assert!((cval - bound).abs() < 1e-10);
        }
    }
}
