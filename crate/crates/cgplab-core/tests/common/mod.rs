//! Shared generators for the integration suites. Everything is seeded
//! ChaCha so every run exercises the same inputs.
// each test binary compiles its own copy and uses a subset
#![allow(dead_code)]

use cgplab_core::cgp::haar_unitary;
use cgplab_core::linalg::{Complex64, ComplexMatrix, Tolerance};
use cgplab_core::mori::Mori;
use cgplab_core::qubit::BlochVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_mori(dim: usize, seed: u64) -> Mori {
    Mori::from_frame(haar_unitary(dim, seed), &Tolerance::default()).unwrap()
}

/// Random density matrix from a normalized Ginibre square.
pub fn random_density(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let gg = g.mul(&g.adjoint()).unwrap();
    gg.scale(c(1.0 / gg.trace().re, 0.0))
}

pub fn random_bloch(rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        let v = [
            rng.random_range(-1.0..1.0f64),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if norm_sq > 1e-3 && norm_sq <= 1.0 {
            let norm = norm_sq.sqrt();
            return BlochVector::new(v[0] / norm, v[1] / norm, v[2] / norm).unwrap();
        }
    }
}

/// Random permutation matrix times diagonal phases: the generic incoherent
/// unitary.
pub fn random_incoherent_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut perm: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let phases: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    ComplexMatrix::from_fn(
        dim,
        dim,
        |i, j| {
            if perm[j] == i {
                phases[j]
            } else {
                c(0.0, 0.0)
            }
        },
    )
}

/// Permute and rephase the frame of a MORI: same MASA, different frame.
pub fn shuffled_copy(basis: &Mori, rng: &mut ChaCha8Rng) -> Mori {
    let d = basis.dim();
    let mut perm: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let phases: Vec<Complex64> = (0..d)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let frame = ComplexMatrix::from_fn(d, d, |i, j| basis.frame().get(i, perm[j]) * phases[j]);
    Mori::from_frame(frame, &Tolerance::default()).unwrap()
}
