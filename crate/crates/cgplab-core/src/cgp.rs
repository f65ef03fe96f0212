//! Coherence generating power of unital maps.
//!
//! The closed form averages the coherence a map creates from uniformly
//! random basis-diagonal states; the Monte-Carlo estimator samples that
//! ensemble directly and is the statistical cross-check of the closed
//! form. Haar and Fourier unitaries round out the module as the standard
//! test-input generators.

use crate::channel::{q_project, KrausChannel};
use crate::linalg::{hs_inner, unitarity_deviation, Complex64, ComplexMatrix, Tolerance};
use crate::mori::Mori;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// Samples per RNG stream in [`estimate_cgp`]. Each batch owns the ChaCha
/// stream with its own index, and batch statistics are merged in index
/// order, so results are bit-identical for a fixed seed regardless of the
/// worker count.
const ESTIMATE_BATCH: usize = 4096;

/// The normalization `N_d = 1 / (d (d + 1))` relating the coherence
/// ensemble average to the closed-form sums.
pub fn cgp_normalization(dim: usize) -> f64 {
    1.0 / (dim as f64 * (dim as f64 + 1.0))
}

/// Monte-Carlo estimate of a coherence generating power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgpEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Coherence generating power of a Kraus channel with respect to `basis`:
/// `N_d sum_j ||Q_B T(P_j)||_2^2`.
///
/// The formula is derived for unital channels; it still evaluates for
/// non-unital Kraus lists, so callers that care should check
/// [`KrausChannel::is_unital`] and treat a failure as a warning.
pub fn cgp_unital(channel: &KrausChannel, basis: &Mori) -> Result<f64> {
    if channel.dim() != basis.dim() {
        return Err(Error::DimMismatch {
            expected: basis.dim(),
            got: channel.dim(),
        });
    }
    let mut total = 0.0;
    for j in 0..basis.dim() {
        let moved = channel.apply(&basis.projector(j))?;
        total += crate::linalg::hs_norm_sq(&q_project(basis, &moved)?);
    }
    Ok(cgp_normalization(basis.dim()) * total)
}

/// Coherence generating power of a unitary in closed form:
/// `N_d (d - sum_ij |<i|U|j>|^4)` with `<i|` running over the frame of
/// `basis`. Lives in `[0, (d-1)/(d(d+1))]`.
pub fn cgp_unitary(u: &ComplexMatrix, basis: &Mori, tol: &Tolerance) -> Result<f64> {
    let d = basis.dim();
    if u.rows() != d || u.cols() != d {
        return Err(Error::DimMismatch {
            expected: d,
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
    let v = basis.frame();
    let m = v.adjoint().mul(&u.mul(v)?)?;
    let mut fourth_powers = 0.0;
    for z in m.entries() {
        let sq = z.norm_sqr();
        fourth_powers += sq * sq;
    }
    // incoherent unitaries should read exactly zero, not round-off below it
    Ok((cgp_normalization(d) * (d as f64 - fourth_powers)).max(0.0))
}

/// Coherence generating power computed from the distance between the MASA
/// of `basis` and its image under `U`: `(N_d / 2) D^2`. Agrees with
/// [`cgp_unitary`] to near machine precision.
pub fn cgp_from_distance(u: &ComplexMatrix, basis: &Mori, tol: &Tolerance) -> Result<f64> {
    let rotated = basis.rotated(u, tol)?;
    let dist = crate::grassmann::masa_distance(basis, &rotated)?;
    Ok(0.5 * cgp_normalization(basis.dim()) * dist * dist)
}

/// A point drawn uniformly from the probability simplex, via normalized
/// unit-rate exponentials (the flat Dirichlet distribution).
pub fn sample_simplex_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut draws: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    for p in &mut draws {
        *p /= total;
    }
    draws
}

/// A state drawn uniformly from the basis-diagonal states:
/// `sum_j p_j P_j` with `p` uniform on the simplex.
pub fn sample_incoherent_state<R: Rng + ?Sized>(basis: &Mori, rng: &mut R) -> ComplexMatrix {
    let d = basis.dim();
    let p = sample_simplex_point(d, rng);
    let frame = basis.frame();
    ComplexMatrix::from_fn(d, d, |r, c| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..d {
            acc += frame.get(r, j) * frame.get(c, j).conj() * p[j];
        }
        acc
    })
}

/// Monte-Carlo estimate of the coherence generating power of `channel`
/// over `samples` uniform basis-diagonal states.
///
/// Each sampled state `rho = sum_j p_j P_j` maps linearly to
/// `Q_B T(rho) = sum_j p_j Y_j` with `Y_j = Q_B T(P_j)` precomputed, so the
/// per-sample coherence is the quadratic form `p^T G p` over the Gram
/// matrix `G_jk = <Y_j, Y_k>` — identical, sample by sample, to dephasing
/// the mapped state and taking the squared norm.
///
/// Sampling is split into fixed-size batches; batch `b` draws from the
/// ChaCha stream `b + 1` of `seed` and batch statistics merge in index
/// order, making the estimate reproducible bit for bit for a fixed seed,
/// independent of `workers`.
pub fn estimate_cgp(
    channel: &KrausChannel,
    basis: &Mori,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<CgpEstimate> {
    if samples < 2 {
        return Err(Error::TooFewSamples {
            got: samples,
            min: 2,
        });
    }
    if channel.dim() != basis.dim() {
        return Err(Error::DimMismatch {
            expected: basis.dim(),
            got: channel.dim(),
        });
    }
    let d = basis.dim();
    let moved_offdiag: Vec<ComplexMatrix> = (0..d)
        .map(|j| q_project(basis, &channel.apply(&basis.projector(j))?))
        .collect::<Result<_>>()?;
    let mut gram = vec![0.0; d * d];
    for j in 0..d {
        for k in 0..d {
            gram[j * d + k] = hs_inner(&moved_offdiag[j], &moved_offdiag[k])?.re;
        }
    }

    let batches = samples.div_ceil(ESTIMATE_BATCH);
    let mut stats = vec![(0.0f64, 0.0f64); batches];
    let workers = workers.max(1).min(batches);
    let chunk = batches.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slab) in stats.chunks_mut(chunk).enumerate() {
            let gram = &gram;
            scope.spawn(move || {
                for (i, slot) in slab.iter_mut().enumerate() {
                    let b = w * chunk + i;
                    let start = b * ESTIMATE_BATCH;
                    let count = ESTIMATE_BATCH.min(samples - start);
                    *slot = run_batch(gram, d, seed, b as u64, count);
                }
            });
        }
    });

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (s, s2) in stats {
        sum += s;
        sum_sq += s2;
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(CgpEstimate {
        mean,
        stderr: (variance / n).sqrt(),
        samples,
        seed,
    })
}

fn run_batch(gram: &[f64], dim: usize, seed: u64, batch: u64, count: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch + 1);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..count {
        let p = sample_simplex_point(dim, &mut rng);
        let mut value = 0.0;
        for j in 0..dim {
            let mut row = 0.0;
            for k in 0..dim {
                row += gram[j * dim + k] * p[k];
            }
            value += p[j] * row;
        }
        sum += value;
        sum_sq += value * value;
    }
    (sum, sum_sq)
}

/// A unitary drawn from the invariant (Haar) measure: QR of a standard
/// complex Gaussian matrix. The modified Gram–Schmidt factorization used
/// here yields the triangular factor with positive real diagonal directly,
/// which pins the phase gauge the construction requires.
pub fn haar_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    });
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|j| gaussian.column(j)).collect();
    for j in 0..dim {
        // two Gram-Schmidt passes keep orthogonality at machine precision
        for _ in 0..2 {
            for i in 0..j {
                let mut proj = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    proj += cols[i][k].conj() * cols[j][k];
                }
                for k in 0..dim {
                    let v = cols[i][k];
                    cols[j][k] -= proj * v;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// The discrete Fourier unitary, entries `exp(2 pi i jk / d) / sqrt(d)`.
/// Every squared entry is `1/d`, so the MASA it generates is mutually
/// unbiased with — and maximally distant from — the computational one.
pub fn fourier_unitary(dim: usize) -> ComplexMatrix {
    let norm = 1.0 / (dim as f64).sqrt();
    ComplexMatrix::from_fn(dim, dim, |j, k| {
        let arg = std::f64::consts::TAU * ((j * k) % dim) as f64 / dim as f64;
        Complex64::from_polar(norm, arg)
    })
}
