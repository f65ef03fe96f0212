//! Differential metric along Hamiltonian paths.
//!
//! Each non-degenerate Hermitian matrix carries the MORI of its
//! eigenvectors; moving the matrix along a path drags the MORI and defines
//! a metric speed. Per-level susceptibilities come from phase-aligned
//! central differences of the eigenframes, the total speed is four times
//! their sum, and the projective pull-back speed must come out at exactly
//! half of it — a relation the tests verify by step-halving.

use crate::grassmann::dfs_distance;
use crate::linalg::{Complex64, ComplexMatrix, Tolerance};
use crate::mori::Mori;
use crate::{Error, Result};

/// A one-parameter family of Hermitian matrices that can be evaluated at
/// any point of its domain.
pub trait HamiltonianCurve: Sync {
    fn dim(&self) -> usize;
    /// Eigenvalue gaps at or below this threshold are treated as
    /// degeneracies and rejected: the eigenvector MORI is discontinuous
    /// there.
    fn gap_tol(&self) -> f64;
    fn domain(&self) -> (f64, f64);
    fn eval(&self, t: f64) -> ComplexMatrix;
}

/// A discretized Hamiltonian family: Hermitian matrices at strictly
/// increasing nodes, evaluated by linear interpolation in between.
#[derive(Debug, Clone)]
pub struct HamiltonianPath {
    dim: usize,
    nodes: Vec<(f64, ComplexMatrix)>,
    gap_tol: f64,
}

impl HamiltonianPath {
    /// Validates dimensions, hermiticity within `tol.structural`, strictly
    /// increasing node times and non-degeneracy (at the nodes) beyond
    /// `gap_tol`.
    pub fn new(
        dim: usize,
        nodes: Vec<(f64, ComplexMatrix)>,
        gap_tol: f64,
        tol: &Tolerance,
    ) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPath {
                reason: format!("need at least 2 nodes, got {}", nodes.len()),
            });
        }
        if !(gap_tol.is_finite() && gap_tol > 0.0) {
            return Err(Error::InvalidPath {
                reason: format!("gap tolerance must be positive, got {gap_tol}"),
            });
        }
        for (t, _) in &nodes {
            if !t.is_finite() {
                return Err(Error::InvalidPath {
                    reason: format!("node time {t} is not finite"),
                });
            }
        }
        for window in nodes.windows(2) {
            if window[1].0 <= window[0].0 {
                return Err(Error::InvalidPath {
                    reason: format!(
                        "node times must strictly increase, got {} then {}",
                        window[0].0, window[1].0
                    ),
                });
            }
        }
        for (t, h) in &nodes {
            if h.rows() != dim || h.cols() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    got: h.rows(),
                });
            }
            let deviation = h.hermiticity_deviation();
            if deviation > tol.structural {
                return Err(Error::NotHermitian {
                    deviation,
                    tol: tol.structural,
                });
            }
            let (evals, _) = crate::linalg::eigh(h)?;
            for w in evals.windows(2) {
                if w[1] - w[0] <= gap_tol {
                    return Err(Error::InvalidPath {
                        reason: format!(
                            "degenerate node at t = {t}: gap {} <= {gap_tol}",
                            w[1] - w[0]
                        ),
                    });
                }
            }
        }
        Ok(HamiltonianPath {
            dim,
            nodes,
            gap_tol,
        })
    }
}

impl HamiltonianCurve for HamiltonianPath {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gap_tol(&self) -> f64 {
        self.gap_tol
    }

    fn domain(&self) -> (f64, f64) {
        (self.nodes[0].0, self.nodes[self.nodes.len() - 1].0)
    }

    fn eval(&self, t: f64) -> ComplexMatrix {
        let last = self.nodes.len() - 1;
        if t <= self.nodes[0].0 {
            return self.nodes[0].1.clone();
        }
        if t >= self.nodes[last].0 {
            return self.nodes[last].1.clone();
        }
        let k = self.nodes.partition_point(|(tk, _)| *tk <= t) - 1;
        let (t0, h0) = &self.nodes[k];
        let (t1, h1) = &self.nodes[k + 1];
        let w = (t - t0) / (t1 - t0);
        h0.scale(Complex64::new(1.0 - w, 0.0))
            .add(&h1.scale(Complex64::new(w, 0.0)))
            .expect("path nodes share dimensions")
    }
}

/// A Hamiltonian family given in closed form by a callable.
pub struct ClosedFormPath<F: Fn(f64) -> ComplexMatrix + Sync> {
    dim: usize,
    gap_tol: f64,
    t0: f64,
    t1: f64,
    f: F,
}

impl<F: Fn(f64) -> ComplexMatrix + Sync> ClosedFormPath<F> {
    pub fn new(dim: usize, domain: (f64, f64), gap_tol: f64, f: F) -> Self {
        ClosedFormPath {
            dim,
            gap_tol,
            t0: domain.0,
            t1: domain.1,
            f,
        }
    }
}

impl<F: Fn(f64) -> ComplexMatrix + Sync> HamiltonianCurve for ClosedFormPath<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gap_tol(&self) -> f64 {
        self.gap_tol
    }

    fn domain(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    fn eval(&self, t: f64) -> ComplexMatrix {
        (self.f)(t)
    }
}

/// Susceptibilities and metric speeds at one point of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub t: f64,
    /// Per-level susceptibilities, ascending eigenvalue order, clamped at
    /// zero (central differences can land a hair below).
    pub chi: Vec<f64>,
    /// `4 * sum(chi)`.
    pub speed: f64,
    /// Squared rate of change of the projective pull-back distance;
    /// converges to `speed / 2` as the step shrinks.
    pub fs_speed: f64,
}

/// Rephase and reorder `target` so its levels line up with `reference`:
/// level `i` of the result is the column of `target` with the largest
/// squared overlap against column `i` of `reference`, rephased to make
/// that overlap real positive. Fails when the best overlap drops below
/// 0.5 (ambiguous tracking near a crossing).
pub fn align_to(reference: &Mori, target: &Mori) -> Result<Mori> {
    let d = reference.dim();
    if target.dim() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: target.dim(),
        });
    }
    let mut used = vec![false; d];
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..d {
            if used[j] {
                continue;
            }
            let overlap = reference.vector_overlap(target, i, j);
            if best.is_none_or(|(_, b)| overlap > b) {
                best = Some((j, overlap));
            }
        }
        let (j, overlap) = best.expect("dimension is positive");
        if overlap < 0.5 {
            return Err(Error::LevelTrackingAmbiguous { overlap });
        }
        used[j] = true;
        // make <ref_i | tgt_j> real positive
        let mut inner = Complex64::new(0.0, 0.0);
        for k in 0..d {
            inner += reference.frame().get(k, i).conj() * target.frame().get(k, j);
        }
        let phase = inner.conj() / Complex64::new(inner.norm(), 0.0);
        columns.push((0..d).map(|k| target.frame().get(k, j) * phase).collect());
    }
    let frame = ComplexMatrix::from_fn(d, d, |r, c| columns[c][r]);
    Mori::from_frame(frame, &Tolerance::default())
}

fn eigenframe<C: HamiltonianCurve + ?Sized>(curve: &C, t: f64) -> Result<Mori> {
    Mori::from_hermitian(&curve.eval(t), curve.gap_tol(), &Tolerance::default())
}

/// Eigenframes at `t - h`, `t`, `t + h`, with the outer two level-tracked
/// and phase-aligned against the middle one.
pub fn aligned_frames<C: HamiltonianCurve + ?Sized>(
    curve: &C,
    t: f64,
    h: f64,
) -> Result<(Mori, Mori, Mori)> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::OutOfRange {
            value: h,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let (t0, t1) = curve.domain();
    // slack absorbs the rounding of grid arithmetic like (t0 + h) - h
    let slack = 1e-12 * (1.0 + t.abs().max(h));
    if t - h < t0 - slack || t + h > t1 + slack {
        return Err(Error::OutOfDomain { t, t0, t1 });
    }
    let center = eigenframe(curve, t)?;
    let before = align_to(&center, &eigenframe(curve, t - h)?)?;
    let after = align_to(&center, &eigenframe(curve, t + h)?)?;
    Ok((before, center, after))
}

/// Central-difference susceptibilities
/// `chi_i = <di|di> - |<i|di>|^2` with `|di> = (|i(t+h)> - |i(t-h)>) / 2h`.
/// Converges at second order in `h`; values can undershoot zero by
/// round-off only.
pub fn susceptibilities<C: HamiltonianCurve + ?Sized>(
    curve: &C,
    t: f64,
    h: f64,
) -> Result<Vec<f64>> {
    let (before, center, after) = aligned_frames(curve, t, h)?;
    Ok(susceptibilities_from_frames(&before, &center, &after, h))
}

/// The susceptibility formula on already-aligned frames; exposed so gauge
/// tests can feed frames with randomized phases through [`align_to`].
pub fn susceptibilities_from_frames(
    before: &Mori,
    center: &Mori,
    after: &Mori,
    h: f64,
) -> Vec<f64> {
    let d = center.dim();
    let mut chi = Vec::with_capacity(d);
    for i in 0..d {
        let mut norm_sq = 0.0;
        let mut inner = Complex64::new(0.0, 0.0);
        for k in 0..d {
            let derivative =
                (after.frame().get(k, i) - before.frame().get(k, i)) / Complex64::new(2.0 * h, 0.0);
            norm_sq += derivative.norm_sqr();
            inner += center.frame().get(k, i).conj() * derivative;
        }
        chi.push(norm_sq - inner.norm_sqr());
    }
    chi
}

/// Metric sample at one point: susceptibilities, the speed `4 sum(chi)`
/// and the projective pull-back speed from the same pair of frames.
pub fn metric_speed<C: HamiltonianCurve + ?Sized>(
    curve: &C,
    t: f64,
    h: f64,
) -> Result<MetricSample> {
    let (before, center, after) = aligned_frames(curve, t, h)?;
    let chi: Vec<f64> = susceptibilities_from_frames(&before, &center, &after, h)
        .into_iter()
        .map(|x| x.max(0.0))
        .collect();
    let speed = 4.0 * chi.iter().sum::<f64>();
    let dfs = dfs_distance(&before, &after)?;
    let fs_speed = (dfs / (2.0 * h)).powi(2);
    Ok(MetricSample {
        t,
        chi,
        speed,
        fs_speed,
    })
}

/// Metric samples on the grid `t0 + h, t0 + h + step, ...` up to `t1 - h`.
/// Grid points with degenerate spectra (or ambiguous level tracking, the
/// same thing seen from one step away) are skipped, leaving gaps rather
/// than aborting the sweep. Points are evaluated independently, optionally
/// across `workers` threads, and reassembled in grid order.
pub fn sweep<C: HamiltonianCurve + ?Sized>(
    curve: &C,
    h: f64,
    step: f64,
    workers: usize,
) -> Result<Vec<MetricSample>> {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if !positive(h) || !positive(step) {
        return Err(Error::InvalidPath {
            reason: format!("h and step must be positive, got h={h} step={step}"),
        });
    }
    let (t0, t1) = curve.domain();
    let start = t0 + h;
    let end = t1 - h;
    if end < start {
        return Err(Error::InvalidPath {
            reason: format!("domain [{t0}, {t1}] too narrow for step size h={h}"),
        });
    }
    let count = ((end - start) / step).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|k| start + k as f64 * step).collect();

    let mut slots: Vec<Result<Option<MetricSample>>> = Vec::with_capacity(count);
    slots.resize_with(count, || Ok(None));
    let workers = workers.max(1).min(count);
    let chunk = count.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slab) in slots.chunks_mut(chunk).enumerate() {
            let grid = &grid;
            scope.spawn(move || {
                for (i, slot) in slab.iter_mut().enumerate() {
                    let t = grid[w * chunk + i];
                    *slot = match metric_speed(curve, t, h) {
                        Ok(sample) => Ok(Some(sample)),
                        Err(
                            Error::DegenerateSpectrum { .. } | Error::LevelTrackingAmbiguous { .. },
                        ) => Ok(None),
                        Err(e) => Err(e),
                    };
                }
            });
        }
    });

    let mut samples = Vec::with_capacity(count);
    for slot in slots {
        if let Some(sample) = slot? {
            samples.push(sample);
        }
    }
    Ok(samples)
}
