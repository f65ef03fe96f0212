//! Closed-form two-level expressions.
//!
//! A qubit MORI is a pair of projectors `(I ± n·sigma)/2` labelled by a
//! unit Bloch vector (n and -n give the same MORI). Distances, overlaps
//! and generating powers all reduce to trigonometry in the angle between
//! Bloch vectors, which makes this module the analytic oracle for the
//! general-dimension code.

use crate::linalg::{Complex64, ComplexMatrix, Tolerance};
use crate::mori::Mori;
use crate::{Error, Result};

/// A unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    /// Build a Bloch vector, requiring unit norm within the default
    /// structural tolerance.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > Tolerance::default().structural {
            return Err(Error::NonUnitBloch { norm });
        }
        Ok(BlochVector { x, y, z })
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &BlochVector) -> (f64, f64, f64) {
        (
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    /// Angle `psi = arccos(n . m)` between two Bloch vectors.
    pub fn angle(&self, other: &BlochVector) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

/// The MORI with projectors `(I ± n·sigma)/2`, the `+` eigenvector first.
///
/// Eigenvectors are built from the spherical angles of `n` and rephased so
/// the largest-magnitude component is real positive, consistent with the
/// canonicalization convention.
pub fn mori_from_bloch(n: &BlochVector) -> Mori {
    let theta = n.z.clamp(-1.0, 1.0).acos();
    let phi = n.y.atan2(n.x);
    let (half_cos, half_sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let phase = Complex64::from_polar(1.0, phi);
    // columns: +1 eigenvector (cos, e^{i phi} sin), -1 eigenvector
    // (-e^{-i phi} sin, cos)
    let mut plus = [
        Complex64::new(half_cos, 0.0),
        phase * Complex64::new(half_sin, 0.0),
    ];
    let mut minus = [
        phase.conj() * Complex64::new(-half_sin, 0.0),
        Complex64::new(half_cos, 0.0),
    ];
    for col in [&mut plus, &mut minus] {
        let pivot = if col[0].norm() >= col[1].norm() {
            col[0]
        } else {
            col[1]
        };
        let rephase = pivot.conj() / Complex64::new(pivot.norm(), 0.0);
        col[0] *= rephase;
        col[1] *= rephase;
    }
    let frame =
        ComplexMatrix::from_rows(vec![vec![plus[0], minus[0]], vec![plus[1], minus[1]]]).unwrap();
    Mori::from_frame(frame, &Tolerance::default()).expect("bloch frame is unitary")
}

/// Distance between the MASAs of two Bloch vectors:
/// `sqrt(2) |sin psi|` with `psi` the angle between them.
pub fn qubit_distance(n: &BlochVector, m: &BlochVector) -> f64 {
    2.0f64.sqrt() * n.angle(m).sin().abs()
}

/// Generating power of the Bloch rotation by polar angle `theta`:
/// `sin^2(theta) / 6`.
pub fn qubit_cgp(theta: f64) -> f64 {
    theta.sin().powi(2) / 6.0
}

/// Projective pull-back distance for Bloch angle `psi` in `[0, pi]`:
/// `min(psi, pi - psi)`, reflecting the identification of antipodal
/// Bloch vectors.
pub fn qubit_dfs(psi: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&psi) {
        return Err(Error::OutOfRange {
            value: psi,
            min: 0.0,
            max: std::f64::consts::PI,
        });
    }
    Ok(psi.min(std::f64::consts::PI - psi))
}

/// The qubit unitary taking the computational basis to the Bloch direction
/// `(sin theta cos phi, sin theta sin phi, cos theta)`:
/// columns `(a, b)` and `(-conj(b), conj(a))` with `a = cos(theta/2)`,
/// `b = e^{i phi} sin(theta/2)`.
pub fn qubit_unitary(theta: f64, phi: f64) -> ComplexMatrix {
    let a = Complex64::new((theta / 2.0).cos(), 0.0);
    let b = Complex64::from_polar((theta / 2.0).sin(), phi);
    ComplexMatrix::from_rows(vec![vec![a, -b.conj()], vec![b, a.conj()]]).unwrap()
}
