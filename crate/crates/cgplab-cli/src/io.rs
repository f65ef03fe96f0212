//! JSON schemas for matrices, Kraus channels and Hamiltonian paths, plus
//! the input digests echoed into every result document.
//!
//! A matrix document looks like
//! `{"rows": 2, "cols": 2, "data": [[[re, im], [re, im]], ...]}` with one
//! `[re, im]` pair per entry, row by row. Channels wrap a list of matrix
//! documents under `"kraus"`; path documents carry `"dim"`, `"nodes"`
//! (each `{"t": .., "H": matrix}`), a step size `"h"` and a grid spacing
//! `"step"`.

use cgplab_core::diffgeo::HamiltonianPath;
use cgplab_core::linalg::{Complex64, ComplexMatrix, Tolerance};
use cgplab_core::KrausChannel;
use serde::{Deserialize, Serialize};

/// Dense complex matrix as rows of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixDocument {
            rows: m.rows(),
            cols: m.cols(),
            data: (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| {
                            let z = m.get(i, j);
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.data.len() != self.rows {
            return Err(format!(
                "matrix document declares {} rows but carries {}",
                self.rows,
                self.data.len()
            ));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.cols
                ));
            }
            for pair in row {
                entries.push(Complex64::new(pair[0], pair[1]));
            }
        }
        ComplexMatrix::new(self.rows, self.cols, entries).map_err(|e| e.to_string())
    }
}

/// A CP map as a list of Kraus operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelDocument {
    pub kraus: Vec<MatrixDocument>,
}

impl ChannelDocument {
    pub fn to_channel(&self) -> Result<KrausChannel, String> {
        let kraus = self
            .kraus
            .iter()
            .map(|doc| doc.to_matrix())
            .collect::<Result<Vec<_>, _>>()?;
        KrausChannel::new(kraus).map_err(|e| e.to_string())
    }
}

/// One node of a discretized Hamiltonian family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathNodeDocument {
    pub t: f64,
    #[serde(rename = "H")]
    pub hamiltonian: MatrixDocument,
}

/// A discretized Hamiltonian family plus sweep parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathDocument {
    pub dim: usize,
    pub nodes: Vec<PathNodeDocument>,
    /// Central-difference step.
    #[serde(default = "default_h")]
    pub h: f64,
    pub step: f64,
    /// Eigenvalue-gap threshold below which a point counts as degenerate.
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
}

fn default_h() -> f64 {
    1e-4
}

fn default_gap_tol() -> f64 {
    1e-8
}

impl PathDocument {
    pub fn to_path(&self, tol: &Tolerance) -> Result<HamiltonianPath, String> {
        let nodes = self
            .nodes
            .iter()
            .map(|node| Ok((node.t, node.hamiltonian.to_matrix()?)))
            .collect::<Result<Vec<_>, String>>()?;
        HamiltonianPath::new(self.dim, nodes, self.gap_tol, tol).map_err(|e| e.to_string())
    }
}

/// FNV-1a digest of raw file bytes, hex encoded; result documents echo it
/// for every file input so runs are attributable to exact fixtures.
pub fn digest(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("fnv1a64:{hash:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_document_round_trips_exactly() {
        let m = ComplexMatrix::from_fn(3, 2, |i, j| {
            Complex64::new(1.0 / (i + 1) as f64, -(j as f64) / 7.0)
        });
        let doc = MatrixDocument::from_matrix(&m);
        let json = serde_json::to_string(&doc).unwrap();
        let back: MatrixDocument = serde_json::from_str(&json).unwrap();
        let m2 = back.to_matrix().unwrap();
        assert_eq!(m.entries(), m2.entries());
    }

    #[test]
    fn matrix_document_rejects_ragged_data() {
        let doc = MatrixDocument {
            rows: 2,
            cols: 2,
            data: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0]]],
        };
        assert!(doc.to_matrix().is_err());
    }

    #[test]
    fn matrix_document_rejects_non_finite() {
        let doc = MatrixDocument {
            rows: 1,
            cols: 1,
            data: vec![vec![[f64::NAN, 0.0]]],
        };
        assert!(doc.to_matrix().is_err());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(b""), "fnv1a64:cbf29ce484222325");
        assert_eq!(digest(b"cgplab"), digest(b"cgplab"));
        assert_ne!(digest(b"a"), digest(b"b"));
    }
}
