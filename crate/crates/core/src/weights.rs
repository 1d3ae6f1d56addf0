//! Dense symmetric similarity matrices.
//!
//! Off-diagonal entry `A_ij` encodes the net similarity of items `i` and `j`:
//! the positive part is the agreement weight for clustering them together,
//! the negative part the weight for keeping them apart. Every objective in
//! this crate ignores the diagonal.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::factor::{parse_numeric_csv, write_csv_row};

/// Relative tolerance for accepting nearly-symmetric input; correlation
/// matrices computed in floating point carry rounding noise.
pub const SYMMETRY_RTOL: f64 = 1e-9;

/// A dense symmetric `n x n` weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricWeights {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricWeights {
    /// Build from a flat row-major buffer of length `n * n`.
    ///
    /// Rejects matrices with `|A_ij - A_ji| > 1e-9 * max(1, |A_ij|)` anywhere.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("weight matrix must have n >= 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::SizeMismatch(format!(
                "expected {} entries for an {n} x {n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                bad / n,
                bad % n
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let a = data[i * n + j];
                let b = data[j * n + i];
                if (a - b).abs() > SYMMETRY_RTOL * a.abs().max(1.0) {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `w⁺_ij = max(A_ij, 0)` for `i != j`.
    pub fn pos_part(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).max(0.0)
    }

    /// `w⁻_ij = max(-A_ij, 0)` for `i != j`.
    pub fn neg_part(&self, i: usize, j: usize) -> f64 {
        (-self.get(i, j)).max(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// The exactly symmetric matrix `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> SymmetricWeights {
        let n = self.n;
        let mut data = self.data.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                data[i * n + j] = m;
                data[j * n + i] = m;
            }
        }
        SymmetricWeights { n, data }
    }

    /// Frobenius norm of the matrix.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Return a copy with `shift` added to every diagonal entry. No objective
    /// value changes under this transformation.
    pub fn with_shifted_diagonal(&self, shift: f64) -> SymmetricWeights {
        let mut data = self.data.clone();
        for i in 0..self.n {
            data[i * self.n + i] += shift;
        }
        SymmetricWeights { n: self.n, data }
    }

    /// Parse from headerless CSV with `n` rows of `n` values.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = parse_numeric_csv(reader)?;
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::SizeMismatch(format!(
                    "row {i} has {} columns, expected {n} for a square matrix",
                    r.len()
                )));
            }
        }
        SymmetricWeights::from_vec(n, rows.concat())
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.data.chunks_exact(self.n) {
            write_csv_row(&mut w, row)?;
        }
        Ok(())
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)?;
        Ok(())
    }
}
