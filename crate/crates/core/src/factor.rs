//! Dense `n x d` factor matrices whose rows are the points to partition.
//!
//! A factor matrix `V` represents the similarity matrix `A = V Vᵀ` implicitly;
//! row `i` is the point associated with item `i`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::weights::SymmetricWeights;

/// An `n x d` real matrix stored row-major. Rows are the points `v_1 .. v_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorMatrix {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl FactorMatrix {
    /// Build from a flat row-major buffer of length `n * d`.
    ///
    /// Requires `n >= 1`, `d >= 1` and all entries finite.
    pub fn from_vec(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidInput(format!(
                "factor matrix must have n >= 1 and d >= 1 (got n = {n}, d = {d})"
            )));
        }
        if data.len() != n * d {
            return Err(Error::SizeMismatch(format!(
                "expected {} entries for a {n} x {d} matrix, got {}",
                n * d,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                bad / d,
                bad % d
            )));
        }
        Ok(Self { n, d, data })
    }

    /// Build from explicit rows; all rows must have equal nonzero length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("factor matrix has no rows".into()));
        }
        let d = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::SizeMismatch(format!(
                    "row {i} has {} columns, expected {d}",
                    r.len()
                )));
            }
        }
        Self::from_vec(n, d, rows.concat())
    }

    /// A single-column matrix from a vector of scalars.
    pub fn from_column(v: &[f64]) -> Result<Self> {
        Self::from_vec(v.len(), 1, v.to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `Σ_i ‖v_i‖²`, the trace of `V Vᵀ`.
    pub fn squared_norm_sum(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// Materialize the Gram matrix `A = V Vᵀ`.
    pub fn gram(&self) -> SymmetricWeights {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            let vi = self.row(i);
            for j in i..n {
                let dot = dot(vi, self.row(j));
                a[i * n + j] = dot;
                a[j * n + i] = dot;
            }
        }
        SymmetricWeights::from_vec(n, a).expect("Gram matrix is symmetric by construction")
    }

    /// Subtract the mean row from every row.
    pub fn center(&self) -> FactorMatrix {
        let mut mean = vec![0.0; self.d];
        for r in self.rows() {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= self.n as f64;
        }
        let mut data = self.data.clone();
        for r in data.chunks_exact_mut(self.d) {
            for (x, m) in r.iter_mut().zip(&mean) {
                *x -= m;
            }
        }
        FactorMatrix {
            n: self.n,
            d: self.d,
            data,
        }
    }

    /// Parse from headerless CSV: one row per line, `d` comma-separated values.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = parse_numeric_csv(reader)?;
        FactorMatrix::from_rows(&rows)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    /// Write as headerless CSV with 17-significant-digit decimals, so the
    /// values round-trip bit-exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.rows() {
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

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Format one CSV row with 17 significant digits per value.
pub(crate) fn write_csv_row<W: Write>(w: &mut W, row: &[f64]) -> Result<()> {
    let mut line = String::new();
    for (j, x) in row.iter().enumerate() {
        if j > 0 {
            line.push(',');
        }
        line.push_str(&format_f64(*x));
    }
    line.push('\n');
    w.write_all(line.as_bytes())?;
    Ok(())
}

/// 17 significant digits preserve every `f64` exactly across a text round trip.
pub(crate) fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parse a rectangular headerless numeric CSV. Blank lines are skipped.
pub(crate) fn parse_numeric_csv<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, field) in trimmed.split(',').enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                row: lineno + 1,
                col: col + 1,
                msg: format!("not a number: {:?}", field.trim()),
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(FactorMatrix::from_vec(0, 1, vec![]).is_err());
        assert!(FactorMatrix::from_vec(1, 0, vec![]).is_err());
        assert!(FactorMatrix::from_vec(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(FactorMatrix::from_vec(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn gram_matches_dot_products() {
        let v = FactorMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 2.0]]).unwrap();
        let a = v.gram();
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.get(0, 2), -1.0);
        assert_eq!(a.get(1, 2), 2.0);
        assert_eq!(a.get(2, 2), 5.0);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let v = FactorMatrix::from_rows(&[
            vec![std::f64::consts::PI, -1.0 / 3.0],
            vec![1e-300, 2.5e17],
            vec![-0.0, 4.0],
        ])
        .unwrap();
        let mut buf = Vec::new();
        v.write_csv(&mut buf).unwrap();
        let back = FactorMatrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(v.n(), back.n());
        assert_eq!(v.d(), back.d());
        for (a, b) in v.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a} != {b}");
        }
    }

    #[test]
    fn csv_parse_error_reports_position() {
        let err = FactorMatrix::read_csv("1.0,2.0\n3.0,oops\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { row, col, .. } => {
                assert_eq!((row, col), (2, 2));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn center_subtracts_mean_row() {
        let v = FactorMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 6.0]]).unwrap();
        let c = v.center();
        assert_eq!(c.row(0), &[-1.0, -2.0]);
        assert_eq!(c.row(1), &[1.0, 2.0]);
    }
}
