//! Time-series preprocessing: exponential smoothing, quadratic detrending of
//! the cross-series mean, z-scoring, and Pearson correlation.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::weights::SymmetricWeights;

/// `m` time steps of `n` named series, stored row-major by time step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesTable {
    names: Vec<String>,
    values: Vec<f64>, // m x n
    m: usize,
}

impl TimeSeriesTable {
    /// Build from per-step rows. Requires `m >= 3` (the quadratic detrend
    /// needs at least three points) and finite values.
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = names.len();
        let m = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("table has no series".into()));
        }
        if m < 3 {
            return Err(Error::InvalidInput(format!(
                "table needs at least 3 time steps (got {m})"
            )));
        }
        let mut values = Vec::with_capacity(m * n);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SizeMismatch(format!(
                    "time step {t} has {} values, expected {n}",
                    row.len()
                )));
            }
            for (s, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "non-finite value for series {s} at step {t}"
                    )));
                }
                values.push(x);
            }
        }
        Ok(Self { names, values, m })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn value(&self, t: usize, s: usize) -> f64 {
        self.values[t * self.n() + s]
    }

    /// One series as a column vector.
    pub fn series(&self, s: usize) -> Vec<f64> {
        (0..self.m).map(|t| self.value(t, s)).collect()
    }

    fn from_columns(names: Vec<String>, cols: Vec<Vec<f64>>) -> Self {
        let n = names.len();
        let m = cols[0].len();
        let mut values = vec![0.0; m * n];
        for (s, col) in cols.iter().enumerate() {
            for (t, &x) in col.iter().enumerate() {
                values[t * n + s] = x;
            }
        }
        Self { names, values, m }
    }

    /// Apply exponential smoothing with parameter `alpha` to every series.
    pub fn smooth(&self, alpha: f64) -> Result<TimeSeriesTable> {
        let cols = (0..self.n())
            .map(|s| smooth_exponential(&self.series(s), alpha))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_columns(self.names.clone(), cols))
    }

    /// Z-score every series; returns the indices of constant series, which
    /// come out as all zeros.
    pub fn zscore(&self) -> (TimeSeriesTable, Vec<usize>) {
        let mut warnings = Vec::new();
        let mut cols = Vec::with_capacity(self.n());
        for s in 0..self.n() {
            let (z, constant) = zscore(&self.series(s));
            if constant {
                warnings.push(s);
            }
            cols.push(z);
        }
        (Self::from_columns(self.names.clone(), cols), warnings)
    }

    /// Parse CSV: first row holds series names, each later row one time step.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = loop {
            match lines.next() {
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
                None => {
                    return Err(Error::Parse {
                        row: 1,
                        col: 1,
                        msg: "empty file".into(),
                    })
                }
            }
        };
        let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let n = names.len();
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut row = Vec::with_capacity(n);
            for (col, field) in trimmed.split(',').enumerate() {
                let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    row: lineno + 2,
                    col: col + 1,
                    msg: format!("not a number: {:?}", field.trim()),
                })?;
                row.push(value);
            }
            if row.len() != n {
                return Err(Error::Parse {
                    row: lineno + 2,
                    col: row.len(),
                    msg: format!("expected {n} values, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        TimeSeriesTable::new(names, rows)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header = self.names.join(",");
        w.write_all(header.as_bytes())?;
        w.write_all(b"\n")?;
        for t in 0..self.m {
            crate::factor::write_csv_row(
                &mut w,
                &(0..self.n()).map(|s| self.value(t, s)).collect::<Vec<_>>(),
            )?;
        }
        Ok(())
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)
    }
}

/// Exponential smoothing: `s_1 = x_1`, `s_t = α x_t + (1-α) s_{t-1}`.
pub fn smooth_exponential(series: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::InvalidInput("cannot smooth an empty series".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in (0, 1] (got {alpha})"
        )));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut prev = series[0];
    out.push(prev);
    for &x in &series[1..] {
        prev = alpha * x + (1.0 - alpha) * prev;
        out.push(prev);
    }
    Ok(out)
}

/// Z-score with population standard deviation. A constant series maps to all
/// zeros; the flag reports that degenerate case.
pub fn zscore(series: &[f64]) -> (Vec<f64>, bool) {
    let m = series.len() as f64;
    let mean = series.iter().sum::<f64>() / m;
    let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / m;
    let std = var.sqrt();
    if std == 0.0 {
        return (vec![0.0; series.len()], true);
    }
    (series.iter().map(|x| (x - mean) / std).collect(), false)
}

/// Fit a quadratic in the time index to the per-step mean across series and
/// subtract the fitted curve from every series.
pub fn detrend_quadratic(table: &TimeSeriesTable) -> Result<TimeSeriesTable> {
    let m = table.m();
    if m < 3 {
        return Err(Error::InvalidInput(format!(
            "quadratic detrend needs at least 3 time steps (got {m})"
        )));
    }
    let n = table.n();
    let means: Vec<f64> = (0..m)
        .map(|t| (0..n).map(|s| table.value(t, s)).sum::<f64>() / n as f64)
        .collect();

    // Least squares on a normalized index keeps the 3x3 system well
    // conditioned; the fitted values are identical to fitting on t = 0..m-1.
    let tau: Vec<f64> = (0..m).map(|t| t as f64 / (m - 1) as f64).collect();
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (t, &x) in tau.iter().enumerate() {
        let basis = [1.0, x, x * x];
        for r in 0..3 {
            for c in 0..3 {
                ata[r][c] += basis[r] * basis[c];
            }
            atb[r] += basis[r] * means[t];
        }
    }
    let coef = solve3(ata, atb).ok_or_else(|| {
        Error::InvalidInput("degenerate quadratic fit (collinear time index)".into())
    })?;

    let mut rows = Vec::with_capacity(m);
    for (t, &x) in tau.iter().enumerate() {
        let fit = coef[0] + coef[1] * x + coef[2] * x * x;
        rows.push((0..n).map(|s| table.value(t, s) - fit).collect::<Vec<_>>());
    }
    TimeSeriesTable::new(table.names().to_vec(), rows)
}

/// Solve a 3x3 linear system with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&r, &s| {
            a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in (col + 1)..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let mut acc = b[r];
        for c in (r + 1)..3 {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

/// Pearson correlation matrix of the series. The diagonal is exactly 1,
/// entries are clamped to `[-1, 1]`, and constant series correlate 0 with
/// everything; their indices are returned as warnings.
pub fn pearson_correlation(table: &TimeSeriesTable) -> Result<(SymmetricWeights, Vec<usize>)> {
    let m = table.m();
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "correlation needs at least 2 time steps (got {m})"
        )));
    }
    let n = table.n();
    let mut centered: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut stds: Vec<f64> = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    for s in 0..n {
        let col = table.series(s);
        let mean = col.iter().sum::<f64>() / m as f64;
        let centered_col: Vec<f64> = col.iter().map(|x| x - mean).collect();
        let var = centered_col.iter().map(|x| x * x).sum::<f64>() / m as f64;
        let std = var.sqrt();
        if std == 0.0 {
            warnings.push(s);
        }
        stds.push(std);
        centered.push(centered_col);
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        entries[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let r = if stds[i] == 0.0 || stds[j] == 0.0 {
                0.0
            } else {
                let cov = centered[i]
                    .iter()
                    .zip(&centered[j])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / m as f64;
                (cov / (stds[i] * stds[j])).clamp(-1.0, 1.0)
            };
            entries[i * n + j] = r;
            entries[j * n + i] = r;
        }
    }
    Ok((SymmetricWeights::from_vec(n, entries)?, warnings))
}
