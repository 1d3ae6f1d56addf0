//! Partitions of `n` items into `k` nonempty clusters, kept in canonical form.
//!
//! Canonical form assigns cluster ids in order of first occurrence, so two raw
//! labelings that induce the same partition compare equal. The cut indicator
//! for a pair is `labels[i] != labels[j]`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::FactorMatrix;

/// A partition of `n` items into `k` nonempty clusters in canonical label order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

impl Clustering {
    /// Canonicalize a raw labeling: ids are renumbered by first occurrence,
    /// so `labels[0] == 0` and each new id is the previous maximum plus one.
    pub fn canonicalize(raw: &[usize]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyLabeling);
        }
        let mut map: Vec<(usize, usize)> = Vec::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &id in raw {
            let canon = match map.iter().find(|(orig, _)| *orig == id) {
                Some(&(_, c)) => c,
                None => {
                    let c = map.len();
                    map.push((id, c));
                    c
                }
            };
            labels.push(canon);
        }
        let k = map.len();
        Ok(Self { labels, k })
    }

    /// All items in one cluster.
    pub fn single_cluster(n: usize) -> Result<Self> {
        Self::canonicalize(&vec![0; n])
    }

    /// Every item in its own cluster.
    pub fn singletons(n: usize) -> Result<Self> {
        Self::canonicalize(&(0..n).collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// `true` when items `i` and `j` share a cluster (`d_ij = 0`).
    pub fn together(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    /// Members of each cluster, in item order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.labels.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub(crate) fn check_n(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::SizeMismatch(format!(
                "clustering has {} items, expected {n}",
                self.n()
            )));
        }
        Ok(())
    }
}

/// Per-cluster sums of factor rows: `S_i = Σ_{v in C_i} v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumPoints {
    k: usize,
    d: usize,
    data: Vec<f64>,
}

impl SumPoints {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// `Σ_i ‖S_i‖²`.
    pub fn squared_norm_total(&self) -> f64 {
        self.points().map(|p| crate::factor::dot(p, p)).sum()
    }
}

/// Sum the rows of `v` within each cluster of `c`.
pub fn sum_points(v: &FactorMatrix, c: &Clustering) -> Result<SumPoints> {
    c.check_n(v.n())?;
    let d = v.d();
    let mut data = vec![0.0; c.k() * d];
    for (i, row) in v.rows().enumerate() {
        let base = c.label(i) * d;
        for (slot, x) in data[base..base + d].iter_mut().zip(row) {
            *slot += x;
        }
    }
    Ok(SumPoints { k: c.k(), d, data })
}

/// On-disk record for a clustering result.
///
/// `objective_vp` is `Σ‖S_i‖²` on the factor matrix (absent for matrix-only
/// runs); `objective_cc` is the similarity weight captured inside clusters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteringRecord {
    pub labels: Vec<usize>,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_vp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_cc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl ClusteringRecord {
    pub fn new(c: &Clustering) -> Self {
        Self {
            labels: c.labels().to_vec(),
            k: c.k(),
            objective_vp: None,
            objective_cc: None,
            seconds: None,
        }
    }

    pub fn clustering(&self) -> Result<Clustering> {
        let c = Clustering::canonicalize(&self.labels)?;
        if c.k() != self.k {
            return Err(Error::InvalidInput(format!(
                "record declares k = {}, labels use {} clusters",
                self.k,
                c.k()
            )));
        }
        Ok(c)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        Ok(())
    }

    pub fn write_json_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_json(f)
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn read_json_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_json(std::fs::File::open(path)?)
    }
}
