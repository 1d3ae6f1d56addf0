//! Clustering quality metrics and the method comparison report.

use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::factor::FactorMatrix;
use crate::objective::{cc_objective, vp_objective};
use crate::weights::SymmetricWeights;

/// Fraction of the `n(n-1)/2` item pairs on which the two clusterings make
/// the same together/apart decision. Symmetric and relabeling-invariant.
pub fn pair_accuracy(c: &Clustering, reference: &Clustering) -> Result<f64> {
    let n = c.n();
    if reference.n() != n {
        return Err(Error::SizeMismatch(format!(
            "clusterings have {n} and {} items",
            reference.n()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput(
            "pair accuracy needs at least 2 items".into(),
        ));
    }
    let mut agree = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if c.together(i, j) == reference.together(i, j) {
                agree += 1;
            }
        }
    }
    Ok(agree as f64 / (n * (n - 1) / 2) as f64)
}

/// Proportion of same-cluster pairs that share an attribute value, pooled
/// over all clusters. Pairs where either item's value is missing are
/// excluded from both counts. With a single cluster this is the whole-data
/// baseline.
pub fn attribute_cohesion(c: &Clustering, attr: &[Option<String>]) -> Result<f64> {
    c.check_n(attr.len())?;
    let mut eligible = 0usize;
    let mut same = 0usize;
    for cluster in c.members() {
        for (pos, &i) in cluster.iter().enumerate() {
            let Some(a) = &attr[i] else { continue };
            for &j in &cluster[pos + 1..] {
                let Some(b) = &attr[j] else { continue };
                eligible += 1;
                if a == b {
                    same += 1;
                }
            }
        }
    }
    if eligible == 0 {
        return Err(Error::NoComparablePairs);
    }
    Ok(same as f64 / eligible as f64)
}

/// One solver run fed to [`compare_report`].
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub name: String,
    pub clustering: Clustering,
    pub seconds: f64,
}

/// Per-method row of a comparison report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodReport {
    pub name: String,
    pub objective_cc: f64,
    pub objective_vp: Option<f64>,
    pub k: usize,
    pub seconds: f64,
    /// Ratio of this method's `objective_cc` to the best entry's.
    pub ratio_cc: Option<f64>,
}

/// A comparison of several clusterings of the same instance, sorted by
/// `objective_cc` descending.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub methods: Vec<MethodReport>,
    /// Name of the best-scoring method.
    pub baseline: String,
}

/// Score each run on the full weight matrix (and the factors, when given)
/// and rank the methods.
pub fn compare_report(
    a: &SymmetricWeights,
    v: Option<&FactorMatrix>,
    runs: &[MethodRun],
) -> Result<CompareReport> {
    if runs.is_empty() {
        return Err(Error::InvalidInput("no method runs to compare".into()));
    }
    let mut methods = Vec::with_capacity(runs.len());
    for run in runs {
        run.clustering.check_n(a.n())?;
        let objective_vp = match v {
            Some(v) => Some(vp_objective(v, &run.clustering)?),
            None => None,
        };
        methods.push(MethodReport {
            name: run.name.clone(),
            objective_cc: cc_objective(a, &run.clustering)?,
            objective_vp,
            k: run.clustering.k(),
            seconds: run.seconds,
            ratio_cc: None,
        });
    }
    let mut order: Vec<usize> = (0..methods.len()).collect();
    order.sort_by(|&x, &y| {
        methods[y]
            .objective_cc
            .partial_cmp(&methods[x].objective_cc)
            .unwrap()
            .then(x.cmp(&y))
    });
    let mut methods: Vec<MethodReport> = order.into_iter().map(|i| methods[i].clone()).collect();
    let best = methods[0].objective_cc;
    for m in &mut methods {
        m.ratio_cc = if m.objective_cc == best {
            Some(1.0)
        } else if best != 0.0 {
            Some(m.objective_cc / best)
        } else {
            None
        };
    }
    let baseline = methods[0].name.clone();
    Ok(CompareReport { methods, baseline })
}

impl CompareReport {
    /// Aligned text table for terminal output.
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<16} {:>6} {:>16} {:>16} {:>10} {:>10}\n",
            "method", "k", "objective_cc", "objective_vp", "ratio_cc", "seconds"
        ));
        for m in &self.methods {
            let vp = m
                .objective_vp
                .map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
            let ratio = m
                .ratio_cc
                .map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
            out.push_str(&format!(
                "{:<16} {:>6} {:>16.6} {:>16} {:>10} {:>10.3}\n",
                m.name, m.k, m.objective_cc, vp, ratio, m.seconds
            ));
        }
        out
    }
}
