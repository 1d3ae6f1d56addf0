//! Synthetic benchmark instances: planted simplex-prototype clusters with
//! Gaussian noise, and pure Gaussian factor matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::factor::FactorMatrix;
use crate::zonotope::derive_seed;

/// A generated instance with its planted ground truth.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub factors: FactorMatrix,
    pub planted: Clustering,
    pub epsilon: f64,
    pub k_true: usize,
}

/// The `d + 1` unit vertices of a regular simplex centered at the origin of
/// `R^d`; every pairwise dot product is exactly `-1/d` up to rounding.
///
/// Construction: take the standard basis of `R^{d+1}`, subtract the
/// centroid, express the result in an orthonormal (Helmert) basis of the
/// sum-zero hyperplane, and normalize.
pub fn simplex_vertices(d: usize) -> Vec<Vec<f64>> {
    assert!(d >= 1, "simplex dimension must be >= 1");
    // Helmert rows are an orthonormal basis of the hyperplane orthogonal to
    // the all-ones vector; e_i - centroid projects onto row k as h_k[i].
    let mut vertices = vec![vec![0.0; d]; d + 1];
    for k in 1..=d {
        let norm = (k as f64 * (k + 1) as f64).sqrt();
        for (i, vertex) in vertices.iter_mut().enumerate() {
            let h = if i < k {
                1.0 / norm
            } else if i == k {
                -(k as f64) / norm
            } else {
                0.0
            };
            vertex[k - 1] = h;
        }
    }
    for vertex in &mut vertices {
        let len = vertex.iter().map(|x| x * x).sum::<f64>().sqrt();
        vertex.iter_mut().for_each(|x| *x /= len);
    }
    vertices
}

/// Generate a planted instance: `k_true` clusters drawn uniformly from the
/// integer range `[⌈d/2⌉, d+1]`, items assigned uniformly (redrawn until no
/// cluster is empty), and rows `(1-ε) * vertex + ε * gaussian`.
pub fn gen_planted(d: usize, n: usize, epsilon: f64, seed: u64) -> Result<PlantedInstance> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidInput(format!(
            "planted instance needs d >= 1 and n >= 1 (got d = {d}, n = {n})"
        )));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in [0, 1] (got {epsilon})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
    let lo = d.div_ceil(2).min(n);
    let hi = (d + 1).min(n);
    let k_true = rng.gen_range(lo..=hi);

    let mut labels = vec![0usize; n];
    loop {
        for l in labels.iter_mut() {
            *l = rng.gen_range(0..k_true);
        }
        let mut used = vec![false; k_true];
        for &l in &labels {
            used[l] = true;
        }
        if used.iter().all(|&u| u) {
            break;
        }
    }

    let vertices = simplex_vertices(d);
    let mut data = Vec::with_capacity(n * d);
    for &l in &labels {
        for t in 0..d {
            let noise: f64 = rng.sample(StandardNormal);
            data.push((1.0 - epsilon) * vertices[l][t] + epsilon * noise);
        }
    }
    let factors = FactorMatrix::from_vec(n, d, data)?;
    let planted = Clustering::canonicalize(&labels)?;
    debug_assert_eq!(planted.k(), k_true);
    Ok(PlantedInstance {
        factors,
        planted,
        epsilon,
        k_true,
    })
}

/// Default item count for a planted instance of rank `d`.
pub fn default_planted_n(d: usize) -> usize {
    10 * d
}

/// Default noise level for planted instances.
pub const DEFAULT_EPSILON: f64 = 0.15;

/// An `n x d` matrix of independent standard normals.
pub fn gen_gaussian(n: usize, d: usize, seed: u64) -> Result<FactorMatrix> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidInput(format!(
            "gaussian factors need n >= 1 and d >= 1 (got n = {n}, d = {d})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
    let data: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    FactorMatrix::from_vec(n, d, data)
}
