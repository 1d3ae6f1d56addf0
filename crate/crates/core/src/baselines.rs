//! Comparison algorithms: randomized pivoting on the sign pattern of the
//! weights, and Lloyd's k-means with k-means++ seeding on the factor rows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::factor::FactorMatrix;
use crate::objective::cc_objective;
use crate::weights::SymmetricWeights;
use crate::zonotope::derive_seed;

/// Randomized pivot clustering, best of `restarts`.
///
/// Each restart repeatedly picks an unclustered item uniformly at random and
/// forms a cluster from it plus every unclustered item with strictly
/// positive similarity to it (weighted inputs are thresholded at zero;
/// `A_ij = 0` counts as dissimilar). Restarts use independent seed-derived
/// streams and the best is chosen by objective, ties to the earliest restart.
pub fn pivot(
    a: &SymmetricWeights,
    restarts: usize,
    seed: u64,
) -> Result<(Clustering, f64)> {
    if restarts == 0 {
        return Err(Error::InvalidInput("restarts must be >= 1".into()));
    }
    let n = a.n();
    let mut best: Option<(f64, Clustering)> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
        let mut labels = vec![usize::MAX; n];
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut next_label = 0;
        while !remaining.is_empty() {
            let pos = rng.gen_range(0..remaining.len());
            let p = remaining[pos];
            labels[p] = next_label;
            for &j in &remaining {
                if j != p && a.get(p, j) > 0.0 {
                    labels[j] = next_label;
                }
            }
            remaining.retain(|&j| labels[j] == usize::MAX);
            next_label += 1;
        }
        let c = Clustering::canonicalize(&labels)?;
        let value = cc_objective(a, &c)?;
        if best.as_ref().map_or(true, |(bv, _)| value > *bv) {
            best = Some((value, c));
        }
    }
    let (value, c) = best.expect("restarts >= 1");
    Ok((c, value))
}

/// Lloyd's k-means with k-means++ seeding, best of `restarts` by
/// within-cluster sum of squared distances.
///
/// Iterates to an assignment fixpoint or 300 rounds. A cluster emptied
/// during assignment is reseeded with the point farthest from its assigned
/// center (among clusters that can spare a point).
pub fn kmeans(
    v: &FactorMatrix,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<Clustering> {
    let n = v.n();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "k must satisfy 1 <= k <= n (got k = {k}, n = {n})"
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidInput("restarts must be >= 1".into()));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
        let (assignment, cost, _trace) = lloyd_once(v, k, &mut rng);
        if best.as_ref().map_or(true, |(bc, _)| cost < *bc) {
            best = Some((cost, assignment));
        }
    }
    Clustering::canonicalize(&best.expect("restarts >= 1").1)
}

const MAX_LLOYD_ITERS: usize = 300;

/// One seeded k-means run. Returns the final assignment, its cost, and the
/// per-iteration cost trace (used to check monotonicity).
fn lloyd_once<R: Rng>(v: &FactorMatrix, k: usize, rng: &mut R) -> (Vec<usize>, f64, Vec<f64>) {
    let n = v.n();
    let mut centers = seed_plus_plus(v, k, rng);
    let mut assignment = vec![0usize; n];
    let mut trace = Vec::new();

    for _ in 0..MAX_LLOYD_ITERS {
        let prev = assignment.clone();

        // Assign to the nearest center, ties to the lowest index.
        for (i, row) in v.rows().enumerate() {
            let mut best = 0;
            let mut best_d = sq_dist(row, &centers[0]);
            for (c, center) in centers.iter().enumerate().skip(1) {
                let dist = sq_dist(row, center);
                if dist < best_d {
                    best_d = dist;
                    best = c;
                }
            }
            assignment[i] = best;
        }

        // Reseed emptied clusters with the point farthest from its center.
        let mut counts = vec![0usize; k];
        for &c in &assignment {
            counts[c] += 1;
        }
        for empty in 0..k {
            if counts[empty] > 0 {
                continue;
            }
            let mut far: Option<(f64, usize)> = None;
            for (i, row) in v.rows().enumerate() {
                if counts[assignment[i]] < 2 {
                    continue;
                }
                let dist = sq_dist(row, &centers[assignment[i]]);
                if far.map_or(true, |(fd, _)| dist > fd) {
                    far = Some((dist, i));
                }
            }
            if let Some((_, i)) = far {
                counts[assignment[i]] -= 1;
                assignment[i] = empty;
                counts[empty] = 1;
            }
        }

        // Update centers to cluster means.
        for center in centers.iter_mut() {
            center.iter_mut().for_each(|x| *x = 0.0);
        }
        for (i, row) in v.rows().enumerate() {
            for (s, x) in centers[assignment[i]].iter_mut().zip(row) {
                *s += x;
            }
        }
        for (c, center) in centers.iter_mut().enumerate() {
            if counts[c] > 0 {
                center.iter_mut().for_each(|x| *x /= counts[c] as f64);
            }
        }

        let cost: f64 = v
            .rows()
            .enumerate()
            .map(|(i, row)| sq_dist(row, &centers[assignment[i]]))
            .sum();
        if let Some(&last) = trace.last() {
            debug_assert!(
                cost <= last + 1e-9 * f64::max(1.0, last),
                "k-means cost increased: {last} -> {cost}"
            );
        }
        trace.push(cost);

        if assignment == prev {
            break;
        }
    }
    let cost = *trace.last().expect("at least one iteration");
    (assignment, cost, trace)
}

/// k-means++ seeding: first center uniform, each next center sampled with
/// probability proportional to squared distance to the nearest chosen one.
fn seed_plus_plus<R: Rng>(v: &FactorMatrix, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = v.n();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    chosen.push(rng.gen_range(0..n));
    let mut dist2: Vec<f64> = v
        .rows()
        .map(|row| sq_dist(row, v.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = dist2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in dist2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // All remaining mass is zero (duplicate points); fall back to a
            // uniform unchosen index.
            let unchosen: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            unchosen[rng.gen_range(0..unchosen.len())]
        };
        chosen.push(next);
        for (i, row) in v.rows().enumerate() {
            let dist = sq_dist(row, v.row(next));
            if dist < dist2[i] {
                dist2[i] = dist;
            }
        }
    }
    chosen.into_iter().map(|i| v.row(i).to_vec()).collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::StandardNormal;

    #[test]
    fn pivot_recovers_perfect_blocks() {
        // Block-constant signs, no noise: every pivot absorbs exactly its block.
        let blocks = [0, 0, 1, 1, 1, 2, 2];
        let n = blocks.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    entries[i * n + j] = if blocks[i] == blocks[j] { 1.0 } else { -1.0 };
                }
            }
        }
        let a = SymmetricWeights::from_vec(n, entries).unwrap();
        let want = Clustering::canonicalize(&blocks.to_vec()).unwrap();
        for seed in 0..10 {
            let (c, _) = pivot(&a, 1, seed).unwrap();
            assert_eq!(c, want, "seed {seed}");
        }
    }

    #[test]
    fn pivot_single_item() {
        let a = SymmetricWeights::from_vec(1, vec![0.0]).unwrap();
        let (c, value) = pivot(&a, 3, 0).unwrap();
        assert_eq!(c.k(), 1);
        assert_eq!(value, 0.0);
    }

    #[test]
    fn pivot_rejects_zero_restarts() {
        let a = SymmetricWeights::from_vec(1, vec![0.0]).unwrap();
        assert!(pivot(&a, 0, 0).is_err());
    }

    #[test]
    fn pivot_cluster_members_are_similar_to_pivot() {
        // 0 entries count as dissimilar: the pivot keeps only A > 0 neighbors.
        let entries = vec![
            0.0, 0.0, 2.0, //
            0.0, 0.0, -1.0, //
            2.0, -1.0, 0.0,
        ];
        let a = SymmetricWeights::from_vec(3, entries).unwrap();
        for seed in 0..20 {
            let (c, _) = pivot(&a, 1, seed).unwrap();
            // 0 and 1 are never together: their similarity is exactly zero.
            assert!(!c.together(0, 1), "seed {seed}: {:?}", c.labels());
        }
    }

    #[test]
    fn pivot_restart_best_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let n = 8;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let x: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                entries[i * n + j] = x;
                entries[j * n + i] = x;
            }
        }
        let a = SymmetricWeights::from_vec(n, entries).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for r in [1, 2, 5, 20, 100] {
            let (_, value) = pivot(&a, r, 7).unwrap();
            assert!(value >= prev);
            prev = value;
        }
    }

    fn gaussian_factors(n: usize, d: usize, seed: u64) -> FactorMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
        FactorMatrix::from_vec(n, d, data).unwrap()
    }

    #[test]
    fn kmeans_k_equals_n_gives_singletons() {
        let v = gaussian_factors(6, 2, 3);
        let c = kmeans(&v, 6, 5, 1).unwrap();
        assert_eq!(c.k(), 6);
    }

    #[test]
    fn kmeans_k_one_single_cluster() {
        let v = gaussian_factors(5, 2, 4);
        let c = kmeans(&v, 1, 1, 1).unwrap();
        assert_eq!(c.k(), 1);
    }

    #[test]
    fn kmeans_rejects_bad_k() {
        let v = gaussian_factors(3, 2, 5);
        assert!(kmeans(&v, 4, 1, 0).is_err());
        assert!(kmeans(&v, 0, 1, 0).is_err());
    }

    #[test]
    fn kmeans_separated_blobs_recovered() {
        // Two blobs 10σ apart: every seeded run finds the split.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut rows = Vec::new();
        for i in 0..30 {
            let cx = if i < 15 { 0.0 } else { 10.0 };
            rows.push(vec![
                cx + rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            ]);
        }
        let v = FactorMatrix::from_rows(&rows).unwrap();
        let want: Vec<usize> = (0..30).map(|i| usize::from(i >= 15)).collect();
        let want = Clustering::canonicalize(&want).unwrap();
        for seed in 0..20 {
            let c = kmeans(&v, 2, 1, seed).unwrap();
            assert_eq!(c, want, "seed {seed}");
        }
    }

    #[test]
    fn kmeans_cost_trace_non_increasing() {
        let v = gaussian_factors(40, 3, 17);
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (_, _, trace) = lloyd_once(&v, 4, &mut rng);
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0), "trace: {trace:?}");
            }
        }
    }

    #[test]
    fn kmeans_duplicate_points_dont_crash() {
        let v = FactorMatrix::from_rows(&vec![vec![1.0, 1.0]; 5]).unwrap();
        let c = kmeans(&v, 3, 2, 0).unwrap();
        assert!(c.k() <= 3);
    }
}
