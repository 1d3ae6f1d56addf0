//! The two equivalent clustering objectives and the sum-point merge step.
//!
//! For a factor matrix `V` the vector-partition objective is `Σ_i ‖S_i‖²`
//! over cluster sum points. For a weight matrix `A` the clustering objective
//! is the similarity weight captured inside clusters, `Σ_{i<j} A_ij` over
//! same-cluster pairs. When `A = V Vᵀ` the two are tied together by
//!
//! ```text
//! 2 * cc_objective(V Vᵀ, C) + Σ_i ‖v_i‖² = vp_objective(V, C)
//! ```
//!
//! so they are maximized by the same partitions. `cc_objective` differs from
//! the cut form `-Σ_{i<j} A_ij d_ij` only by the constant `Σ_{i<j} A_ij`.
//! The diagonal of `A` is never read.

use crate::clustering::{sum_points, Clustering};
use crate::error::Result;
use crate::factor::FactorMatrix;
use crate::weights::SymmetricWeights;

/// `Σ_i ‖S_i‖²` over the cluster sum points of `c`.
pub fn vp_objective(v: &FactorMatrix, c: &Clustering) -> Result<f64> {
    Ok(sum_points(v, c)?.squared_norm_total())
}

/// Similarity weight kept inside clusters: `Σ_{i<j} A_ij` over pairs with
/// `labels[i] == labels[j]`.
pub fn cc_objective(a: &SymmetricWeights, c: &Clustering) -> Result<f64> {
    c.check_n(a.n())?;
    let n = a.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if c.together(i, j) {
                total += a.get(i, j);
            }
        }
    }
    Ok(total)
}

/// Total weight of agreements: `Σ_{i<j} w⁺_ij (1 - d_ij) + Σ_{i<j} w⁻_ij d_ij`.
///
/// Exceeds `cc_objective` by the constant `Σ_{i<j} w⁻_ij` for every clustering.
pub fn agreement_weight(a: &SymmetricWeights, c: &Clustering) -> Result<f64> {
    c.check_n(a.n())?;
    let n = a.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += if c.together(i, j) {
                a.pos_part(i, j)
            } else {
                a.neg_part(i, j)
            };
        }
    }
    Ok(total)
}

/// Greedily merge cluster pairs whose sum points have positive dot product,
/// largest product first, until all pairs are non-positive. Each merge raises
/// the vector-partition objective by `2 S_iᵀS_j > 0`.
///
/// With `collapse_orthogonal` set, pairs with exactly zero dot product are
/// merged as well (the objective is unchanged); a fixed point then has
/// strictly negative pairwise products, which caps the cluster count at
/// `d + 1`.
pub fn merge_improving(
    v: &FactorMatrix,
    c: &Clustering,
    collapse_orthogonal: bool,
) -> Result<Clustering> {
    c.check_n(v.n())?;
    let d = v.d();
    let s = sum_points(v, c)?;
    let mut sums: Vec<Vec<f64>> = (0..s.k()).map(|i| s.point(i).to_vec()).collect();
    // group[g] = current cluster slot of original cluster g
    let mut group: Vec<usize> = (0..s.k()).collect();
    let mut alive: Vec<bool> = vec![true; s.k()];

    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..sums.len() {
            if !alive[i] {
                continue;
            }
            for j in (i + 1)..sums.len() {
                if !alive[j] {
                    continue;
                }
                let dot = crate::factor::dot(&sums[i], &sums[j]);
                let mergeable = if collapse_orthogonal { dot >= 0.0 } else { dot > 0.0 };
                if mergeable && best.map_or(true, |(b, _, _)| dot > b) {
                    best = Some((dot, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let (a, b) = sums.split_at_mut(j);
        for (x, y) in a[i].iter_mut().zip(&b[0]) {
            *x += y;
        }
        alive[j] = false;
        for g in group.iter_mut() {
            if *g == j {
                *g = i;
            }
        }
        debug_assert_eq!(sums[i].len(), d);
    }

    let labels: Vec<usize> = c.labels().iter().map(|&l| group[l]).collect();
    Clustering::canonicalize(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(rows: &[&[f64]]) -> FactorMatrix {
        FactorMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn vp_singletons_is_norm_sum() {
        let v = factors(&[&[1.0, 2.0], &[3.0, -1.0], &[0.5, 0.5]]);
        let c = Clustering::singletons(3).unwrap();
        let vp = vp_objective(&v, &c).unwrap();
        assert!((vp - v.squared_norm_sum()).abs() < 1e-12);
    }

    #[test]
    fn vp_direct_arithmetic() {
        // rows (1), (2), (-3); partition {1,2 | 3} gives 3² + (−3)² = 18
        let v = factors(&[&[1.0], &[2.0], &[-3.0]]);
        let c = Clustering::canonicalize(&[0, 0, 1]).unwrap();
        assert_eq!(vp_objective(&v, &c).unwrap(), 18.0);
    }

    #[test]
    fn cc_matches_halfway_identity() {
        let v = factors(&[&[1.0, -0.5], &[2.0, 1.0], &[-3.0, 0.25], &[0.1, 0.9]]);
        let a = v.gram();
        for raw in [vec![0, 0, 1, 1], vec![0, 1, 2, 3], vec![0, 0, 0, 0]] {
            let c = Clustering::canonicalize(&raw).unwrap();
            let cc = cc_objective(&a, &c).unwrap();
            let vp = vp_objective(&v, &c).unwrap();
            let expected = 0.5 * (vp - v.squared_norm_sum());
            assert!(
                (cc - expected).abs() <= 1e-9 * expected.abs().max(1.0),
                "cc = {cc}, expected {expected}"
            );
        }
    }

    #[test]
    fn cc_brute_force_optimum_is_maximal() {
        // n = 6 fixed pseudo-random A; enumerate all partitions with a test-local
        // enumerator and check the reported optimum matches the maximum.
        let n = 6;
        let mut entries = vec![0.0; n * n];
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for i in 0..n {
            for j in (i + 1)..n {
                let x = next();
                entries[i * n + j] = x;
                entries[j * n + i] = x;
            }
        }
        let a = SymmetricWeights::from_vec(n, entries).unwrap();

        let mut best = f64::NEG_INFINITY;
        let mut labels = vec![0usize; n];
        enumerate_partitions(&mut labels, 1, 0, &mut |l| {
            let c = Clustering::canonicalize(l).unwrap();
            let val = cc_objective(&a, &c).unwrap();
            if val > best {
                best = val;
            }
        });
        let (c_opt, opt) = crate::exact::brute_force_weights(&a, None).unwrap();
        assert!((opt - best).abs() <= 1e-12 * best.abs().max(1.0));
        assert!((cc_objective(&a, &c_opt).unwrap() - best).abs() <= 1e-12 * best.abs().max(1.0));
    }

    // Test-local recursive set-partition enumerator, independent of the
    // restricted-growth-string implementation in `exact`.
    fn enumerate_partitions(
        labels: &mut Vec<usize>,
        next_free: usize,
        pos: usize,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if pos == labels.len() {
            visit(labels);
            return;
        }
        for id in 0..=next_free.min(pos) {
            labels[pos] = id;
            let nf = next_free.max(id + 1);
            enumerate_partitions(labels, nf, pos + 1, visit);
        }
    }

    #[test]
    fn agreement_all_positive_single_cluster() {
        let a = SymmetricWeights::from_vec(3, vec![0.0, 2.0, 1.0, 2.0, 0.0, 3.0, 1.0, 3.0, 0.0])
            .unwrap();
        let c = Clustering::single_cluster(3).unwrap();
        assert_eq!(agreement_weight(&a, &c).unwrap(), 6.0);
    }

    #[test]
    fn agreement_perfect_sign_split() {
        let v = factors(&[&[1.0], &[2.0], &[-3.0]]);
        let a = v.gram();
        let c = Clustering::canonicalize(&[0, 0, 1]).unwrap();
        // 2 + 3 + 6 = Σ_{i<j} |A_ij|
        assert_eq!(agreement_weight(&a, &c).unwrap(), 11.0);
    }

    #[test]
    fn agreement_minus_cc_is_constant_shift() {
        let a = SymmetricWeights::from_vec(
            4,
            vec![
                0.0, 1.5, -2.0, 0.5, 1.5, 0.0, 3.0, -1.0, -2.0, 3.0, 0.0, 0.25, 0.5, -1.0, 0.25,
                0.0,
            ],
        )
        .unwrap();
        let mut neg_total = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                neg_total += a.neg_part(i, j);
            }
        }
        for raw in [vec![0, 1, 0, 1], vec![0, 0, 0, 0], vec![0, 1, 2, 3], vec![0, 0, 1, 0]] {
            let c = Clustering::canonicalize(&raw).unwrap();
            let shift =
                agreement_weight(&a, &c).unwrap() - cc_objective(&a, &c).unwrap();
            assert!((shift - neg_total).abs() < 1e-12);
        }
    }

    #[test]
    fn objectives_ignore_diagonal() {
        let a = SymmetricWeights::from_vec(3, vec![0.0, 1.0, -2.0, 1.0, 0.0, 0.5, -2.0, 0.5, 0.0])
            .unwrap();
        let b = a.with_shifted_diagonal(123.456);
        for raw in [vec![0, 0, 1], vec![0, 1, 2], vec![0, 0, 0]] {
            let c = Clustering::canonicalize(&raw).unwrap();
            assert_eq!(
                cc_objective(&a, &c).unwrap(),
                cc_objective(&b, &c).unwrap()
            );
            assert_eq!(
                agreement_weight(&a, &c).unwrap(),
                agreement_weight(&b, &c).unwrap()
            );
        }
    }

    #[test]
    fn merge_combines_positive_pair() {
        // Sum points (1,0) and (2,0): objective rises from 5 to 9.
        let v = factors(&[&[1.0, 0.0], &[2.0, 0.0]]);
        let c = Clustering::singletons(2).unwrap();
        assert_eq!(vp_objective(&v, &c).unwrap(), 5.0);
        let merged = merge_improving(&v, &c, false).unwrap();
        assert_eq!(merged.k(), 1);
        assert_eq!(vp_objective(&v, &merged).unwrap(), 9.0);
    }

    #[test]
    fn merge_keeps_non_positive_fixed_point() {
        // 120° unit vectors: pairwise dot -1/2, nothing merges.
        let s3 = 3f64.sqrt() / 2.0;
        let v = factors(&[&[1.0, 0.0], &[-0.5, s3], &[-0.5, -s3]]);
        let c = Clustering::singletons(3).unwrap();
        let merged = merge_improving(&v, &c, false).unwrap();
        assert_eq!(merged, c);
    }

    #[test]
    fn merge_orthogonal_only_with_flag() {
        let v = factors(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let c = Clustering::singletons(2).unwrap();
        let plain = merge_improving(&v, &c, false).unwrap();
        assert_eq!(plain.k(), 2);
        let collapsed = merge_improving(&v, &c, true).unwrap();
        assert_eq!(collapsed.k(), 1);
        assert_eq!(
            vp_objective(&v, &collapsed).unwrap(),
            vp_objective(&v, &c).unwrap()
        );
    }

    #[test]
    fn merge_never_decreases_objective() {
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for trial in 0..50 {
            let n = 3 + trial % 6;
            let d = 1 + trial % 3;
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| next()).collect()).collect();
            let v = FactorMatrix::from_rows(&rows).unwrap();
            let raw: Vec<usize> = (0..n)
                .map(|_| (next().abs() * n as f64) as usize % n)
                .collect();
            let c = Clustering::canonicalize(&raw).unwrap();
            let before = vp_objective(&v, &c).unwrap();
            let after = vp_objective(&v, &merge_improving(&v, &c, false).unwrap()).unwrap();
            assert!(after >= before - 1e-12 * before.abs().max(1.0));
        }
    }
}
