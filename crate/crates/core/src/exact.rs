//! Exact solvers: a desk-scale brute-force oracle over all set partitions,
//! the rank-1 sign split, and an `O(n³)` angular-sweep solver for rank 2.

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::factor::{dot, FactorMatrix};
use crate::objective::{cc_objective, merge_improving, vp_objective};
use crate::weights::SymmetricWeights;

/// Largest `n` the brute-force oracle accepts. Bell(13) is about 2.8e7
/// partitions; anything larger is not a desk-scale computation.
pub const BRUTE_FORCE_LIMIT: usize = 13;

/// Enumerate every partition of `n` items as restricted-growth strings,
/// optionally capped at `max_parts` clusters, and return the maximizer of
/// `cc_objective`. Among ties the first partition in enumeration order wins.
pub fn brute_force_weights(
    a: &SymmetricWeights,
    max_clusters: Option<usize>,
) -> Result<(Clustering, f64)> {
    let n = a.n();
    check_oracle_size(n)?;
    let max_parts = max_clusters.unwrap_or(n).min(n).max(1);

    // Incremental objective: assigning item i to cluster c adds
    // Σ_{j in c} A_ij to the running same-cluster weight.
    let mut labels = vec![0usize; n];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); max_parts];
    let mut best_value = f64::NEG_INFINITY;
    let mut best_labels = vec![0usize; n];

    fn recurse(
        a: &SymmetricWeights,
        i: usize,
        k_used: usize,
        value: f64,
        max_parts: usize,
        labels: &mut Vec<usize>,
        members: &mut Vec<Vec<usize>>,
        best_value: &mut f64,
        best_labels: &mut Vec<usize>,
    ) {
        let n = a.n();
        if i == n {
            if value > *best_value {
                *best_value = value;
                best_labels.copy_from_slice(labels);
            }
            return;
        }
        let reach = (k_used + 1).min(max_parts);
        for c in 0..reach {
            let delta: f64 = members[c].iter().map(|&j| a.get(j, i)).sum();
            labels[i] = c;
            members[c].push(i);
            recurse(
                a,
                i + 1,
                k_used.max(c + 1),
                value + delta,
                max_parts,
                labels,
                members,
                best_value,
                best_labels,
            );
            members[c].pop();
        }
    }

    recurse(
        a,
        0,
        0,
        0.0,
        max_parts,
        &mut labels,
        &mut members,
        &mut best_value,
        &mut best_labels,
    );

    let clustering = Clustering::canonicalize(&best_labels)?;
    let value = cc_objective(a, &clustering)?;
    Ok((clustering, value))
}

/// Brute force over partitions of the rows of `v`, maximizing the
/// vector-partition objective. By the sum-point identity the maximizers
/// coincide with those of `cc_objective` on `V Vᵀ`, and an optimal partition
/// with at most `d + 1` clusters always exists, so the search is pruned to
/// `d + 2` parts by default (one slack part for orthogonal sum-point ties).
pub fn brute_force_factors(
    v: &FactorMatrix,
    max_clusters: Option<usize>,
) -> Result<(Clustering, f64)> {
    let n = v.n();
    let d = v.d();
    check_oracle_size(n)?;
    let max_parts = max_clusters.unwrap_or(d + 2).min(n).max(1);

    let mut labels = vec![0usize; n];
    let mut sums: Vec<Vec<f64>> = vec![vec![0.0; d]; max_parts];
    let mut best_value = f64::NEG_INFINITY;
    let mut best_labels = vec![0usize; n];

    // Assigning v_i to cluster c changes Σ‖S‖² by 2 v_i·S_c + ‖v_i‖².
    fn recurse(
        v: &FactorMatrix,
        i: usize,
        k_used: usize,
        value: f64,
        max_parts: usize,
        labels: &mut Vec<usize>,
        sums: &mut Vec<Vec<f64>>,
        best_value: &mut f64,
        best_labels: &mut Vec<usize>,
    ) {
        let n = v.n();
        if i == n {
            if value > *best_value {
                *best_value = value;
                best_labels.copy_from_slice(labels);
            }
            return;
        }
        let vi = v.row(i);
        let norm2 = dot(vi, vi);
        let reach = (k_used + 1).min(max_parts);
        for c in 0..reach {
            let delta = 2.0 * dot(vi, &sums[c]) + norm2;
            labels[i] = c;
            for (s, x) in sums[c].iter_mut().zip(vi) {
                *s += x;
            }
            recurse(
                v,
                i + 1,
                k_used.max(c + 1),
                value + delta,
                max_parts,
                labels,
                sums,
                best_value,
                best_labels,
            );
            for (s, x) in sums[c].iter_mut().zip(vi) {
                *s -= x;
            }
        }
    }

    recurse(
        v,
        0,
        0,
        0.0,
        max_parts,
        &mut labels,
        &mut sums,
        &mut best_value,
        &mut best_labels,
    );

    let clustering = Clustering::canonicalize(&best_labels)?;
    let value = vp_objective(v, &clustering)?;
    Ok((clustering, value))
}

fn check_oracle_size(n: usize) -> Result<()> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLargeForOracle {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(())
}

/// Two clusters by sign of the rank-1 factor: a perfect clustering of
/// `A = v vᵀ`. Zero entries join the nonnegative cluster; if all entries
/// share a sign the result is a single cluster.
pub fn rank1_psd_solve(v: &[f64]) -> Result<Clustering> {
    let raw: Vec<usize> = v.iter().map(|&x| usize::from(x < 0.0)).collect();
    Clustering::canonicalize(&raw)
}

/// Exact rank-2 solver by angular sweep.
///
/// Sorts the nonzero points by `atan2` angle, then enumerates every split of
/// the circular order into at most three contiguous arcs; each optimal
/// cluster occupies a convex cone, hence a contiguous angular sector, so the
/// sweep covers an optimal partition. Arc sums come from circular prefix
/// sums, making each candidate O(1) to score.
pub fn rank2_psd_solve(v: &FactorMatrix) -> Result<(Clustering, f64)> {
    rank2_psd_solve_threaded(v, 1)
}

/// Parallel variant of [`rank2_psd_solve`]: the three-arc enumeration is
/// partitioned across workers by first cut position. Candidates carry a
/// total enumeration rank, and the reduction takes the best value with the
/// smallest rank, so the result is independent of the worker count.
pub fn rank2_psd_solve_threaded(v: &FactorMatrix, threads: usize) -> Result<(Clustering, f64)> {
    if v.d() != 2 {
        return Err(Error::InvalidInput(format!(
            "rank-2 solver requires d = 2 (got d = {})",
            v.d()
        )));
    }
    let threads = threads.max(1);
    let n = v.n();

    let nonzero: Vec<usize> = (0..n).filter(|&i| v.row(i) != [0.0, 0.0]).collect();
    let m = nonzero.len();
    if m == 0 {
        let c = Clustering::single_cluster(n)?;
        let value = vp_objective(v, &c)?;
        return Ok((c, value));
    }

    // Angular order; stable on exact ties so collinear points stay adjacent.
    let mut order = nonzero.clone();
    order.sort_by(|&a, &b| {
        let ta = v.row(a)[1].atan2(v.row(a)[0]);
        let tb = v.row(b)[1].atan2(v.row(b)[0]);
        ta.partial_cmp(&tb).unwrap().then(a.cmp(&b))
    });

    // prefix[t] = sum of the first t sorted points.
    let mut prefix = vec![[0.0f64; 2]; m + 1];
    for (t, &idx) in order.iter().enumerate() {
        let r = v.row(idx);
        prefix[t + 1] = [prefix[t][0] + r[0], prefix[t][1] + r[1]];
    }
    let total = prefix[m];

    let arc_sum = move |prefix: &[[f64; 2]], a: usize, b: usize| -> [f64; 2] {
        // sum over sorted positions [a, b) with a <= b <= m
        [prefix[b][0] - prefix[a][0], prefix[b][1] - prefix[a][1]]
    };
    let sq = |s: [f64; 2]| s[0] * s[0] + s[1] * s[1];

    // Candidate ranks: 0 = single arc, then two-arc cuts in lexicographic
    // order, then three-arc cuts in lexicographic order.
    let two_arc_base = 1u64;
    let two_arc_count = (m as u64) * (m as u64 - 1) / 2;
    let three_arc_base = two_arc_base + two_arc_count;

    #[derive(Clone, Copy)]
    struct Best {
        value: f64,
        rank: u64,
        cuts: [usize; 3],
        arcs: usize,
    }

    let eval_serial_part = |prefix: &[[f64; 2]]| -> Best {
        let mut best = Best {
            value: sq(total),
            rank: 0,
            cuts: [0, 0, 0],
            arcs: 1,
        };
        let mut rank = two_arc_base;
        for c1 in 0..m {
            for c2 in (c1 + 1)..m {
                let s1 = arc_sum(prefix, c1, c2);
                let s2 = [total[0] - s1[0], total[1] - s1[1]];
                let value = sq(s1) + sq(s2);
                if value > best.value {
                    best = Best {
                        value,
                        rank,
                        cuts: [c1, c2, 0],
                        arcs: 2,
                    };
                }
                rank += 1;
            }
        }
        best
    };

    // Rank of the first three-arc candidate with leading cut c1.
    let three_rank_start = |c1: usize| -> u64 {
        // count of triples (a, b, c) with a < c1
        let mut count = 0u64;
        for a in 0..c1 {
            let rest = (m - a - 1) as u64;
            count += rest * (rest - 1) / 2;
        }
        three_arc_base + count
    };

    let eval_three_arcs = |prefix: &[[f64; 2]], c1_range: std::ops::Range<usize>| -> Option<Best> {
        let mut best: Option<Best> = None;
        for c1 in c1_range {
            let mut rank = three_rank_start(c1);
            for c2 in (c1 + 1)..m {
                let s1 = arc_sum(prefix, c1, c2);
                let q1 = sq(s1);
                for c3 in (c2 + 1)..m {
                    let s2 = arc_sum(prefix, c2, c3);
                    let s3 = [
                        total[0] - s1[0] - s2[0],
                        total[1] - s1[1] - s2[1],
                    ];
                    let value = q1 + sq(s2) + sq(s3);
                    if best.map_or(true, |b| value > b.value) {
                        best = Some(Best {
                            value,
                            rank,
                            cuts: [c1, c2, c3],
                            arcs: 3,
                        });
                    }
                    rank += 1;
                }
            }
        }
        best
    };

    let mut candidates: Vec<Best> = Vec::new();
    if threads == 1 || m < 16 {
        candidates.push(eval_serial_part(&prefix));
        if let Some(b) = eval_three_arcs(&prefix, 0..m) {
            candidates.push(b);
        }
    } else {
        let chunk = m.div_ceil(threads);
        let prefix_ref = &prefix;
        let results: Vec<Option<Best>> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..threads {
                let lo = (w * chunk).min(m);
                let hi = ((w + 1) * chunk).min(m);
                handles.push(scope.spawn(move || eval_three_arcs(prefix_ref, lo..hi)));
            }
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        candidates.push(eval_serial_part(&prefix));
        candidates.extend(results.into_iter().flatten());
    }

    let best = candidates
        .into_iter()
        .reduce(|acc, b| {
            if b.value > acc.value || (b.value == acc.value && b.rank < acc.rank) {
                b
            } else {
                acc
            }
        })
        .expect("at least the single-arc candidate exists");

    // Arc t (counting from cut c1) becomes cluster t; zero vectors join
    // cluster 0, which leaves every sum point unchanged.
    let mut labels = vec![0usize; n];
    match best.arcs {
        1 => {}
        2 => {
            let [c1, c2, _] = best.cuts;
            for t in 0..m {
                let pos = (t + m - c1) % m; // position relative to c1 around the circle
                let in_first = pos < c2 - c1;
                labels[order[t]] = usize::from(!in_first);
            }
        }
        _ => {
            let [c1, c2, c3] = best.cuts;
            for t in 0..m {
                let pos = (t + m - c1) % m;
                labels[order[t]] = if pos < c2 - c1 {
                    0
                } else if pos < c3 - c1 {
                    1
                } else {
                    2
                };
            }
        }
    }

    let clustering = Clustering::canonicalize(&labels)?;
    let merged = merge_improving(v, &clustering, false)?;
    let value = vp_objective(v, &merged)?;
    Ok((merged, value))
}
