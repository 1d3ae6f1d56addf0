//! Randomized extremal-signing search over the signing zonotope.
//!
//! Every clustering of the `n` points into `d + 1` slots is encoded by a
//! signing: one ±1 entry per (point, slot-pair) triple. The generator matrix
//! has one length-`d²` column per triple, built by flattening the first `d`
//! columns of `v_i (e_a - e_b)ᵀ`. Signing a random direction `x` against the
//! generators (`σ = sign(Gᵀx)`) yields an extremal signing almost surely,
//! and decoding the per-point slot tournaments recovers the clustering. The
//! driver samples many signings and keeps the best-scoring clustering.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::clustering::{sum_points, Clustering};
use crate::error::{Error, Result};
use crate::factor::{dot, FactorMatrix};
use crate::objective::{merge_improving, vp_objective};

/// Generator matrix of the signing zonotope for a factor matrix.
///
/// Columns are indexed by triples `(i, a, b)` with `0 <= i < n` and
/// `1 <= a < b <= d + 1`, point index outermost. The column for `(i, a, b)`
/// is the length-`d²` flattening of the first `d` columns of
/// `v_i (e_a - e_b)ᵀ`: block `a` holds `+v_i`, block `b` holds `-v_i`, and
/// the block for slot `d + 1` is dropped.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    factors: FactorMatrix,
    pairs: Vec<(usize, usize)>, // slot pairs (a, b), 1-based, a < b
}

impl GeneratorMatrix {
    pub fn n(&self) -> usize {
        self.factors.n()
    }

    pub fn d(&self) -> usize {
        self.factors.d()
    }

    /// Number of slot pairs per point: `(d + 1) d / 2`.
    pub fn pairs_per_point(&self) -> usize {
        self.pairs.len()
    }

    /// Total column count `M = n (d + 1) d / 2`.
    pub fn m(&self) -> usize {
        self.n() * self.pairs.len()
    }

    pub fn factors(&self) -> &FactorMatrix {
        &self.factors
    }

    /// Column position of triple `(i, a, b)`; slots are 1-based with `a < b`.
    pub fn column_index(&self, i: usize, a: usize, b: usize) -> usize {
        debug_assert!(i < self.n() && a >= 1 && a < b && b <= self.d() + 1);
        let offset = self
            .pairs
            .iter()
            .position(|&p| p == (a, b))
            .expect("valid slot pair");
        i * self.pairs.len() + offset
    }

    /// Triple `(i, a, b)` stored at a column position.
    pub fn column_triple(&self, col: usize) -> (usize, usize, usize) {
        let (i, off) = (col / self.pairs.len(), col % self.pairs.len());
        let (a, b) = self.pairs[off];
        (i, a, b)
    }

    /// Materialize one dense length-`d²` column. Blocks are laid out
    /// column-major: entries `(a-1)d .. ad` belong to slot `a`.
    pub fn column(&self, col: usize) -> Vec<f64> {
        let d = self.d();
        let (i, a, b) = self.column_triple(col);
        let mut out = vec![0.0; d * d];
        let vi = self.factors.row(i);
        out[(a - 1) * d..a * d].copy_from_slice(vi);
        if b <= d {
            for (slot, x) in out[(b - 1) * d..b * d].iter_mut().zip(vi) {
                *slot = -x;
            }
        }
        out
    }
}

/// Build the signing-zonotope generator matrix for `v`.
pub fn build_generators(v: &FactorMatrix) -> GeneratorMatrix {
    let d = v.d();
    let mut pairs = Vec::with_capacity((d + 1) * d / 2);
    for a in 1..=d {
        for b in (a + 1)..=(d + 1) {
            pairs.push((a, b));
        }
    }
    GeneratorMatrix {
        factors: v.clone(),
        pairs,
    }
}

/// A ±1 signing of the generator columns, indexed like the columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signing {
    n: usize,
    d: usize,
    signs: Vec<i8>,
}

impl Signing {
    /// Wrap raw signs; the length must be `n (d + 1) d / 2` and every entry ±1.
    pub fn new(n: usize, d: usize, signs: Vec<i8>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidInput(
                "signing requires n >= 1 and d >= 1".into(),
            ));
        }
        let expect = n * (d + 1) * d / 2;
        if signs.len() != expect {
            return Err(Error::SizeMismatch(format!(
                "signing has {} entries, expected {expect} for n = {n}, d = {d}",
                signs.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("signing entries must be ±1".into()));
        }
        Ok(Self { n, d, signs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.signs
    }

    /// Entry for point `i` and slot pair `(a, b)`, extended to `b < a` by the
    /// antisymmetry convention `σ_{b,a} = -σ_{a,b}`.
    pub fn get(&self, i: usize, a: usize, b: usize) -> i8 {
        debug_assert!(a != b && a >= 1 && b >= 1 && a <= self.d + 1 && b <= self.d + 1);
        let ppp = (self.d + 1) * self.d / 2;
        if a < b {
            self.signs[i * ppp + pair_offset(self.d, a, b)]
        } else {
            -self.signs[i * ppp + pair_offset(self.d, b, a)]
        }
    }
}

fn pair_offset(d: usize, a: usize, b: usize) -> usize {
    // pairs (a, b), a < b <= d+1 in lexicographic order
    (a - 1) * (2 * (d + 1) - a) / 2 + (b - a - 1)
}

/// Per-point projections of the points onto the reshaped direction `x`.
///
/// `x` (length `d²`) is read as `d` stacked columns `x̃_1 .. x̃_d`, extended by
/// `x̃_{d+1} = 0`; the value for `(i, a)` is `v_i · x̃_a`. The signing entry
/// for `(i, a, b)` is the sign of the difference of two projections, which
/// is exactly `sign(Gᵀx)` for the corresponding column without ever forming
/// `G` densely.
fn projections(v: &FactorMatrix, x: &[f64]) -> Vec<f64> {
    let (n, d) = (v.n(), v.d());
    debug_assert_eq!(x.len(), d * d);
    let mut p = vec![0.0; n * (d + 1)];
    for (i, row) in v.rows().enumerate() {
        for a in 0..d {
            p[i * (d + 1) + a] = dot(row, &x[a * d..(a + 1) * d]);
        }
        // slot d+1 projects to zero
    }
    p
}

/// Compute `σ = sign(Gᵀx)` for an explicit direction `x` of length `d²`,
/// with `sign(0) := +1`. Runs in `O(n d²)` using the projection identity.
pub fn signing_from_direction(g: &GeneratorMatrix, x: &[f64]) -> Result<Signing> {
    let (n, d) = (g.n(), g.d());
    if x.len() != d * d {
        return Err(Error::SizeMismatch(format!(
            "direction has length {}, expected d² = {}",
            x.len(),
            d * d
        )));
    }
    let p = projections(g.factors(), x);
    let mut signs = Vec::with_capacity(g.m());
    for i in 0..n {
        let base = i * (d + 1);
        for &(a, b) in &g.pairs {
            let diff = p[base + a - 1] - p[base + b - 1];
            signs.push(if diff >= 0.0 { 1 } else { -1 });
        }
    }
    Signing::new(n, d, signs)
}

/// Draw a standard-normal direction in `R^{d²}` and sign the generators.
pub fn sample_signing<R: Rng>(g: &GeneratorMatrix, rng: &mut R) -> Signing {
    let d = g.d();
    let x: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
    signing_from_direction(g, &x).expect("direction has the right length")
}

/// Decode a signing into a clustering of the `n` points.
///
/// For an extremal signing each point has a unique slot that wins every
/// pairwise comparison, and that slot is the point's cluster. Degenerate
/// signings fall back to the slot with the most wins (Copeland score), ties
/// broken by the smallest slot index. The result is canonicalized.
pub fn decode_clustering(sigma: &Signing) -> Clustering {
    let (n, d) = (sigma.n(), sigma.d());
    let slots = d + 1;
    let ppp = slots * d / 2;
    let mut raw = Vec::with_capacity(n);
    let mut wins = vec![0usize; slots];
    for i in 0..n {
        wins.fill(0);
        let base = i * ppp;
        let mut off = 0;
        for a in 0..slots {
            for b in (a + 1)..slots {
                if sigma.as_slice()[base + off] == 1 {
                    wins[a] += 1;
                } else {
                    wins[b] += 1;
                }
                off += 1;
            }
        }
        // The all-wins slot scores d; otherwise take the Copeland winner,
        // ties to the smallest slot index.
        let mut best = 0;
        for (slot, &w) in wins.iter().enumerate() {
            if w > wins[best] {
                best = slot;
            }
        }
        raw.push(best);
    }
    Clustering::canonicalize(&raw).expect("n >= 1 by construction")
}

/// Result of the randomized signing search.
#[derive(Debug, Clone)]
pub struct ZonoccResult {
    pub clustering: Clustering,
    pub vp_objective: f64,
    pub cc_objective: f64,
    /// Number of sampling rounds that improved on the running best.
    pub improvements: usize,
}

/// Randomized signing search: run `iterations` sample→decode→evaluate rounds
/// and return the best clustering found.
///
/// The running best starts at the single-cluster score, so the output never
/// falls below that baseline. Whenever a sampled clustering improves the raw
/// best, its sum-point merge is evaluated as well, and the final answer is
/// the best merged candidate seen. Deterministic for a fixed seed.
pub fn zonocc(v: &FactorMatrix, iterations: usize, seed: u64) -> Result<ZonoccResult> {
    zonocc_threaded(v, iterations, seed, 1)
}

/// Parallel [`zonocc`]: iterations are split into `threads` contiguous
/// chunks, each driven by its own seed-derived substream. The reduction
/// prefers higher objective, then the earlier global iteration, so a run is
/// reproducible for a fixed `(seed, threads)` pair.
pub fn zonocc_threaded(
    v: &FactorMatrix,
    iterations: usize,
    seed: u64,
    threads: usize,
) -> Result<ZonoccResult> {
    if iterations == 0 {
        return Err(Error::InvalidInput("iterations must be >= 1".into()));
    }
    let threads = threads.max(1).min(iterations);
    let g = build_generators(v);

    let single = Clustering::single_cluster(v.n())?;
    let single_score = vp_objective(v, &single)?;

    struct Candidate {
        value: f64,
        order: (usize, usize), // (global iteration, tie rank) for determinism
        clustering: Clustering,
        improvements: usize,
    }

    let run_chunk = |worker: usize, count: usize| -> Result<Candidate> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, worker as u64));
        let mut raw_best = single_score;
        let mut best = Candidate {
            value: single_score,
            order: (usize::MAX, usize::MAX),
            clustering: single.clone(),
            improvements: 0,
        };
        for it in 0..count {
            let sigma = sample_signing(&g, &mut rng);
            let c = decode_clustering(&sigma);
            let value = sum_points(v, &c)?.squared_norm_total();
            if value > raw_best {
                raw_best = value;
                best.improvements += 1;
                let merged = merge_improving(v, &c, false)?;
                let merged_value = vp_objective(v, &merged)?;
                let (value, clustering) = if merged_value > value {
                    (merged_value, merged)
                } else {
                    (value, c)
                };
                if value > best.value {
                    best = Candidate {
                        value,
                        order: (worker, it),
                        clustering,
                        improvements: best.improvements,
                    };
                }
            }
        }
        Ok(best)
    };

    let chunk = iterations / threads;
    let extra = iterations % threads;
    let counts: Vec<usize> = (0..threads)
        .map(|w| chunk + usize::from(w < extra))
        .collect();

    let candidates: Vec<Candidate> = if threads == 1 {
        vec![run_chunk(0, iterations)?]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = counts
                .iter()
                .enumerate()
                .map(|(w, &count)| {
                    let run = &run_chunk;
                    scope.spawn(move || run(w, count))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect::<Result<Vec<_>>>()
        })?
    };

    let improvements = candidates.iter().map(|c| c.improvements).sum();
    let best = candidates
        .into_iter()
        .reduce(|acc, c| {
            if c.value > acc.value || (c.value == acc.value && c.order < acc.order) {
                c
            } else {
                acc
            }
        })
        .expect("at least one worker");

    let vp = best.value;
    // HalfWay identity: cc on V Vᵀ equals (vp − Σ‖v_i‖²) / 2.
    let cc = 0.5 * (vp - v.squared_norm_sum());
    Ok(ZonoccResult {
        clustering: best.clustering,
        vp_objective: vp,
        cc_objective: cc,
        improvements,
    })
}

/// Deterministic per-stream seed derivation (splitmix64 over seed and stream).
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}
