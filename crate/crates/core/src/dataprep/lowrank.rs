//! PSD low-rank factorization of symmetric weight matrices, and the diagonal
//! shift that makes an indefinite matrix positive definite without touching
//! any objective value.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::factor::FactorMatrix;
use crate::weights::SymmetricWeights;

/// Output of [`lowrank_psd_factor`]: the factor matrix plus the full
/// spectrum of the symmetrized input (descending), for error reporting.
#[derive(Debug, Clone)]
pub struct LowRankFactorization {
    pub factors: FactorMatrix,
    /// All eigenvalues of `(A + Aᵀ)/2`, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Number of factor columns actually kept (less than requested when
    /// fewer strictly positive eigenvalues exist).
    pub kept: usize,
}

impl LowRankFactorization {
    /// `‖A_sym − V Vᵀ‖_F` predicted from the discarded spectrum:
    /// the square root of the sum of squared dropped eigenvalues.
    pub fn predicted_residual(&self) -> f64 {
        self.eigenvalues[self.kept..]
            .iter()
            .map(|l| l * l)
            .sum::<f64>()
            .sqrt()
    }
}

/// Keep the `d` largest strictly positive eigenvalues of `(A + Aᵀ)/2` and
/// return `V = U √Λ`, the best rank-`d` PSD approximation among eigenvalue
/// truncations. Each column's largest-magnitude entry is made nonnegative so
/// the factorization is deterministic.
pub fn lowrank_psd_factor(a: &SymmetricWeights, d: usize) -> Result<LowRankFactorization> {
    if d == 0 {
        return Err(Error::InvalidInput("rank must be >= 1".into()));
    }
    let n = a.n();
    let sym = a.symmetrized();
    let eig = DMatrix::from_row_slice(n, n, sym.as_slice()).symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let positive = eigenvalues.iter().take_while(|&&l| l > 0.0).count();
    if positive == 0 {
        return Err(Error::NoPsdComponent);
    }
    let kept = d.min(positive);

    let mut data = vec![0.0; n * kept];
    for (c, &src) in order[..kept].iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        // Sign convention: the entry of largest magnitude is nonnegative.
        let mut lead = 0;
        for r in 1..n {
            if col[r].abs() > col[lead].abs() {
                lead = r;
            }
        }
        let sign = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        let scale = eigenvalues[c].sqrt() * sign;
        for r in 0..n {
            data[r * kept + c] = col[r] * scale;
        }
    }

    Ok(LowRankFactorization {
        factors: FactorMatrix::from_vec(n, kept, data)?,
        eigenvalues,
        kept,
    })
}

/// Shift the diagonal by `max(0, -λ_min) + 1e-8 ‖A‖_F` so the result is
/// positive definite. Off-diagonal entries are untouched, so the shift is
/// invisible to every clustering objective.
pub fn shift_diagonal_psd(a: &SymmetricWeights) -> SymmetricWeights {
    let n = a.n();
    let sym = a.symmetrized();
    let eig = DMatrix::from_row_slice(n, n, sym.as_slice()).symmetric_eigen();
    let lambda_min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let shift = (-lambda_min).max(0.0) + 1e-8 * a.frobenius_norm();
    a.with_shifted_diagonal(shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn frobenius_gap(a: &SymmetricWeights, v: &FactorMatrix) -> f64 {
        let n = a.n();
        let approx = v.gram();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let diff = a.get(i, j) - approx.get(i, j);
                total += diff * diff;
            }
        }
        total.sqrt()
    }

    #[test]
    fn rank1_exact_recovery() {
        let v = vec![1.0, -2.0, 0.5, 3.0];
        let fm = FactorMatrix::from_column(&v).unwrap();
        let a = fm.gram();
        let out = lowrank_psd_factor(&a, 1).unwrap();
        assert_eq!(out.kept, 1);
        assert!(frobenius_gap(&a, &out.factors) < 1e-9);
        // Up to the sign convention the column is ±v.
        let col: Vec<f64> = out.factors.rows().map(|r| r[0]).collect();
        let same: bool = col.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-9);
        let flipped: bool = col.iter().zip(&v).all(|(a, b)| (a + b).abs() < 1e-9);
        assert!(same || flipped);
    }

    #[test]
    fn identity_truncation_leaves_unit_residual() {
        let a = SymmetricWeights::from_vec(
            3,
            vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let out = lowrank_psd_factor(&a, 2).unwrap();
        assert_eq!(out.kept, 2);
        // Columns of V are orthonormal (eigenvalues are 1).
        let cols: Vec<Vec<f64>> = (0..2)
            .map(|c| out.factors.rows().map(|r| r[c]).collect())
            .collect();
        let dot: f64 = cols[0].iter().zip(&cols[1]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-9);
        for col in &cols {
            let norm: f64 = col.iter().map(|x| x * x).sum::<f64>();
            assert!((norm - 1.0).abs() < 1e-9);
        }
        assert!((frobenius_gap(&a, &out.factors) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn residual_matches_discarded_spectrum() {
        // Random correlation-like PSD matrix, truncated to rank 3.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 8;
        let raw: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let full = FactorMatrix::from_rows(&raw).unwrap().gram();
        let out = lowrank_psd_factor(&full, 3).unwrap();
        let gap = frobenius_gap(&full, &out.factors);
        assert!(
            (gap - out.predicted_residual()).abs() < 1e-8,
            "gap {gap} vs predicted {}",
            out.predicted_residual()
        );
    }

    #[test]
    fn requesting_more_rank_than_positive_eigenvalues_warns_via_kept() {
        let v = FactorMatrix::from_column(&[1.0, 2.0, -1.0]).unwrap();
        let a = v.gram(); // rank 1 PSD
        let out = lowrank_psd_factor(&a, 3).unwrap();
        assert_eq!(out.kept, 1);
        assert_eq!(out.factors.d(), 1);
    }

    #[test]
    fn negative_definite_input_is_an_error() {
        let a = SymmetricWeights::from_vec(2, vec![-1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!(matches!(
            lowrank_psd_factor(&a, 1),
            Err(Error::NoPsdComponent)
        ));
    }

    #[test]
    fn shift_makes_negative_identity_positive() {
        let a = SymmetricWeights::from_vec(2, vec![-1.0, 0.0, 0.0, -1.0]).unwrap();
        let shifted = shift_diagonal_psd(&a);
        let eig = DMatrix::from_row_slice(2, 2, shifted.symmetrized().as_slice())
            .symmetric_eigen();
        for l in eig.eigenvalues.iter() {
            assert!(*l > 0.0);
        }
        // Diagonal moved by roughly 1e-8·√2 beyond the unit shift.
        assert!((shifted.get(0, 0) - 1e-8 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(shifted.get(0, 1), a.get(0, 1));
    }

    #[test]
    fn shift_on_pd_matrix_is_tiny() {
        let a = SymmetricWeights::from_vec(2, vec![2.0, 0.5, 0.5, 2.0]).unwrap();
        let shifted = shift_diagonal_psd(&a);
        let expected = 1e-8 * a.frobenius_norm();
        assert!((shifted.get(0, 0) - 2.0 - expected).abs() < 1e-15);
    }

    #[test]
    fn shift_preserves_objectives() {
        use crate::clustering::Clustering;
        use crate::objective::cc_objective;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 6;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let x: f64 = rng.sample(StandardNormal);
                entries[i * n + j] = x;
                entries[j * n + i] = x;
            }
        }
        let a = SymmetricWeights::from_vec(n, entries).unwrap();
        let shifted = shift_diagonal_psd(&a);
        for seed in 0..50u64 {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<usize> = (0..n).map(|_| r.gen_range(0..3)).collect();
            let c = Clustering::canonicalize(&raw).unwrap();
            assert_eq!(
                cc_objective(&a, &c).unwrap(),
                cc_objective(&shifted, &c).unwrap()
            );
        }
    }
}
