//! Correlation clustering for low-rank positive semidefinite similarity
//! matrices.
//!
//! When the similarity matrix factors as `A = V Vᵀ` with `V ∈ R^{n×d}`,
//! maximizing the clustering objective is a vector partition problem: find
//! the partition of the rows of `V` whose cluster sum points `S_i` maximize
//! `Σ ‖S_i‖²`, and at most `d + 1` clusters are ever needed. This crate
//! provides:
//!
//! - the domain types ([`FactorMatrix`], [`SymmetricWeights`],
//!   [`Clustering`]) and both objectives ([`vp_objective`],
//!   [`cc_objective`], [`agreement_weight`]);
//! - exact solvers for rank 1 and rank 2 plus a brute-force oracle
//!   ([`exact`]);
//! - the randomized signing-zonotope search ([`zonotope::zonocc`]) for
//!   arbitrary rank;
//! - baseline algorithms ([`baselines::pivot`], [`baselines::kmeans`]);
//! - synthetic benchmark generators and a time-series-to-factors pipeline
//!   ([`dataprep`]);
//! - evaluation metrics and comparison reports ([`eval`]).

pub mod baselines;
pub mod clustering;
pub mod dataprep;
pub mod error;
pub mod eval;
pub mod exact;
pub mod factor;
pub mod objective;
pub mod weights;
pub mod zonotope;

pub use clustering::{sum_points, Clustering, ClusteringRecord, SumPoints};
pub use error::{Error, Result};
pub use factor::FactorMatrix;
pub use objective::{agreement_weight, cc_objective, merge_improving, vp_objective};
pub use weights::SymmetricWeights;
