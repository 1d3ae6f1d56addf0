//! Instance generation and the real-data preparation pipeline: synthetic
//! planted benchmarks, time-series preprocessing, Pearson correlation, and
//! PSD low-rank factorization.
//!
//! The preprocessing stages compose in a fixed order — smooth, detrend,
//! z-score, correlate — before a low-rank factorization feeds the solvers.

mod attributes;
mod lowrank;
mod series;
mod synth;

pub use attributes::AttributeTable;
pub use lowrank::{lowrank_psd_factor, shift_diagonal_psd, LowRankFactorization};
pub use series::{
    detrend_quadratic, pearson_correlation, smooth_exponential, zscore, TimeSeriesTable,
};
pub use synth::{
    default_planted_n, gen_gaussian, gen_planted, simplex_vertices, PlantedInstance,
    DEFAULT_EPSILON,
};
