//! Rank tests, inter-rater agreement and sample sizing.
//!
//! Both rank tests are two-sided. Small tie-free samples use the exact null
//! distribution ([`EXACT_CUTOFF`]); everything else uses the normal
//! approximation with tie and continuity corrections.

mod cochran;
mod kappa;
mod mann_whitney;
mod ranks;
mod significance;
mod wilcoxon;

pub use cochran::{cochran_sample_size, z_for_confidence};
pub use kappa::{RatingMatrix, fleiss_kappa};
pub use mann_whitney::{mann_whitney_exact_cdf, mann_whitney_u, mann_whitney_u_with};
pub use significance::{MetricComparison, SIGNIFICANCE_LEVEL, significance_matrix};
pub use wilcoxon::{signed_rank_exact_cdf, wilcoxon_signed_rank, wilcoxon_signed_rank_with};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest sample size (the smaller group for the U test) that is tested exactly.
pub const EXACT_CUTOFF: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("invalid rating matrix: {0}")]
    InvalidMatrix(String),
    #[error("kappa is undefined when every rating falls in one category")]
    UndefinedKappa,
    #[error("unsupported confidence level {0} (use 0.90, 0.95 or 0.99)")]
    InvalidConfidence(f64),
    #[error("margin of error {0} is outside (0, 1)")]
    InvalidMargin(f64),
    #[error("population must be at least 1")]
    InvalidPopulation,
    #[error("groups cannot be paired: {0}")]
    Pairing(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Exact,
    NormalApprox,
}

/// Force one computation path or let the sample decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PValueMode {
    #[default]
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: TestMethod,
    pub n1: usize,
    pub n2: usize,
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

/// Two-sided p-value from a normal approximation, `distance` being how far
/// the statistic lies below its mean.
fn normal_two_sided(distance: f64, sigma: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    if sigma <= 0.0 {
        return 1.0;
    }
    let z = (distance - 0.5) / sigma;
    let upper = Normal::standard().sf(z);
    (2.0 * upper).min(1.0)
}
