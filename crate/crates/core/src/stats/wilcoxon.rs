use super::ranks::mid_ranks;
use super::{
    EXACT_CUTOFF, PValueMode, StatsError, TestMethod, TestResult, check_finite, normal_two_sided,
};

/// `P(W⁺ ≤ w)` under the null for `n` untied ranks `1..=n`.
pub fn signed_rank_exact_cdf(n: usize, w: f64) -> f64 {
    if w < 0.0 {
        return 0.0;
    }
    let max = n * (n + 1) / 2;
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    for rank in 1..=n {
        for s in (rank..=max).rev() {
            counts[s] += counts[s - rank];
        }
    }
    let below: f64 = counts.iter().take(w.floor() as usize + 1).sum();
    below / 2f64.powi(n as i32)
}

/// Two-sided Wilcoxon signed-rank test on `(a, b)` pairs. Zero differences
/// are dropped; the statistic is `min(W⁺, W⁻)`.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<TestResult, StatsError> {
    wilcoxon_signed_rank_with(pairs, PValueMode::Auto)
}

pub fn wilcoxon_signed_rank_with(
    pairs: &[(f64, f64)],
    mode: PValueMode,
) -> Result<TestResult, StatsError> {
    if pairs.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    check_finite(&diffs)?;
    let diffs: Vec<f64> = diffs.into_iter().filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(StatsError::AllZeroDifferences);
    }
    let n = diffs.len();
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, tie_term) = mid_ranks(&magnitudes);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w = w_plus.min(total - w_plus);

    let exact = match mode {
        PValueMode::Auto => n <= EXACT_CUTOFF && tie_term == 0.0,
        PValueMode::Exact => tie_term == 0.0,
        PValueMode::Normal => false,
    };
    let (p_value, method) = if exact {
        (
            (2.0 * signed_rank_exact_cdf(n, w)).min(1.0),
            TestMethod::Exact,
        )
    } else {
        let nf = n as f64;
        let mu = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        (
            normal_two_sided(mu - w, var.max(0.0).sqrt()),
            TestMethod::NormalApprox,
        )
    };
    Ok(TestResult {
        statistic: w,
        p_value,
        method,
        n1: n,
        n2: n,
    })
}
