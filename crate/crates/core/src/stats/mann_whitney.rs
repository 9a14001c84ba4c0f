use super::ranks::mid_ranks;
use super::{
    EXACT_CUTOFF, PValueMode, StatsError, TestMethod, TestResult, check_finite, normal_two_sided,
};

/// `P(U ≤ u)` under the null for group sizes `m` and `n`, where `U` counts
/// the pairs in which the first group's value is larger.
pub fn mann_whitney_exact_cdf(m: usize, n: usize, u: f64) -> f64 {
    let (m, n) = (m.min(n), m.max(n));
    let max_u = m * n;
    // f[i][k]: arrangements of i first-group and j second-group values with U = k.
    let mut f = vec![vec![0.0f64; max_u + 1]; m + 1];
    for row in f.iter_mut() {
        row[0] = 1.0;
    }
    for j in 1..=n {
        for i in 1..=m {
            for k in (j..=i * j).rev() {
                f[i][k] += f[i - 1][k - j];
            }
        }
    }
    let total: f64 = f[m].iter().sum();
    let below: f64 = f[m].iter().take(u.floor().max(-1.0) as usize + 1).sum();
    if u < 0.0 { 0.0 } else { below / total }
}

/// Two-sided Mann-Whitney U test. The statistic is `min(U_x, U_y)`.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<TestResult, StatsError> {
    mann_whitney_u_with(xs, ys, PValueMode::Auto)
}

pub fn mann_whitney_u_with(
    xs: &[f64],
    ys: &[f64],
    mode: PValueMode,
) -> Result<TestResult, StatsError> {
    if xs.is_empty() || ys.is_empty() {
        return Err(StatsError::EmptySample);
    }
    check_finite(xs)?;
    check_finite(ys)?;
    let (n1, n2) = (xs.len(), ys.len());
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let (ranks, tie_term) = mid_ranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let u_x = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    let u_y = (n1 * n2) as f64 - u_x;
    let u = u_x.min(u_y);

    let exact = match mode {
        PValueMode::Auto => n1.min(n2) <= EXACT_CUTOFF && tie_term == 0.0,
        PValueMode::Exact => tie_term == 0.0,
        PValueMode::Normal => false,
    };
    let (p_value, method) = if exact {
        let p = (2.0 * mann_whitney_exact_cdf(n1, n2, u)).min(1.0);
        (p, TestMethod::Exact)
    } else {
        let nn = (n1 + n2) as f64;
        let mu = (n1 * n2) as f64 / 2.0;
        let var = (n1 * n2) as f64 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)).max(1.0));
        (
            normal_two_sided(mu - u, var.max(0.0).sqrt()),
            TestMethod::NormalApprox,
        )
    };
    Ok(TestResult {
        statistic: u,
        p_value,
        method,
        n1,
        n2,
    })
}
