use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{StatsError, TestResult, mann_whitney_u, wilcoxon_signed_rank};
use crate::metrics::{METRIC_NAMES, ScoreCard};

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MetricComparison {
    Tested {
        result: TestResult,
        significant: bool,
    },
    /// The test has no information, e.g. all paired differences are zero.
    Degenerate { reason: String },
}

impl MetricComparison {
    pub fn is_significant(&self) -> bool {
        matches!(
            self,
            MetricComparison::Tested {
                significant: true,
                ..
            }
        )
    }
}

fn column(cards: &[&ScoreCard], metric: &str) -> Option<Vec<f64>> {
    cards.iter().map(|c| c.metric(metric)).collect()
}

/// Per-metric comparison of two groups of score cards. Paired groups are
/// matched by method id and use the signed-rank test; unpaired groups use
/// the U test. Metrics missing from any card are skipped.
pub fn significance_matrix(
    group_a: &[ScoreCard],
    group_b: &[ScoreCard],
    paired: bool,
) -> Result<BTreeMap<String, MetricComparison>, StatsError> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let a: Vec<&ScoreCard> = group_a.iter().collect();
    let b: Vec<&ScoreCard> = if paired {
        if group_a.len() != group_b.len() {
            return Err(StatsError::Pairing(format!(
                "{} cards against {}",
                group_a.len(),
                group_b.len()
            )));
        }
        let mut by_id: HashMap<&str, &ScoreCard> = HashMap::new();
        for card in group_b {
            if by_id.insert(card.method_id.as_str(), card).is_some() {
                return Err(StatsError::Pairing(format!(
                    "duplicate method {}",
                    card.method_id
                )));
            }
        }
        let mut seen = HashMap::new();
        a.iter()
            .map(|card| {
                if seen.insert(card.method_id.as_str(), ()).is_some() {
                    return Err(StatsError::Pairing(format!(
                        "duplicate method {}",
                        card.method_id
                    )));
                }
                by_id.get(card.method_id.as_str()).copied().ok_or_else(|| {
                    StatsError::Pairing(format!("no partner for method {}", card.method_id))
                })
            })
            .collect::<Result<_, _>>()?
    } else {
        group_b.iter().collect()
    };

    let mut out = BTreeMap::new();
    for metric in METRIC_NAMES {
        let (Some(xs), Some(ys)) = (column(&a, metric), column(&b, metric)) else {
            continue;
        };
        let outcome = if paired {
            let pairs: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
            wilcoxon_signed_rank(&pairs)
        } else {
            mann_whitney_u(&xs, &ys)
        };
        let comparison = match outcome {
            Ok(result) => MetricComparison::Tested {
                significant: result.p_value < SIGNIFICANCE_LEVEL,
                result,
            },
            Err(e @ (StatsError::AllZeroDifferences | StatsError::NonFinite)) => {
                MetricComparison::Degenerate {
                    reason: e.to_string(),
                }
            }
            Err(e) => return Err(e),
        };
        out.insert(metric.to_string(), comparison);
    }
    Ok(out)
}
