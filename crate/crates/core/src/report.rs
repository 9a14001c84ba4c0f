//! Per-strategy metric tables with significance marks against a reference
//! strategy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::metrics::{METRIC_NAMES, OmsWeights, ScoreCard};
use crate::stats::{MetricComparison, significance_matrix};
use crate::{Error, Result};

/// Largest tolerated gap between stored and recomputed aggregates.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub strategy: String,
    pub n: usize,
    /// Mean of each [`METRIC_NAMES`] column; optional columns appear only when
    /// every card has them.
    #[serde(flatten)]
    pub means: BTreeMap<String, f64>,
    /// Mean score per judge model.
    pub llm_scores: BTreeMap<String, f64>,
    /// Number of methods paired with the reference strategy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paired_n: Option<usize>,
    /// Comparison against the reference; empty for the reference itself.
    pub significance: BTreeMap<String, MetricComparison>,
}

impl StrategyRow {
    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.means.get(metric).copied()
    }

    pub fn significant(&self, metric: &str) -> bool {
        self.significance
            .get(metric)
            .is_some_and(MetricComparison::is_significant)
    }
}

/// Whether each card's averages and OMS values recompute from its components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmsConsistency {
    pub cards_checked: usize,
    pub max_deviation: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub reference_strategy: String,
    pub rows: Vec<StrategyRow>,
    pub consistency: OmsConsistency,
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs
        .into_iter()
        .fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

fn recompute_deviation(card: &ScoreCard, weights: &OmsWeights) -> f64 {
    let syn = mean([card.bleu, card.meteor, card.rouge_l]);
    let sem = mean([card.cider, card.sbert_cos, card.usenc_cos, card.side]);
    let mut gaps = vec![
        (syn - card.syn_avg).abs(),
        (sem - card.sem_avg).abs(),
        (weights.oms_ss(syn, sem) - card.oms_ss).abs(),
    ];
    let llm = (!card.llm_scores.is_empty()).then(|| mean(card.llm_scores.values().copied()));
    match (llm, card.llm_avg, card.oms_ssl) {
        (None, None, None) => {}
        (Some(llm), Some(avg), Some(ssl)) => {
            gaps.push((llm - avg).abs());
            gaps.push((weights.oms_ssl(syn, sem, llm) - ssl).abs());
        }
        _ => gaps.push(f64::INFINITY),
    }
    gaps.into_iter().fold(0.0, f64::max)
}

pub fn oms_consistency(cards: &[ScoreCard], weights: &OmsWeights) -> OmsConsistency {
    let max_deviation = cards
        .iter()
        .map(|c| recompute_deviation(c, weights))
        .fold(0.0, f64::max);
    OmsConsistency {
        cards_checked: cards.len(),
        max_deviation,
        consistent: max_deviation <= CONSISTENCY_TOLERANCE,
    }
}

fn summarize(strategy: &str, cards: &[&ScoreCard]) -> StrategyRow {
    let mut means = BTreeMap::new();
    for metric in METRIC_NAMES {
        let values: Option<Vec<f64>> = cards.iter().map(|c| c.metric(metric)).collect();
        if let Some(values) = values {
            means.insert(metric.to_string(), mean(values));
        }
    }
    let judges: BTreeSet<&String> = cards.iter().flat_map(|c| c.llm_scores.keys()).collect();
    let llm_scores = judges
        .into_iter()
        .filter_map(|j| {
            let scores: Option<Vec<f64>> =
                cards.iter().map(|c| c.llm_scores.get(j).copied()).collect();
            scores.map(|s| (j.clone(), mean(s)))
        })
        .collect();
    StrategyRow {
        strategy: strategy.to_string(),
        n: cards.len(),
        means,
        llm_scores,
        paired_n: None,
        significance: BTreeMap::new(),
    }
}

/// Builds the table. Each non-reference strategy is compared with the
/// reference by a paired signed-rank test over the methods both scored.
pub fn build_report(cards: &[ScoreCard], reference: &str, weights: &OmsWeights) -> Result<Report> {
    let mut groups: BTreeMap<&str, Vec<&ScoreCard>> = BTreeMap::new();
    for card in cards {
        groups.entry(card.strategy.as_str()).or_default().push(card);
    }
    if groups.len() < 2 {
        return Err(Error::Data(format!(
            "a report needs score cards for at least two strategies, found {}",
            groups.len()
        )));
    }
    let reference_cards = groups.get(reference).ok_or_else(|| {
        Error::Data(format!(
            "reference strategy {reference:?} has no score cards (available: {})",
            groups.keys().copied().collect::<Vec<_>>().join(", ")
        ))
    })?;

    let mut rows = Vec::new();
    for (strategy, group) in &groups {
        let mut row = summarize(strategy, group);
        if *strategy != reference {
            let shared: BTreeSet<&str> = group.iter().map(|c| c.method_id.as_str()).collect();
            let ref_ids: BTreeSet<&str> = reference_cards
                .iter()
                .map(|c| c.method_id.as_str())
                .collect();
            let common: BTreeSet<&str> = shared.intersection(&ref_ids).copied().collect();
            if common.is_empty() {
                return Err(Error::Data(format!(
                    "strategy {strategy:?} shares no methods with the reference {reference:?}"
                )));
            }
            let pick = |cs: &[&ScoreCard]| -> Vec<ScoreCard> {
                cs.iter()
                    .filter(|c| common.contains(c.method_id.as_str()))
                    .map(|c| (*c).clone())
                    .collect()
            };
            row.significance = significance_matrix(&pick(reference_cards), &pick(group), true)?;
            row.paired_n = Some(common.len());
        }
        rows.push(row);
    }
    // Reference first, the rest in name order.
    rows.sort_by_key(|r| r.strategy != reference);
    Ok(Report {
        reference_strategy: reference.to_string(),
        rows,
        consistency: oms_consistency(cards, weights),
    })
}

const COLUMNS: [(&str, &str); 12] = [
    ("bleu", "BLEU"),
    ("meteor", "METEOR"),
    ("rouge_l", "ROUGE-L"),
    ("cider", "CIDEr"),
    ("sbert_cos", "SBERT"),
    ("usenc_cos", "USEnc"),
    ("side", "SIDE"),
    ("syn_avg", "Syn"),
    ("sem_avg", "Sem"),
    ("llm_avg", "LLM"),
    ("oms_ss", "OMS_ss"),
    ("oms_ssl", "OMS_ssl"),
];

impl Report {
    pub fn row(&self, strategy: &str) -> Option<&StrategyRow> {
        self.rows.iter().find(|r| r.strategy == strategy)
    }

    /// One JSON document per strategy.
    pub fn documents(&self) -> Vec<serde_json::Value> {
        self.rows
            .iter()
            .map(|r| serde_json::to_value(r).expect("report rows serialize"))
            .collect()
    }

    /// Aligned text table. `*` marks a significant difference (p < 0.05)
    /// from the reference; `=` marks a metric where every paired
    /// difference was zero.
    pub fn render_text(&self) -> String {
        let judges: BTreeSet<&String> =
            self.rows.iter().flat_map(|r| r.llm_scores.keys()).collect();
        let mut header = vec!["Strategy".to_string(), "n".to_string()];
        header.extend(COLUMNS.iter().map(|(_, h)| h.to_string()));
        header.extend(judges.iter().map(|j| j.to_string()));

        let mut table = vec![header];
        for row in &self.rows {
            let mut cells = vec![row.strategy.clone(), row.n.to_string()];
            for (metric, _) in COLUMNS {
                let mark = match row.significance.get(metric) {
                    Some(c) if c.is_significant() => "*",
                    Some(MetricComparison::Degenerate { .. }) => "=",
                    _ => "",
                };
                cells.push(match row.mean(metric) {
                    Some(v) => format!("{v:.2}{mark}"),
                    None => "-".to_string(),
                });
            }
            for judge in &judges {
                cells.push(
                    row.llm_scores
                        .get(*judge)
                        .map_or("-".into(), |v| format!("{v:.2}")),
                );
            }
            table.push(cells);
        }

        let widths: Vec<usize> = (0..table[0].len())
            .map(|i| {
                table
                    .iter()
                    .map(|r| r[i].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for row in &table {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, w))| {
                    if i == 0 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        }
        writeln!(out).unwrap();
        writeln!(
            out,
            "Reference strategy: {}. * p < 0.05 (two-sided Wilcoxon signed-rank); = no non-zero differences.",
            self.reference_strategy
        )
        .unwrap();
        writeln!(
            out,
            "OMS consistency over {} cards: max deviation {:.2e} ({}).",
            self.consistency.cards_checked,
            self.consistency.max_deviation,
            if self.consistency.consistent {
                "ok"
            } else {
                "MISMATCH"
            }
        )
        .unwrap();
        out
    }
}
