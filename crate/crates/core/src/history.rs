//! Per-method change history via `git log -L`.

use std::path::Path;
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::corpus::RepoDescriptor;
use crate::extract::{MethodId, MethodRecord};
use crate::graph::round2;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub method_id: MethodId,
    pub commit_count: usize,
    pub author_count: usize,
}

/// Commit hashes and lowercased author emails found in `git log` output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LogSummary {
    pub commits: Vec<String>,
    pub authors: Vec<String>,
}

/// Parses the default (`medium`) `git log` format: `commit <sha>` header
/// lines and `Author: Name <email>` lines. Diff hunks in `-L` output are
/// prefixed with a space, `+` or `-` and never match.
pub fn parse_log(output: &str) -> LogSummary {
    let mut summary = LogSummary::default();
    for line in output.lines() {
        if let Some(rest) = line.strip_prefix("commit ") {
            if let Some(sha) = rest.split_whitespace().next() {
                summary.commits.push(sha.to_string());
            }
        } else if let Some(rest) = line.strip_prefix("Author:") {
            let rest = rest.trim();
            let email = match (rest.rfind('<'), rest.rfind('>')) {
                (Some(open), Some(close)) if open < close => &rest[open + 1..close],
                _ => rest,
            };
            let email = email.trim().to_lowercase();
            if !summary.authors.contains(&email) {
                summary.authors.push(email);
            }
        }
    }
    summary
}

/// Runs `git log -L <start>,<end>:<file>` in `repo_root`.
pub fn line_log(repo_root: &Path, file: &str, start: usize, end: usize) -> Result<String> {
    let range = format!("{start},{end}:{file}");
    // Pin the output format regardless of user configuration.
    let output = Command::new("git")
        .current_dir(repo_root)
        .args([
            "-c",
            "color.ui=never",
            "-c",
            "log.showSignature=false",
            "-c",
            "format.pretty=medium",
            "--no-pager",
            "log",
            "-L",
            &range,
        ])
        .output()
        .map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::Git("git executable not found on PATH".into())
            } else {
                Error::io(repo_root, e)
            }
        })?;
    if !output.status.success() {
        return Err(Error::Git(format!(
            "log -L {range} failed: {}",
            String::from_utf8_lossy(&output.stderr).trim()
        )));
    }
    Ok(String::from_utf8_lossy(&output.stdout).into_owned())
}

/// Commit and distinct-author counts for the method's current line range.
pub fn method_history(repo: &RepoDescriptor, method: &MethodRecord) -> Result<HistoryRecord> {
    let log = line_log(&repo.root, &method.file, method.start_line, method.end_line)?;
    let summary = parse_log(&log);
    if summary.commits.is_empty() {
        return Err(Error::Git(format!(
            "no commits touch {}:{}-{} (is the file committed?)",
            method.file, method.start_line, method.end_line
        )));
    }
    Ok(HistoryRecord {
        method_id: method.method_id.clone(),
        commit_count: summary.commits.len(),
        author_count: summary.authors.len().max(1),
    })
}

/// Mines every method of one repository. Calls are issued one at a time.
pub fn mine_repository(
    repo: &RepoDescriptor,
    methods: &[MethodRecord],
) -> Result<Vec<HistoryRecord>> {
    methods.iter().map(|m| method_history(repo, m)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngagementField {
    Commits,
    Authors,
}

/// Quantile by linear interpolation between order statistics at position
/// `p·(n−1)` (the "type 7" rule). `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn describe(values: &[f64]) -> Result<DescriptiveStats> {
    if values.is_empty() {
        return Err(Error::Data("cannot summarise an empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(DescriptiveStats {
        n: sorted.len(),
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        min: sorted[0],
        q1: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q3: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

pub fn engagement_summary(
    records: &[HistoryRecord],
    field: EngagementField,
) -> Result<DescriptiveStats> {
    let values: Vec<f64> = records
        .iter()
        .map(|r| match field {
            EngagementField::Commits => r.commit_count as f64,
            EngagementField::Authors => r.author_count as f64,
        })
        .collect();
    describe(&values)
}

/// Share of total commit mass per class, in percent with 2 decimals.
pub fn commit_share(
    dependent: &[HistoryRecord],
    independent: &[HistoryRecord],
) -> Result<(f64, f64)> {
    let dep: usize = dependent.iter().map(|r| r.commit_count).sum();
    let indep: usize = independent.iter().map(|r| r.commit_count).sum();
    commit_share_from_totals(dep, indep)
}

pub fn commit_share_from_totals(dependent: usize, independent: usize) -> Result<(f64, f64)> {
    let total = dependent + independent;
    if total == 0 {
        return Err(Error::Data("no commits to share".into()));
    }
    let pct = round2(100.0 * dependent as f64 / total as f64);
    Ok((pct, round2(100.0 - pct)))
}
