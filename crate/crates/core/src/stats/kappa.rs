use super::StatsError;

/// Items × categories matrix of rating counts with a constant number of
/// raters per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingMatrix {
    counts: Vec<Vec<u64>>,
    raters: u64,
}

impl RatingMatrix {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self, StatsError> {
        let first = counts
            .first()
            .ok_or_else(|| StatsError::InvalidMatrix("no items".into()))?;
        let width = first.len();
        let raters: u64 = first.iter().sum();
        for (i, row) in counts.iter().enumerate() {
            if row.len() != width {
                return Err(StatsError::InvalidMatrix(format!(
                    "row {i} has {} categories, expected {width}",
                    row.len()
                )));
            }
            let sum: u64 = row.iter().sum();
            if sum != raters {
                return Err(StatsError::InvalidMatrix(format!(
                    "row {i} sums to {sum}, expected {raters}"
                )));
            }
        }
        Ok(RatingMatrix { counts, raters })
    }

    /// Builds counts from per-item rater labels in `0..categories`.
    pub fn from_labels(labels: &[Vec<usize>], categories: usize) -> Result<Self, StatsError> {
        let mut counts = Vec::with_capacity(labels.len());
        for (i, item) in labels.iter().enumerate() {
            let mut row = vec![0u64; categories];
            for &l in item {
                *row.get_mut(l).ok_or_else(|| {
                    StatsError::InvalidMatrix(format!("item {i} uses category {l} of {categories}"))
                })? += 1;
            }
            counts.push(row);
        }
        RatingMatrix::new(counts)
    }

    pub fn items(&self) -> usize {
        self.counts.len()
    }

    pub fn raters(&self) -> u64 {
        self.raters
    }
}

/// Fleiss' kappa, evaluated in integer arithmetic up to a final division.
pub fn fleiss_kappa(matrix: &RatingMatrix) -> Result<f64, StatsError> {
    let items = matrix.items() as i128;
    let n = matrix.raters as i128;
    if items < 2 {
        return Err(StatsError::InvalidMatrix("need at least two items".into()));
    }
    if n < 2 {
        return Err(StatsError::InvalidMatrix("need at least two raters".into()));
    }
    let width = matrix.counts[0].len();
    let squares: i128 = matrix
        .counts
        .iter()
        .flatten()
        .map(|&c| (c as i128) * (c as i128))
        .sum();
    let column_squares: i128 = (0..width)
        .map(|j| {
            let c: i128 = matrix.counts.iter().map(|row| row[j] as i128).sum();
            c * c
        })
        .sum();
    // P̄ = a / d, P̄e = s / t.
    let a = squares - items * n;
    let d = items * n * (n - 1);
    let s = column_squares;
    let t = (items * n) * (items * n);
    if s == t {
        return Err(StatsError::UndefinedKappa);
    }
    Ok((a * t - s * d) as f64 / (d * (t - s)) as f64)
}
