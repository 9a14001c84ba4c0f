use super::StatsError;

/// Two-sided critical value for the supported confidence levels.
pub fn z_for_confidence(confidence: f64) -> Result<f64, StatsError> {
    [(0.90, 1.645), (0.95, 1.96), (0.99, 2.576)]
        .into_iter()
        .find(|(level, _)| (level - confidence).abs() < 1e-9)
        .map(|(_, z)| z)
        .ok_or(StatsError::InvalidConfidence(confidence))
}

/// Cochran's sample size for a proportion (p = 0.5) with the
/// finite-population correction, capped at the population.
pub fn cochran_sample_size(
    population: u64,
    confidence: f64,
    margin: f64,
) -> Result<u64, StatsError> {
    if population == 0 {
        return Err(StatsError::InvalidPopulation);
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(StatsError::InvalidMargin(margin));
    }
    let z = z_for_confidence(confidence)?;
    let n0 = z * z * 0.25 / (margin * margin);
    let n = n0 / (1.0 + (n0 - 1.0) / population as f64);
    // Guard against representation noise just above an integer.
    let n = (n - 1e-9).ceil() as u64;
    Ok(n.min(population))
}
