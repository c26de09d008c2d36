use super::cascade::FrequencyResponse;
use crate::error::{FpwError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceSummary {
    /// Hz
    pub peak_frequency: f64,
    /// `20 log10 |S21|` at the peak, dB.
    pub insertion_loss: f64,
    /// Hz
    pub bandwidth_3db: f64,
    pub quality_factor: f64,
}

/// Crossing frequency where `db` falls to `level`, interpolated linearly
/// between the last sample above and the first sample below.
fn crossing(samples: &[(f64, f64)], level: f64) -> Option<f64> {
    samples.windows(2).find_map(|w| {
        let (f_in, db_in) = w[0];
        let (f_out, db_out) = w[1];
        (db_out < level).then(|| f_in + (db_in - level) / (db_in - db_out) * (f_out - f_in))
    })
}

/// Locates the global |S21| maximum and its -3 dB bandwidth.
///
/// Gap points are skipped. A maximum on either end of the sweep, or a peak
/// whose -3 dB edges fall outside the sweep, is not a resonance.
pub fn find_resonance(response: &FrequencyResponse) -> Result<ResonanceSummary> {
    let samples: Vec<(f64, f64)> = response
        .points
        .iter()
        .filter_map(|p| p.db().map(|db| (p.frequency, db)))
        .filter(|(_, db)| db.is_finite())
        .collect();
    if samples.len() < 3 {
        return Err(FpwError::NoResonance(
            "fewer than three valid samples".into(),
        ));
    }
    let (peak, &(peak_frequency, peak_db)) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty");
    if peak == 0 || peak == samples.len() - 1 {
        return Err(FpwError::NoResonance(
            "maximum lies on the sweep boundary".into(),
        ));
    }
    let level = peak_db - 3.0;
    let right: Vec<(f64, f64)> = samples[peak..].to_vec();
    let left: Vec<(f64, f64)> = samples[..=peak].iter().rev().copied().collect();
    let (Some(upper), Some(lower)) = (crossing(&right, level), crossing(&left, level)) else {
        return Err(FpwError::NoResonance(
            "-3 dB edge lies outside the sweep".into(),
        ));
    };
    let bandwidth_3db = upper - lower;
    Ok(ResonanceSummary {
        peak_frequency,
        insertion_loss: peak_db,
        bandwidth_3db,
        quality_factor: peak_frequency / bandwidth_3db,
    })
}
