use serde::{Deserialize, Serialize};

use super::encode::BubbleRecord;
use crate::levy::{sample_stable_path, StableLaw, StablePathSpec};
use crate::rng::{SeedTree, StreamTag};

/// Constant `ĉ` of the bubble-count clock for the 3/2-stable law, fitted at
/// scale `j = 4` on ledger paths of known duration (see
/// [`calibrate_clock_constant`]) and frozen.
pub const CLOCK_CONSTANT: f64 = 0.98200;

/// Expected count of jumps with size in `[e^{-j-1}, e^{-j})` per unit time,
/// divided by `e^{αj}`: `C/α · (e^α - 1)`.
pub fn analytic_clock_constant(law: &StableLaw) -> f64 {
    let a = law.alpha();
    law.levy_density_constant() / a * (a.exp() - 1.0)
}

/// Number of bubbles among `bubbles[..up_to]` with length in `[e^{-j-1}, e^{-j})`.
pub fn bubble_count(bubbles: &[BubbleRecord], j: u32, up_to: usize) -> usize {
    let (lo, hi) = ((-(j as f64) - 1.0).exp(), (-(j as f64)).exp());
    bubbles[..up_to.min(bubbles.len())]
        .iter()
        .filter(|b| b.length >= lo && b.length < hi)
        .count()
}

/// Elapsed time estimated from the bubble counts at scale `j`:
/// `N(e^{-j-1}, e^{-j}) / (ĉ e^{3j/2})`.
pub fn quantum_natural_clock_from_jumps(bubbles: &[BubbleRecord], j: u32, up_to: usize) -> f64 {
    clock_with_constant(bubbles, j, up_to, CLOCK_CONSTANT, 1.5)
}

pub fn clock_with_constant(
    bubbles: &[BubbleRecord],
    j: u32,
    up_to: usize,
    constant: f64,
    alpha: f64,
) -> f64 {
    bubble_count(bubbles, j, up_to) as f64 / (constant * (alpha * j as f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockCalibration {
    pub constant: f64,
    pub std_error: f64,
    pub paths: u64,
}

/// Fit `ĉ` from ledger paths of duration `horizon` at scale `j`.
pub fn calibrate_clock_constant(
    law: &StableLaw,
    j: u32,
    horizon: f64,
    paths: u64,
    seed: u64,
) -> crate::Result<ClockCalibration> {
    let threshold = (-(j as f64) - 1.0).exp() * 0.5;
    let spec = StablePathSpec::new(horizon, horizon / 16.0).with_ledger(threshold);
    let tree = SeedTree::new(seed);
    let (lo, hi) = ((-(j as f64) - 1.0).exp(), (-(j as f64)).exp());
    let scale = (law.alpha() * j as f64).exp() * horizon;
    let mut acc = crate::stats::RunningMean::new();
    for i in 0..paths {
        let path = sample_stable_path(law, &spec, &mut tree.stream(StreamTag::Sphere, i))?;
        let n = path
            .jumps()
            .iter()
            .filter(|jp| jp.size >= lo && jp.size < hi)
            .count();
        acc.push(n as f64 / scale);
    }
    Ok(ClockCalibration {
        constant: acc.mean(),
        std_error: acc.std_error(),
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::Jump;

    fn bubbles_from(jumps: &[Jump]) -> Vec<BubbleRecord> {
        jumps
            .iter()
            .map(|j| BubbleRecord {
                time: j.time,
                length: j.size,
                orientation: false,
                marked_point: 0.0,
            })
            .collect()
    }

    #[test]
    fn empty_ledger_reads_zero() {
        for j in 0..8 {
            assert_eq!(quantum_natural_clock_from_jumps(&[], j, 0), 0.0);
        }
    }

    #[test]
    fn frozen_constant_matches_calibration_and_levy_measure() {
        let law = StableLaw::three_halves();
        let analytic = analytic_clock_constant(&law);
        assert!((CLOCK_CONSTANT / analytic - 1.0).abs() < 0.01, "{analytic}");
        let fit = calibrate_clock_constant(&law, 4, 1.0, 400, 21).unwrap();
        assert!(
            (fit.constant - CLOCK_CONSTANT).abs() < 4.0 * fit.std_error,
            "{fit:?}"
        );
    }

    #[test]
    fn adjacent_scales_agree() {
        let law = StableLaw::three_halves();
        let spec = StablePathSpec::new(2.0, 0.1).with_ledger((-7.0f64).exp());
        let path = sample_stable_path(&law, &spec, &mut SeedTree::new(5).stream(StreamTag::Sphere, 0)).unwrap();
        let bubbles = bubbles_from(path.jumps());
        assert!(bubbles.len() > 10_000);
        for j in 3..6 {
            let a = quantum_natural_clock_from_jumps(&bubbles, j, bubbles.len());
            let b = quantum_natural_clock_from_jumps(&bubbles, j + 1, bubbles.len());
            assert!((a / b - 1.0).abs() < 0.1, "j = {j}: {a} vs {b}");
        }
    }

    #[test]
    fn error_shrinks_with_scale() {
        let law = StableLaw::three_halves();
        let tree = SeedTree::new(8);
        let spec = StablePathSpec::new(1.0, 0.05).with_ledger((-7.0f64).exp());
        let mut sq = [0.0f64; 5];
        let paths = 60;
        for i in 0..paths {
            let path = sample_stable_path(&law, &spec, &mut tree.stream(StreamTag::Sphere, i)).unwrap();
            let bubbles = bubbles_from(path.jumps());
            // elapsed time at the halfway bubble
            let half = bubbles.partition_point(|b| b.time <= 0.5);
            for (k, j) in (2..=6).enumerate() {
                let est = quantum_natural_clock_from_jumps(&bubbles, j, half);
                sq[k] += (est / 0.5 - 1.0).powi(2);
            }
        }
        let rms: Vec<f64> = sq.iter().map(|s| (s / paths as f64).sqrt()).collect();
        assert!(rms.windows(2).all(|w| w[1] < w[0]), "{rms:?}");
    }
}
