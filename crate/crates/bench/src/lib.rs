//! Synthetic inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use seabreak::TimeSeries;

/// Piecewise-constant series with `regimes.len()` equal-length regimes and
/// Gaussian noise.
pub fn step_series(regimes: &[f64], per_regime: usize, sigma: f64, seed: u64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).expect("valid sigma");
    let values = regimes
        .iter()
        .flat_map(|&mean| std::iter::repeat_n(mean, per_regime))
        .map(|mean| mean + noise.sample(&mut rng))
        .collect();
    TimeSeries::from_values(format!("step-{seed}"), values).expect("finite values")
}

/// Six route-length series (1968-2008) with two level shifts each.
pub fn route_scale_panel() -> Vec<TimeSeries> {
    (0..6u64)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + k);
            let noise = Normal::new(0.0, 150.0).expect("valid sigma");
            let values: Vec<f64> = (0..41)
                .map(|t| {
                    let level = match t {
                        0..=11 => 3000.0,
                        12..=21 => 1800.0,
                        _ => 1200.0,
                    };
                    level + noise.sample(&mut rng)
                })
                .collect();
            TimeSeries::new(format!("route-{k}"), (1968..2009).collect(), values)
                .expect("finite values")
        })
        .collect()
}
