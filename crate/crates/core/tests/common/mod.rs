#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use seabreak::TimeSeries;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Piecewise-constant means plus Gaussian noise, periods starting at 1.
pub fn step_series(rng: &mut ChaCha8Rng, means: &[f64], per_regime: usize, sigma: f64) -> TimeSeries {
    let noise = Normal::new(0.0, sigma).unwrap();
    let values = means
        .iter()
        .flat_map(|&m| std::iter::repeat_n(m, per_regime))
        .map(|m| m + noise.sample(rng))
        .collect();
    TimeSeries::from_values("step", values).unwrap()
}

/// Random intercept-only series; about a third use small integers so that
/// exact SSR ties occur.
pub fn random_series(rng: &mut ChaCha8Rng, t_len: usize) -> TimeSeries {
    let values: Vec<f64> = if rng.gen_bool(1.0 / 3.0) {
        (0..t_len).map(|_| rng.gen_range(0..3) as f64).collect()
    } else {
        let jumps = rng.gen_range(0..4);
        let mut level = 0.0;
        let cuts: Vec<usize> = (0..jumps).map(|_| rng.gen_range(1..t_len)).collect();
        (0..t_len)
            .map(|t| {
                if cuts.contains(&t) {
                    level += rng.gen_range(-5.0..5.0);
                }
                let e: f64 = rng.sample(StandardNormal);
                level + e
            })
            .collect()
    };
    TimeSeries::from_values("random", values).unwrap()
}

/// AR(1) errors with unit innovation variance, after a burn-in.
pub fn ar1(rng: &mut ChaCha8Rng, n: usize, rho: f64) -> Vec<f64> {
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n + 200 {
        let e: f64 = rng.sample(StandardNormal);
        x = rho * x + e;
        if i >= 200 {
            out.push(x);
        }
    }
    out
}
