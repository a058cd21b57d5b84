use std::time::Instant;

use super::EvalReport;
use crate::error::{Error, Result};
use crate::pipeline::{HashConfig, Hasher};
use crate::rng::SplitMix64;

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit { slope, intercept, r_squared }
}

/// Times the walker stage and the spectral stage (Laplacian through digest)
/// separately for random messages of each length. Stages run sequentially.
pub fn timing_profile(config: &HashConfig, lengths: &[usize], trials: usize, seed: u64) -> Result<EvalReport> {
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(Error::InvalidInput("timing lengths must be positive".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("timing needs at least one trial".into()));
    }
    let hasher = Hasher::new(config.clone())?;
    let mut rng = SplitMix64::new(seed);
    let mut report = EvalReport::new("timing", &config.config_id(), &["length", "stage", "trial", "seconds"]);
    report.param("lengths", lengths.iter().map(|&l| l as u64).collect::<Vec<_>>());
    report.param("trials", trials);

    // warm caches and the allocator before the first measurement
    hasher.hash_bytes(&rng.bytes(lengths[0]))?;

    let mut walker_medians = Vec::new();
    let mut spectral_medians = Vec::new();
    for &len in lengths {
        let mut walker = Vec::with_capacity(trials);
        let mut spectral = Vec::with_capacity(trials);
        for trial in 0..trials {
            let msg = rng.bytes(len);
            let start = Instant::now();
            let graph = hasher.graph_bytes(&msg);
            let mid = Instant::now();
            let analysis = hasher.analyze(&graph)?;
            let end = Instant::now();
            std::hint::black_box(&analysis.digest);
            let (a, b) = ((mid - start).as_secs_f64(), (end - mid).as_secs_f64());
            walker.push(a);
            spectral.push(b);
            report.push(vec![len.into(), "walker".into(), trial.into(), a.into()]);
            report.push(vec![len.into(), "spectral".into(), trial.into(), b.into()]);
        }
        walker_medians.push(median(&walker));
        spectral_medians.push(median(&spectral));
    }

    let xs: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let fit = linear_fit(&xs, &walker_medians);
    let mean = spectral_medians.iter().sum::<f64>() / spectral_medians.len() as f64;
    let spread = spectral_medians.iter().map(|m| (m - mean).abs() / mean).fold(0.0, f64::max);

    report.stat("walker_median_seconds", walker_medians);
    report.stat("spectral_median_seconds", spectral_medians);
    report.stat("walker_slope", fit.slope);
    report.stat("walker_intercept", fit.intercept);
    report.stat("walker_r_squared", fit.r_squared);
    report.stat("spectral_mean_seconds", mean);
    report.stat("spectral_max_rel_deviation", spread);
    report.passed = fit.r_squared >= 0.95 && spread <= 0.20;
    Ok(report)
}
