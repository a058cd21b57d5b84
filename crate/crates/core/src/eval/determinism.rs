use rayon::prelude::*;

use super::{render_message, EvalReport};
use crate::error::{Error, Result};
use crate::fingerprint::{hamming_distance, Digest256};
use crate::pipeline::{HashConfig, Hasher};

/// Seed handling across repeats; only matters in shot mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedPolicy {
    Fixed,
    /// Repeat `r` runs with `seed + r`.
    PerRepeat,
}

/// Hashes every message `repeats` times and records all pairwise distances.
///
/// With [`SeedPolicy::PerRepeat`] nonzero distances are recorded but do not
/// fail the report.
pub fn determinism_test(
    config: &HashConfig,
    messages: &[Vec<u8>],
    repeats: usize,
    policy: SeedPolicy,
) -> Result<EvalReport> {
    if repeats < 2 {
        return Err(Error::InvalidInput(format!("determinism needs at least 2 repeats, got {repeats}")));
    }
    let hashers = (0..repeats)
        .map(|r| {
            let mut cfg = config.clone();
            if policy == SeedPolicy::PerRepeat {
                cfg.seed = cfg.seed.wrapping_add(r as u64);
            }
            Hasher::new(cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let digests: Vec<Vec<Digest256>> = messages
        .par_iter()
        .map(|m| hashers.iter().map(|h| h.hash_bytes(m)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let mut report = EvalReport::new(
        "determinism",
        &config.config_id(),
        &["message_id", "message", "repeat_i", "repeat_j", "hamming"],
    );
    report.param("messages", messages.len());
    report.param("repeats", repeats);
    report.param("seed_policy", if policy == SeedPolicy::Fixed { "fixed" } else { "per-repeat" });

    let mut max = 0;
    let mut nonzero = 0u64;
    for (id, (msg, ds)) in messages.iter().zip(&digests).enumerate() {
        for i in 0..repeats {
            for j in i + 1..repeats {
                let d = hamming_distance(&ds[i], &ds[j]);
                max = max.max(d);
                nonzero += (d > 0) as u64;
                report.push(vec![id.into(), render_message(msg).into(), i.into(), j.into(), d.into()]);
            }
        }
    }
    report.stat("pairs", report.records().len());
    report.stat("nonzero_pairs", nonzero);
    report.stat("max_hamming", max);
    report.stat("all_zero", nonzero == 0);
    report.passed = nonzero == 0 || policy == SeedPolicy::PerRepeat;
    Ok(report)
}
