use rayon::prelude::*;

use super::{render_message, EvalReport};
use crate::error::{Error, Result};
use crate::fingerprint::hamming_distance;
use crate::pipeline::{HashConfig, Hasher};
use crate::rng::SplitMix64;

/// How each corpus message is perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipStrategy {
    /// Flip one bit at a position drawn from the seeded stream.
    OneBit { seed: u64 },
    /// Replace one byte with a different printable ASCII character.
    OneChar { seed: u64 },
    /// Leave the message unchanged.
    Identity,
}

impl FlipStrategy {
    fn perturb(&self, msg: &[u8], index: usize) -> Vec<u8> {
        let mut out = msg.to_vec();
        if out.is_empty() {
            return out;
        }
        match *self {
            FlipStrategy::Identity => {}
            FlipStrategy::OneBit { seed } => {
                let mut rng = SplitMix64::new(seed ^ (index as u64).wrapping_mul(0x9e37_79b9));
                let bit = rng.below(out.len() as u64 * 8) as usize;
                out[bit / 8] ^= 0x80 >> (bit % 8);
            }
            FlipStrategy::OneChar { seed } => {
                let mut rng = SplitMix64::new(seed ^ (index as u64).wrapping_mul(0x9e37_79b9));
                let pos = rng.below(out.len() as u64) as usize;
                let old = out[pos];
                let mut new = old;
                while new == old {
                    new = 0x21 + rng.below(94) as u8;
                }
                out[pos] = new;
            }
        }
        out
    }
}

/// Hashes each `(original, perturbed)` pair and records the digest distance.
pub fn avalanche_pairs(config: &HashConfig, pairs: &[(Vec<u8>, Vec<u8>)]) -> Result<EvalReport> {
    let hasher = Hasher::new(config.clone())?;
    let rows = pairs
        .par_iter()
        .map(|(a, b)| {
            let ga = hasher.graph_bytes(a);
            let gb = hasher.graph_bytes(b);
            let da = hasher.analyze(&ga)?.digest;
            let db = hasher.analyze(&gb)?.digest;
            Ok((hamming_distance(&da, &db), ga != gb))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = EvalReport::new(
        "avalanche",
        &config.config_id(),
        &["message_id", "message", "perturbed", "hamming", "graphs_differ"],
    );
    report.param("pairs", pairs.len());
    let mut histogram = vec![0u64; 17];
    for (id, ((a, b), &(d, differ))) in pairs.iter().zip(&rows).enumerate() {
        histogram[(d / 16) as usize] += 1;
        report.push(vec![
            id.into(),
            render_message(a).into(),
            render_message(b).into(),
            d.into(),
            differ.into(),
        ]);
    }
    if !rows.is_empty() {
        let n = rows.len() as f64;
        let mean = rows.iter().map(|r| r.0 as f64).sum::<f64>() / n;
        report.stat("mean_hamming", mean);
        report.stat("min_hamming", rows.iter().map(|r| r.0).min().unwrap());
        report.stat("max_hamming", rows.iter().map(|r| r.0).max().unwrap());
        report.stat("identical_graphs", rows.iter().filter(|r| !r.1).count());
    }
    report.stat("histogram_bucket16", histogram);
    Ok(report)
}

pub fn avalanche_test(config: &HashConfig, corpus: &[Vec<u8>], flip: FlipStrategy) -> Result<EvalReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidInput("avalanche corpus is empty".into()));
    }
    let pairs: Vec<_> =
        corpus.iter().enumerate().map(|(i, m)| (m.clone(), flip.perturb(m, i))).collect();
    let mut report = avalanche_pairs(config, &pairs)?;
    report.param(
        "flip",
        match flip {
            FlipStrategy::OneBit { .. } => "one-bit",
            FlipStrategy::OneChar { .. } => "one-char",
            FlipStrategy::Identity => "identity",
        },
    );
    Ok(report)
}
