//! Evaluation harness: determinism, avalanche, collisions, stage timing and
//! the co-spectral distinction experiment.

mod avalanche;
mod collision;
mod cospectral;
mod determinism;
pub mod graphs;
mod report;
mod timing;

pub use avalanche::{avalanche_pairs, avalanche_test, FlipStrategy};
pub use collision::{collision_scan, CollisionStage};
pub use cospectral::{cospectral_test, find_cospectral_pair, CospectralPair};
pub use determinism::{determinism_test, SeedPolicy};
pub use report::{report_emit, EvalReport, Field, Format};
pub use timing::{linear_fit, median, timing_profile, LinearFit};

use crate::rng::SplitMix64;

/// `count` random byte strings of length `len` from a seeded stream.
pub fn random_messages(count: usize, len: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = SplitMix64::new(seed);
    (0..count).map(|_| rng.bytes(len)).collect()
}

/// Every two-character string over printable ASCII `0x21..=0x7e` (94^2 of them).
pub fn printable_pairs() -> Vec<Vec<u8>> {
    let chars = 0x21u8..=0x7e;
    chars.clone().flat_map(|a| chars.clone().map(move |b| vec![a, b])).collect()
}

/// Text when the bytes are UTF-8, otherwise `hex:`-prefixed.
pub fn render_message(bytes: &[u8]) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_owned(),
        Err(_) => format!("hex:{}", bytes.iter().map(|b| format!("{b:02x}")).collect::<String>()),
    }
}
