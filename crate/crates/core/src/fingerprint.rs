//! Heat-trace fingerprint and the 256-bit digest layout.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qpe::{phase_to_eigenvalue, PhaseDistribution};
use crate::rng::mix64;

pub const LANES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintConfig {
    taus: Vec<f64>,
}

impl Default for FingerprintConfig {
    /// `0.05 * 2^(i-1)` for `i = 1..=8`.
    fn default() -> Self {
        Self { taus: (0..LANES).map(|i| 0.05 * (1u32 << i) as f64).collect() }
    }
}

impl FingerprintConfig {
    pub fn new(taus: Vec<f64>) -> Result<Self> {
        if taus.len() != LANES {
            return Err(Error::InvalidConfig(format!(
                "tau schedule needs exactly {LANES} values, got {}",
                taus.len()
            )));
        }
        if taus.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidConfig("tau values must be positive and finite".into()));
        }
        if taus.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("tau values must be strictly increasing".into()));
        }
        Ok(Self { taus })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }
}

impl fmt::Display for FingerprintConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.taus.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for FingerprintConfig {
    type Err = Error;

    /// Comma-separated list of taus.
    fn from_str(s: &str) -> Result<Self> {
        let taus = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidConfig(format!("bad tau value '{}'", p.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(taus)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint(pub Vec<f64>);

impl Fingerprint {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("fingerprint serializes")
    }

    /// The 32-bit fixed-point lanes fed to the digest mixer.
    pub fn quantize(&self) -> Result<[u32; LANES]> {
        if self.0.len() != LANES {
            return Err(Error::InvalidFingerprint(format!(
                "expected {LANES} heat traces, got {}",
                self.0.len()
            )));
        }
        let mut q = [0u32; LANES];
        for (slot, &h) in q.iter_mut().zip(&self.0) {
            if !(h > 0.0 && h <= 1.0) {
                return Err(Error::InvalidFingerprint(format!("heat trace {h} outside (0, 1]")));
            }
            *slot = (h * 4_294_967_296.0).floor().min(u32::MAX as f64) as u32;
        }
        Ok(q)
    }
}

/// `h_i = sum_y P[y] exp(-tau_i * lambda(y))`, capped at 1 against roundoff.
pub fn heat_traces(p: &PhaseDistribution, t: f64, cfg: &FingerprintConfig) -> Fingerprint {
    let m = p.qubits();
    let lambdas: Vec<f64> = (0..p.probs().len()).map(|y| phase_to_eigenvalue(y, m, t)).collect();
    let h = cfg
        .taus()
        .iter()
        .map(|&tau| {
            let sum: f64 = p
                .probs()
                .iter()
                .zip(&lambdas)
                .map(|(&py, &lambda)| py * (-tau * lambda).exp())
                .sum();
            sum.min(1.0)
        })
        .collect();
    Fingerprint(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest256(pub [u8; 32]);

impl Digest256 {
    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() != 64 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::InvalidInput(format!("'{s}' is not a 64-digit hex digest")));
        }
        let mut out = [0u8; 32];
        for (i, byte) in out.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).expect("validated hex");
        }
        Ok(Self(out))
    }
}

impl fmt::Display for Digest256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Lane `i` emits the low 32 bits of `mix64((i << 32) | q_i)`, big-endian.
pub fn digest(fp: &Fingerprint) -> Result<Digest256> {
    let q = fp.quantize()?;
    let mut out = [0u8; 32];
    for (i, (&qi, chunk)) in q.iter().zip(out.chunks_exact_mut(4)).enumerate() {
        let v = mix64(((i as u64) << 32) | qi as u64);
        chunk.copy_from_slice(&(v as u32).to_be_bytes());
    }
    Ok(Digest256(out))
}

pub fn hamming_distance(a: &Digest256, b: &Digest256) -> u32 {
    a.0.iter().zip(&b.0).map(|(x, y)| (x ^ y).count_ones()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_mass(m: u32, y: usize) -> PhaseDistribution {
        let mut p = vec![0.0; 1 << m];
        p[y] = 1.0;
        PhaseDistribution::new(p).unwrap()
    }

    /// Digest of the all-ones fingerprint, computed with an independent
    /// big-integer evaluation of the lane mixer.
    const ALL_ONES_HEX: &str = "e8c2c97c461437571f617b578c286eaed21ebc4363f15c4f9673056c1850dd5c";

    #[test]
    fn default_schedule() {
        let cfg = FingerprintConfig::default();
        assert_eq!(cfg.taus(), &[0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4]);
        assert_eq!(cfg.to_string().parse::<FingerprintConfig>().unwrap(), cfg);
    }

    #[test]
    fn schedule_validation() {
        assert!(FingerprintConfig::new(vec![0.1; 7]).is_err());
        assert!(FingerprintConfig::new(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.7]).is_err());
        assert!(FingerprintConfig::new(vec![-0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]).is_err());
        assert!("a,b".parse::<FingerprintConfig>().is_err());
    }

    #[test]
    fn point_mass_at_zero_is_all_ones() {
        let fp = heat_traces(&point_mass(8, 0), 0.7, &FingerprintConfig::default());
        assert_eq!(fp.values(), &[1.0; 8]);
    }

    #[test]
    fn large_tau_leaves_zero_mode() {
        let mut p = vec![0.0; 16];
        p[0] = 0.3;
        p[5] = 0.7;
        let p = PhaseDistribution::new(p).unwrap();
        let cfg = FingerprintConfig::new(vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0]).unwrap();
        let fp = heat_traces(&p, 1.0, &cfg);
        assert!((fp.values()[7] - 0.3).abs() < 1e-12);
        assert!(fp.values().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn all_ones_digest_golden() {
        let d = digest(&Fingerprint(vec![1.0; 8])).unwrap();
        assert_eq!(d.to_hex(), ALL_ONES_HEX);
        assert_eq!(d.to_hex().len(), 64);
        assert!(d.to_hex().chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase()));
        assert_eq!(Digest256::from_hex(ALL_ONES_HEX).unwrap(), d);
    }

    #[test]
    fn digest_rejects_bad_fingerprints() {
        assert!(digest(&Fingerprint(vec![1.0; 7])).is_err());
        assert!(digest(&Fingerprint(vec![0.0; 8])).is_err());
        assert!(digest(&Fingerprint(vec![1.5; 8])).is_err());
        assert!(digest(&Fingerprint(vec![f64::NAN; 8])).is_err());
    }

    #[test]
    fn quantization_saturates() {
        let q = Fingerprint(vec![1.0, 0.5, 0.25, 1e-12, 0.999_999_999_999, 0.75, 0.125, 0.9]).quantize().unwrap();
        assert_eq!(q[0], u32::MAX);
        assert_eq!(q[1], 1 << 31);
        assert_eq!(q[2], 1 << 30);
        assert_eq!(q[3], 0);
    }

    #[test]
    fn hamming() {
        let zero = Digest256([0; 32]);
        let ones = Digest256([0xff; 32]);
        assert_eq!(hamming_distance(&zero, &zero), 0);
        assert_eq!(hamming_distance(&zero, &ones), 256);
        let mut one_bit = zero;
        one_bit.0[17] ^= 0x08;
        assert_eq!(hamming_distance(&zero, &one_bit), 1);
    }
}
