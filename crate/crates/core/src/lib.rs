//! QGH-256: a spectral hash built from a message-driven walk on a torus, a
//! simulated quantum phase estimation of the walk graph's Laplacian, and a
//! multi-scale heat-trace fingerprint.

pub mod error;
pub mod eval;
pub mod evolution;
pub mod fingerprint;
pub mod linalg;
pub mod pipeline;
pub mod qpe;
pub mod rng;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use fingerprint::{digest, hamming_distance, heat_traces, Digest256, Fingerprint, FingerprintConfig};
pub use pipeline::{hash_message, GraphAnalysis, HashConfig, Hasher};
pub use walk::WeightedGraph;
