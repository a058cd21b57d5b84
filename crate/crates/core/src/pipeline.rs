//! End-to-end composition: walk, Laplacian, phase estimation, heat traces,
//! digest.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::evolution::{edge_split, exact_unitary, trotter_unitary, UnitaryMatrix};
use crate::fingerprint::{digest, heat_traces, Digest256, Fingerprint, FingerprintConfig};
use crate::qpe::{
    check_qubits, choose_evolution_time, prepare_input_state, qpe_with_unitary, sample_shots, Evolution,
    Histogram, InputStrategy, Mode, PhaseDistribution,
};
use crate::rng::mix64;
use crate::spectral::{eigendecompose, laplacian, LaplacianMatrix};
use crate::walk::{encode_bytes, pad_and_block, walk, DirectionMap, TorusGrid, WeightedGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct HashConfig {
    pub grid_n: usize,
    pub direction_map: usize,
    pub start_node: usize,
    pub qubits: u32,
    pub input: InputStrategy,
    pub evolution: Evolution,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
    pub fingerprint: FingerprintConfig,
}

impl Default for HashConfig {
    fn default() -> Self {
        Self {
            grid_n: 4,
            direction_map: 0,
            start_node: 0,
            qubits: 8,
            input: InputStrategy::Ramp,
            evolution: Evolution::Exact,
            mode: Mode::Exact,
            shots: 1024,
            seed: 0,
            fingerprint: FingerprintConfig::default(),
        }
    }
}

impl HashConfig {
    pub fn validate(&self) -> Result<()> {
        let grid = TorusGrid::new(self.grid_n)?;
        DirectionMap::from_id(self.direction_map)?;
        if self.start_node >= grid.nodes() {
            return Err(Error::InvalidConfig(format!(
                "start node {} outside the {}x{} grid",
                self.start_node, self.grid_n, self.grid_n
            )));
        }
        check_qubits(self.qubits)?;
        if let InputStrategy::Node(s) = self.input {
            if s >= grid.nodes() {
                return Err(Error::InvalidConfig(format!("input node {s} outside the grid")));
            }
        }
        if self.evolution == Evolution::Trotter(0) {
            return Err(Error::InvalidConfig("Trotter step count must be at least 1".into()));
        }
        if self.mode == Mode::Shots && self.shots == 0 {
            return Err(Error::InvalidConfig("shot count must be at least 1".into()));
        }
        Ok(())
    }

    /// Canonical `key=value` rendering, one per line, in fixed key order.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "grid-n={}", self.grid_n);
        let _ = writeln!(out, "direction-map={}", self.direction_map);
        let _ = writeln!(out, "start-node={}", self.start_node);
        let _ = writeln!(out, "qubits={}", self.qubits);
        let _ = writeln!(out, "input-state={}", self.input);
        let _ = writeln!(out, "evolution={}", self.evolution);
        let _ = writeln!(out, "mode={}", self.mode);
        let _ = writeln!(out, "shots={}", self.shots);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "taus={}", self.fingerprint);
        out
    }

    /// 64-bit identifier of the canonical rendering, as 16 hex digits.
    pub fn config_id(&self) -> String {
        let h = self
            .to_kv()
            .bytes()
            .fold(0x6a09_e667_f3bc_c908u64, |acc, b| mix64(acc ^ b as u64));
        format!("{h:016x}")
    }
}

/// Every intermediate produced while hashing one graph.
#[derive(Debug, Clone)]
pub struct GraphAnalysis {
    pub laplacian: LaplacianMatrix,
    pub time: f64,
    pub distribution: PhaseDistribution,
    pub histogram: Option<Histogram>,
    pub fingerprint: Fingerprint,
    pub digest: Digest256,
}

/// A validated configuration ready to hash messages.
#[derive(Debug, Clone)]
pub struct Hasher {
    config: HashConfig,
    grid: TorusGrid,
    map: DirectionMap,
}

impl Hasher {
    pub fn new(config: HashConfig) -> Result<Self> {
        config.validate()?;
        let grid = TorusGrid::new(config.grid_n)?;
        let map = DirectionMap::from_id(config.direction_map)?;
        Ok(Self { config, grid, map })
    }

    pub fn config(&self) -> &HashConfig {
        &self.config
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn graph_bytes(&self, message: &[u8]) -> WeightedGraph {
        let stream = pad_and_block(&encode_bytes(message).bits);
        walk(&stream.blocks, self.grid, self.map, self.config.start_node)
            .expect("start node validated at construction")
    }

    pub fn graph(&self, message: &str) -> WeightedGraph {
        self.graph_bytes(message.as_bytes())
    }

    fn unitary(&self, graph: &WeightedGraph, l: &LaplacianMatrix, t: f64) -> Result<UnitaryMatrix> {
        match self.config.evolution {
            Evolution::Exact => Ok(exact_unitary(&eigendecompose(l)?, t)),
            Evolution::Trotter(steps) => trotter_unitary(&edge_split(graph), graph.n_nodes(), t, steps),
        }
    }

    /// Spectral stage for an arbitrary weighted graph.
    pub fn analyze(&self, graph: &WeightedGraph) -> Result<GraphAnalysis> {
        let cfg = &self.config;
        let l = laplacian(graph);
        let t = choose_evolution_time(&l, cfg.qubits);
        let psi = prepare_input_state(cfg.input, graph.n_nodes())?;
        let u = self.unitary(graph, &l, t)?;
        let exact = qpe_with_unitary(&u, &psi.amplitudes, cfg.qubits)?;
        let (distribution, histogram) = match cfg.mode {
            Mode::Exact => (exact, None),
            Mode::Shots => {
                let h = sample_shots(&exact, cfg.shots, cfg.seed);
                (h.to_distribution()?, Some(h))
            }
        };
        let fingerprint = heat_traces(&distribution, t, &cfg.fingerprint);
        let digest = digest(&fingerprint)?;
        Ok(GraphAnalysis { laplacian: l, time: t, distribution, histogram, fingerprint, digest })
    }

    pub fn fingerprint_bytes(&self, message: &[u8]) -> Result<Fingerprint> {
        Ok(self.analyze(&self.graph_bytes(message))?.fingerprint)
    }

    pub fn hash_bytes(&self, message: &[u8]) -> Result<Digest256> {
        Ok(self.analyze(&self.graph_bytes(message))?.digest)
    }

    pub fn hash(&self, message: &str) -> Result<Digest256> {
        self.hash_bytes(message.as_bytes())
    }
}

pub fn hash_message(message: &str, config: &HashConfig) -> Result<Digest256> {
    Hasher::new(config.clone())?.hash(message)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        HashConfig::default().validate().unwrap();
        assert!(Hasher::new(HashConfig { grid_n: 1, ..Default::default() }).is_err());
        assert!(Hasher::new(HashConfig { qubits: 0, ..Default::default() }).is_err());
        assert!(Hasher::new(HashConfig { start_node: 16, ..Default::default() }).is_err());
        assert!(Hasher::new(HashConfig { input: InputStrategy::Node(16), ..Default::default() }).is_err());
        assert!(Hasher::new(HashConfig { direction_map: 24, ..Default::default() }).is_err());
        assert!(Hasher::new(HashConfig { mode: Mode::Shots, shots: 0, ..Default::default() }).is_err());
    }

    #[test]
    fn config_id_is_stable_and_sensitive() {
        let a = HashConfig::default();
        assert_eq!(a.config_id(), HashConfig::default().config_id());
        assert_ne!(a.config_id(), HashConfig { seed: 1, ..Default::default() }.config_id());
        assert_eq!(a.config_id().len(), 16);
    }

    #[test]
    fn empty_message_is_all_ones() {
        let h = Hasher::new(HashConfig::default()).unwrap();
        assert_eq!(h.fingerprint_bytes(b"").unwrap().values(), &[1.0; 8]);
        assert_eq!(
            h.hash("").unwrap(),
            digest(&Fingerprint(vec![1.0; 8])).unwrap()
        );
    }

    #[test]
    fn shot_mode_is_seeded() {
        let cfg = HashConfig { mode: Mode::Shots, shots: 256, seed: 42, ..Default::default() };
        let h = Hasher::new(cfg).unwrap();
        assert_eq!(h.hash("Hello").unwrap(), h.hash("Hello").unwrap());
        assert!(h.analyze(&h.graph("Hello")).unwrap().histogram.is_some());
    }

    #[test]
    fn trotter_evolution_runs() {
        let cfg = HashConfig { evolution: Evolution::Trotter(8), ..Default::default() };
        let h = Hasher::new(cfg).unwrap();
        let exact = Hasher::new(HashConfig::default()).unwrap();
        let a = h.fingerprint_bytes(b"Hi").unwrap();
        let b = exact.fingerprint_bytes(b"Hi").unwrap();
        // Trotter error perturbs the fingerprint, but only mildly
        assert!(a.max_abs_diff(&b) < 0.2);
    }
}
