//! Exact simulation of quantum phase estimation for `U = exp(i L t)`.
//!
//! Two routes produce the counting-register distribution: a full
//! statevector simulation of the circuit, and a closed form that weights
//! the Fejer kernel of every eigenphase by its overlap with the input
//! state. They are kept independent so one can check the other.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{edge_split_laplacian, exact_unitary, trotter_unitary, UnitaryMatrix};
use crate::rng::SplitMix64;
use crate::spectral::{eigendecompose, LaplacianMatrix};

/// Largest counting register the simulator accepts.
pub const MAX_QUBITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputStrategy {
    Uniform,
    Node(usize),
    #[default]
    Ramp,
}

impl fmt::Display for InputStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Node(i) => write!(f, "node:{i}"),
            Self::Ramp => f.write_str("ramp"),
        }
    }
}

impl FromStr for InputStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "ramp" => Ok(Self::Ramp),
            _ => s
                .strip_prefix("node:")
                .and_then(|idx| idx.parse().ok())
                .map(Self::Node)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown input state '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputState {
    pub amplitudes: Vec<Complex64>,
    pub strategy: InputStrategy,
}

pub fn prepare_input_state(strategy: InputStrategy, n: usize) -> Result<InputState> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("input state needs at least 2 nodes, got {n}")));
    }
    let real: Vec<f64> = match strategy {
        InputStrategy::Uniform => vec![1.0 / (n as f64).sqrt(); n],
        InputStrategy::Node(s) => {
            if s >= n {
                return Err(Error::NodeOutOfRange { index: s, nodes: n });
            }
            let mut v = vec![0.0; n];
            v[s] = 1.0;
            v
        }
        InputStrategy::Ramp => {
            let norm = (1..=n).map(|i| (i * i) as f64).sum::<f64>().sqrt();
            (1..=n).map(|i| i as f64 / norm).collect()
        }
    };
    Ok(InputState {
        amplitudes: real.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        strategy,
    })
}

/// How `U` is built for the controlled powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evolution {
    #[default]
    Exact,
    Trotter(usize),
}

impl fmt::Display for Evolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => f.write_str("exact"),
            Self::Trotter(n) => write!(f, "trotter:{n}"),
        }
    }
}

impl FromStr for Evolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Self::Exact);
        }
        match s.strip_prefix("trotter:").map(str::parse::<usize>) {
            Some(Ok(n)) if n >= 1 => Ok(Self::Trotter(n)),
            _ => Err(Error::InvalidConfig(format!("unknown evolution '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exact,
    Shots,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Shots => "shots",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "shots" => Ok(Self::Shots),
            _ => Err(Error::InvalidConfig(format!("unknown mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpeConfig {
    pub qubits: u32,
    pub time: f64,
    pub evolution: Evolution,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
}

impl QpeConfig {
    pub fn exact(qubits: u32, time: f64) -> Self {
        Self { qubits, time, evolution: Evolution::Exact, mode: Mode::Exact, shots: 1, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        check_qubits(self.qubits)?;
        if !(self.time.is_finite() && self.time > 0.0) {
            return Err(Error::InvalidConfig(format!("evolution time must be positive, got {}", self.time)));
        }
        if self.mode == Mode::Shots && self.shots == 0 {
            return Err(Error::InvalidConfig("shot count must be at least 1".into()));
        }
        if self.evolution == Evolution::Trotter(0) {
            return Err(Error::InvalidConfig("Trotter step count must be at least 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_qubits(m: u32) -> Result<()> {
    if m == 0 || m > MAX_QUBITS {
        return Err(Error::InvalidConfig(format!(
            "counting qubits must be in 1..={MAX_QUBITS}, got {m}"
        )));
    }
    Ok(())
}

/// Probabilities of the `2^m` counting-register outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    probs: Vec<f64>,
}

impl PhaseDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if !probs.len().is_power_of_two() || probs.len() < 2 {
            return Err(Error::NotPowerOfTwo(probs.len()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidInput("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn qubits(&self) -> u32 {
        self.probs.len().trailing_zeros()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs.iter().zip(&other.probs).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Expected eigenvalue estimate under this distribution.
    pub fn mean_eigenvalue(&self, t: f64) -> f64 {
        let m = self.qubits();
        self.probs
            .iter()
            .enumerate()
            .map(|(y, p)| p * phase_to_eigenvalue(y, m, t))
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.probs).expect("distribution serializes")
    }
}

/// Gershgorin-based evolution time that keeps every eigenphase in `[0, 1)`.
pub fn choose_evolution_time(l: &LaplacianMatrix, m: u32) -> f64 {
    let upper = 2.0 * l.max_degree();
    if upper <= 0.0 {
        return 1.0;
    }
    let bins = (1u64 << m) as f64;
    TAU * (bins - 1.0) / (bins * upper)
}

/// `2 pi (y / 2^m) / t`.
pub fn phase_to_eigenvalue(y: usize, m: u32, t: f64) -> f64 {
    TAU * (y as f64 / (1u64 << m) as f64) / t
}

/// Probability that QPE with `m` counting qubits reports an outcome whose
/// phase is `delta` away from the true one.
pub fn fejer_kernel(delta: f64, m: u32) -> f64 {
    let bins = (1u64 << m) as f64;
    let den = (PI * delta).sin();
    if den.abs() < 1e-14 {
        return 1.0;
    }
    let num = (bins * PI * delta).sin();
    (num * num) / (bins * bins * den * den)
}

/// `P[y] = sum_k p_k K_m(phi_k - y / 2^m)`.
pub fn qpe_closed_form(phis: &[f64], weights: &[f64], m: u32) -> Result<PhaseDistribution> {
    check_qubits(m)?;
    if phis.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: phis.len(), actual: weights.len() });
    }
    let bins = 1usize << m;
    let mut probs = vec![0.0; bins];
    for (&phi, &p) in phis.iter().zip(weights) {
        if p == 0.0 {
            continue;
        }
        for (y, slot) in probs.iter_mut().enumerate() {
            *slot += p * fejer_kernel(phi - y as f64 / bins as f64, m);
        }
    }
    PhaseDistribution::new(probs)
}

/// Builds `U` from `cfg.evolution` and runs the circuit.
pub fn qpe_statevector(l: &LaplacianMatrix, psi: &InputState, cfg: &QpeConfig) -> Result<PhaseDistribution> {
    cfg.validate()?;
    if psi.amplitudes.len() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), actual: psi.amplitudes.len() });
    }
    let u = match cfg.evolution {
        Evolution::Exact => exact_unitary(&eigendecompose(l)?, cfg.time),
        Evolution::Trotter(steps) => trotter_unitary(&edge_split_laplacian(l), l.dim(), cfg.time, steps)?,
    };
    qpe_with_unitary(&u, &psi.amplitudes, cfg.qubits)
}

/// Statevector QPE on the joint register `|y> (x) |s>`, stored at index
/// `y * N + s`. Counting qubit `j` is bit `j` of `y` and controls `U^(2^j)`.
pub fn qpe_with_unitary(u: &UnitaryMatrix, psi: &[Complex64], m: u32) -> Result<PhaseDistribution> {
    check_qubits(m)?;
    let n = u.dim();
    if psi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: psi.len() });
    }
    let bins = 1usize << m;
    let zero = Complex64::new(0.0, 0.0);

    // |0...0> (x) |psi>
    let mut state = vec![zero; bins * n];
    state[..n].copy_from_slice(psi);

    for j in 0..m {
        hadamard(&mut state, n, j as usize);
    }

    let mut power = u.matrix().clone();
    let mut scratch = vec![zero; n];
    for j in 0..m as usize {
        if j > 0 {
            power = power.matmul(&power);
        }
        for y in (0..bins).filter(|y| y >> j & 1 == 1) {
            let seg = &mut state[y * n..(y + 1) * n];
            power.apply_into(seg, &mut scratch);
            seg.copy_from_slice(&scratch);
        }
    }

    let mut register = vec![zero; bins];
    for s in 0..n {
        for y in 0..bins {
            register[y] = state[y * n + s];
        }
        inverse_qft(&mut register)?;
        for y in 0..bins {
            state[y * n + s] = register[y];
        }
    }

    let probs = (0..bins)
        .map(|y| state[y * n..(y + 1) * n].iter().map(|a| a.norm_sqr()).sum())
        .collect();
    PhaseDistribution::new(probs)
}

/// Hadamard on counting qubit `q` of a joint state with system dimension `n`.
fn hadamard(state: &mut [Complex64], n: usize, q: usize) {
    let stride = (1usize << q) * n;
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for block in state.chunks_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = (x + y) * scale;
            *b = (x - y) * scale;
        }
    }
}

fn register_qubits(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

fn controlled_phase(reg: &mut [Complex64], a: usize, b: usize, theta: f64) {
    let mask = (1usize << a) | (1usize << b);
    let phase = Complex64::from_polar(1.0, theta);
    for (i, amp) in reg.iter_mut().enumerate() {
        if i & mask == mask {
            *amp *= phase;
        }
    }
}

fn reverse_qubits(reg: &mut [Complex64], m: usize) {
    for i in 0..reg.len() {
        let r = i.reverse_bits() >> (usize::BITS as usize - m);
        if m > 0 && r > i {
            reg.swap(i, r);
        }
    }
}

/// Circuit QFT: `|x> -> 2^{-m/2} sum_k exp(2 pi i x k / 2^m) |k>`.
pub fn qft(reg: &mut [Complex64]) -> Result<()> {
    let m = register_qubits(reg.len())?;
    for j in (0..m).rev() {
        hadamard(reg, 1, j);
        for k in (0..j).rev() {
            controlled_phase(reg, k, j, PI / (1u64 << (j - k)) as f64);
        }
    }
    reverse_qubits(reg, m);
    Ok(())
}

/// Circuit inverse QFT, the adjoint of [`qft`] gate by gate.
pub fn inverse_qft(reg: &mut [Complex64]) -> Result<()> {
    let m = register_qubits(reg.len())?;
    reverse_qubits(reg, m);
    for j in 0..m {
        for k in 0..j {
            controlled_phase(reg, k, j, -PI / (1u64 << (j - k)) as f64);
        }
        hadamard(reg, 1, j);
    }
    Ok(())
}

/// Measured outcome counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Histogram {
    pub shots: u64,
    pub bins: usize,
    pub counts: BTreeMap<usize, u64>,
}

impl Histogram {
    pub fn frequency(&self, y: usize) -> f64 {
        self.counts.get(&y).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    pub fn to_distribution(&self) -> Result<PhaseDistribution> {
        let mut probs = vec![0.0; self.bins];
        for (&y, &c) in &self.counts {
            probs[y] = c as f64 / self.shots as f64;
        }
        PhaseDistribution::new(probs)
    }

    pub fn to_json(&self) -> String {
        let map: serde_json::Map<String, serde_json::Value> =
            self.counts.iter().map(|(y, c)| (y.to_string(), (*c).into())).collect();
        serde_json::Value::Object(map).to_string()
    }
}

/// Inverse-CDF sampling driven by a SplitMix64 stream.
pub fn sample_shots(p: &PhaseDistribution, shots: u64, seed: u64) -> Histogram {
    let mut cdf = Vec::with_capacity(p.probs.len());
    let mut acc = 0.0;
    for &x in &p.probs {
        acc += x;
        cdf.push(acc);
    }
    let last = p.probs.iter().rposition(|&x| x > 0.0).unwrap_or(0);
    let mut rng = SplitMix64::new(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.next_f64() * acc;
        let y = cdf.partition_point(|&c| c <= u).min(last);
        *counts.entry(y).or_insert(0) += 1;
    }
    Histogram { shots, bins: p.probs.len(), counts }
}
