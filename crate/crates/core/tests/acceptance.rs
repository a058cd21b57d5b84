//! Acceptance criteria for the hash, the phase-estimation engine and the
//! evaluation harness. Each criterion prints one PASS/FAIL line.
//!
//! Criteria run one at a time (timing and the corpus scans would otherwise
//! compete for cores).

use std::f64::consts::TAU;
use std::sync::Mutex;

use qgh_core::eval::{self, Field, FlipStrategy, SeedPolicy};
use qgh_core::evolution::{edge_split, exact_unitary, operator_distance, trotter_unitary};
use qgh_core::qpe::{
    choose_evolution_time, prepare_input_state, qpe_closed_form, qpe_statevector, InputStrategy, QpeConfig,
};
use qgh_core::spectral::{eigendecompose, exact_heat_trace, laplacian, overlaps};
use qgh_core::{hamming_distance, heat_traces, FingerprintConfig, HashConfig, Hasher, WeightedGraph};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(id: u32, name: &str, ok: bool, detail: String) {
    println!("AC{id:02} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "AC{id:02} {name} failed: {detail}");
}

fn example_graph() -> WeightedGraph {
    WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 2)]).unwrap()
}

fn message_graphs(count: usize, len: usize, seed: u64) -> Vec<WeightedGraph> {
    let hasher = Hasher::new(HashConfig::default()).unwrap();
    eval::random_messages(count, len, seed).iter().map(|m| hasher.graph_bytes(m)).collect()
}

fn uint(f: Option<&Field>) -> u64 {
    match f {
        Some(Field::UInt(x)) => *x,
        other => panic!("expected an unsigned stat, got {other:?}"),
    }
}

fn float(f: Option<&Field>) -> f64 {
    match f {
        Some(Field::Float(x)) => *x,
        other => panic!("expected a float stat, got {other:?}"),
    }
}

#[test]
fn ac01_worked_example() {
    let _g = serial();
    let l = laplacian(&example_graph());
    let laplacian_ok =
        l.matrix().to_rows() == vec![vec![1.0, -1.0, 0.0], vec![-1.0, 3.0, -2.0], vec![0.0, -2.0, 2.0]];

    let d = eigendecompose(&l).unwrap();
    let expected_values = [0.36, 2.20, 3.44];
    let values_ok = d.values.iter().zip(expected_values).all(|(a, b)| (a - b).abs() <= 0.01);

    let psi = prepare_input_state(InputStrategy::Node(0), 3).unwrap();
    let ov = overlaps(&d, &psi.amplitudes).unwrap();
    let mags: Vec<f64> = ov.amplitudes.iter().map(|c| c.norm()).collect();
    let expected_mags = [0.62, 0.77, 0.14];
    let overlaps_ok = mags.iter().zip(expected_mags).all(|(a, b)| (a - b).abs() <= 0.01);

    verdict(
        1,
        "worked example",
        laplacian_ok && values_ok && overlaps_ok,
        format!(
            "laplacian exact={laplacian_ok}; eigenvalues {:?} vs {expected_values:?} ok={values_ok}; \
             |c| {:?} vs {expected_mags:?} ok={overlaps_ok}",
            d.values, mags
        ),
    );
}

#[test]
fn ac02_qpe_oracle_equivalence() {
    let _g = serial();
    let graphs = message_graphs(100, 16, 0xac02);
    let mut worst = 0.0f64;
    for g in &graphs {
        let l = laplacian(g);
        let d = eigendecompose(&l).unwrap();
        for m in [4, 6, 8] {
            let t = choose_evolution_time(&l, m);
            let phis: Vec<f64> = d.values.iter().map(|&x| x * t / TAU).collect();
            for strategy in [InputStrategy::Uniform, InputStrategy::Node(0), InputStrategy::Ramp] {
                let psi = prepare_input_state(strategy, g.n_nodes()).unwrap();
                let ov = overlaps(&d, &psi.amplitudes).unwrap();
                let closed = qpe_closed_form(&phis, &ov.probabilities, m).unwrap();
                let sv = qpe_statevector(&l, &psi, &QpeConfig::exact(m, t)).unwrap();
                worst = worst.max(closed.max_abs_diff(&sv));
            }
        }
    }
    verdict(2, "QPE oracle equivalence", worst <= 1e-9, format!("max L-inf {worst:e} over 900 runs"));
}

#[test]
fn ac03_uniform_input_degeneracy() {
    let _g = serial();
    let hasher = Hasher::new(HashConfig { input: InputStrategy::Uniform, ..Default::default() }).unwrap();
    let mut min_p0 = 1.0f64;
    let mut max_dev = 0.0f64;
    for g in message_graphs(50, 16, 0xac03) {
        let a = hasher.analyze(&g).unwrap();
        min_p0 = min_p0.min(a.distribution.probs()[0]);
        for h in a.fingerprint.values() {
            max_dev = max_dev.max((h - 1.0).abs());
        }
    }
    verdict(
        3,
        "uniform-input degeneracy",
        min_p0 >= 1.0 - 1e-10 && max_dev <= 1e-9,
        format!("min P[0] = {min_p0}, max |h - 1| = {max_dev:e}"),
    );
}

#[test]
fn ac04_heat_trace_convergence() {
    let _g = serial();
    let cfg = FingerprintConfig::default();
    let mut failures = 0;
    let mut worst_ratio = 0.0f64;
    for g in message_graphs(20, 16, 0xac04) {
        let l = laplacian(&g);
        let d = eigendecompose(&l).unwrap();
        let psi = prepare_input_state(InputStrategy::Ramp, g.n_nodes()).unwrap();
        let ov = overlaps(&d, &psi.amplitudes).unwrap();
        let errors = |m: u32| -> Vec<f64> {
            let t = choose_evolution_time(&l, m);
            let p = qpe_statevector(&l, &psi, &QpeConfig::exact(m, t)).unwrap();
            let fp = heat_traces(&p, t, &cfg);
            cfg.taus()
                .iter()
                .zip(fp.values())
                .map(|(&tau, h)| (h - exact_heat_trace(&d, &ov, tau)).abs())
                .collect()
        };
        let coarse = errors(4);
        let fine = errors(10);
        for (c, f) in coarse.iter().zip(&fine) {
            if f >= c {
                failures += 1;
            }
            worst_ratio = worst_ratio.max(f / c);
        }
    }
    verdict(
        4,
        "heat-trace convergence",
        failures == 0,
        format!("{failures} (graph, tau) cases not improved; worst error ratio m=10/m=4 = {worst_ratio:.3e}"),
    );
}

#[test]
fn ac05_trotter_convergence() {
    let _g = serial();
    let steps = [1usize, 2, 4, 8, 16, 32];
    let mut graphs = vec![example_graph()];
    graphs.extend(message_graphs(10, 4, 0xac05));
    let mut problems = Vec::new();
    let mut worst_ratio = 0.0f64;
    for (gi, g) in graphs.iter().enumerate() {
        let d = eigendecompose(&laplacian(g)).unwrap();
        let exact = exact_unitary(&d, 1.0);
        let terms = edge_split(g);
        let dist: Vec<f64> = steps
            .iter()
            .map(|&n| operator_distance(&exact, &trotter_unitary(&terms, g.n_nodes(), 1.0, n).unwrap()).unwrap())
            .collect();
        for i in 1..steps.len() {
            if dist[i] >= dist[i - 1] {
                problems.push(format!("graph {gi}: d({}) >= d({})", steps[i], steps[i - 1]));
            }
            if steps[i - 1] >= 4 {
                let ratio = dist[i] / dist[i - 1];
                worst_ratio = worst_ratio.max(ratio);
                if ratio > 0.75 {
                    problems.push(format!("graph {gi}: d({})/d({}) = {ratio:.3}", steps[i], steps[i - 1]));
                }
            }
        }
    }
    verdict(
        5,
        "Trotter convergence",
        problems.is_empty(),
        format!("worst ratio for n >= 4: {worst_ratio:.3}; issues: {problems:?}"),
    );
}

#[test]
fn ac06_determinism() {
    let _g = serial();
    let msgs = eval::random_messages(100, 16, 0xac06);
    let r = eval::determinism_test(&HashConfig::default(), &msgs, 5, SeedPolicy::Fixed).unwrap();
    let pairs = r.records().len();
    let max = uint(r.get_stat("max_hamming"));
    verdict(6, "determinism", r.passed && max == 0 && pairs == 1000, format!("{pairs} pairs, max distance {max}"));
}

#[test]
fn ac07_avalanche() {
    let _g = serial();
    let cfg = HashConfig::default();
    let msgs = eval::random_messages(1000, 16, 0xac07);
    let r = eval::avalanche_test(&cfg, &msgs, FlipStrategy::OneBit { seed: 0xac07 }).unwrap();
    let mean = float(r.get_stat("mean_hamming"));
    let min = uint(r.get_stat("min_hamming"));

    let hasher = Hasher::new(cfg).unwrap();
    let hello_hella = hamming_distance(&hasher.hash("Hello").unwrap(), &hasher.hash("Hella").unwrap());
    let graphs_differ = hasher.graph("Hello") != hasher.graph("Hella");

    verdict(
        7,
        "avalanche",
        mean >= 96.0 && min >= 8 && hello_hella > 0 && graphs_differ,
        format!("mean {mean:.2}/256, min {min}/256, Hello/Hella distance {hello_hella}, graphs differ {graphs_differ}"),
    );
}

#[test]
fn ac08_collisions() {
    let _g = serial();
    let corpus = eval::printable_pairs();
    let n4 = eval::collision_scan(&HashConfig::default(), &corpus).unwrap();
    let n2 = eval::collision_scan(&HashConfig { grid_n: 2, ..Default::default() }, &corpus).unwrap();
    let n4_digest = uint(n4.get_stat("digest_collisions"));
    let n4_graph = uint(n4.get_stat("graph_collisions"));
    let n2_graph = uint(n2.get_stat("graph_collisions"));
    verdict(
        8,
        "collisions",
        n4_digest == 0 && n2_graph >= 1,
        format!(
            "n=4: {n4_digest} digest collisions ({n4_graph} at graph level, {} groups); n=2: {n2_graph} graph collisions",
            uint(n4.get_stat("digest_collision_groups"))
        ),
    );
}

#[test]
fn ac09_timing_shape() {
    let _g = serial();
    let r = eval::timing_profile(&HashConfig::default(), &[100, 1_000, 10_000, 100_000], 9, 0xac09).unwrap();
    let r2 = float(r.get_stat("walker_r_squared"));
    let spread = float(r.get_stat("spectral_max_rel_deviation"));
    verdict(
        9,
        "timing shape",
        r2 >= 0.95 && spread <= 0.20,
        format!("walker R^2 {r2:.4}, spectral max deviation {:.1}%", spread * 100.0),
    );
}

#[test]
fn ac10_cospectral_distinction() {
    let _g = serial();
    let r = eval::cospectral_test(&HashConfig::default(), 6).unwrap();
    let gap = float(r.get_stat("spectrum_max_diff"));
    let fp = float(r.get_stat("ramp_fingerprint_linf"));
    verdict(
        10,
        "co-spectral distinction",
        gap <= 1e-9 && fp > 1e-6,
        format!("eigenvalue gap {gap:e}, ramp fingerprint L-inf {fp:e}"),
    );
}

#[test]
fn ac11_golden_digests() {
    let _g = serial();
    let golden = [
        ("", "e8c2c97c461437571f617b578c286eaed21ebc4363f15c4f9673056c1850dd5c"),
        ("Hi", "03e4f0eb17f0ef54128fcf1aa6e2abbe8e0d85a73185f50788ffe93f69ca2805"),
        ("Hello", "f23aafdd00ba46e040edb67cbce909ef51a7697a93610803716830d972afe476"),
        ("Hella", "2bdc428e7638388896b5ff91880a4408cae79e87ece50257fc7c9fff4b0ffc64"),
    ];
    let hasher = Hasher::new(HashConfig::default()).unwrap();
    let mismatches: Vec<String> = golden
        .iter()
        .filter_map(|(msg, want)| {
            let got = hasher.hash(msg).unwrap().to_hex();
            (got != *want).then(|| format!("{msg:?}: {got}"))
        })
        .collect();
    verdict(11, "golden digests", mismatches.is_empty(), format!("mismatches: {mismatches:?}"));
}
