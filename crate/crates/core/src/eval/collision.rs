use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use super::{render_message, EvalReport};
use crate::error::{Error, Result};
use crate::pipeline::{HashConfig, Hasher};
use crate::walk::WeightedGraph;

/// Fingerprints closer than this are treated as the same value.
pub const FINGERPRINT_TOL: f64 = 1e-12;

/// Pipeline stage a digest collision is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionStage {
    /// The messages induced the same weighted graph.
    Graph,
    /// Different graphs whose fingerprints agree within roundoff.
    Fingerprint,
    /// Different fingerprints that quantize to the same 32-bit lanes.
    Quantization,
}

impl fmt::Display for CollisionStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollisionStage::Graph => "graph",
            CollisionStage::Fingerprint => "fingerprint",
            CollisionStage::Quantization => "quantization",
        })
    }
}

/// Hashes a corpus of distinct messages and reports digest-level and
/// graph-level collisions separately.
pub fn collision_scan(config: &HashConfig, corpus: &[Vec<u8>]) -> Result<EvalReport> {
    let mut seen = BTreeSet::new();
    for m in corpus {
        if !seen.insert(m.as_slice()) {
            return Err(Error::InvalidInput(format!(
                "duplicate message '{}' in collision corpus",
                render_message(m)
            )));
        }
    }
    let hasher = Hasher::new(config.clone())?;
    let results = corpus
        .par_iter()
        .map(|m| {
            let g = hasher.graph_bytes(m);
            let a = hasher.analyze(&g)?;
            Ok((g, a.fingerprint, a.digest))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut by_digest: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    let mut by_graph: BTreeMap<&WeightedGraph, Vec<usize>> = BTreeMap::new();
    for (i, (g, _, d)) in results.iter().enumerate() {
        by_digest.entry(*d).or_default().push(i);
        by_graph.entry(g).or_default().push(i);
    }

    let mut report = EvalReport::new(
        "collision",
        &config.config_id(),
        &["kind", "group_id", "stage", "message", "digest"],
    );
    report.param("grid_n", config.grid_n);
    report.param("messages", corpus.len());

    let mut digest_groups = 0usize;
    let mut stage_counts = BTreeMap::new();
    for members in by_digest.values().filter(|m| m.len() > 1) {
        let first = &results[members[0]];
        let stage = if members.iter().all(|&i| results[i].0 == first.0) {
            CollisionStage::Graph
        } else if members.iter().all(|&i| results[i].1.max_abs_diff(&first.1) <= FINGERPRINT_TOL) {
            CollisionStage::Fingerprint
        } else {
            CollisionStage::Quantization
        };
        *stage_counts.entry(stage.to_string()).or_insert(0u64) += 1;
        for &i in members {
            report.push(vec![
                "digest".into(),
                digest_groups.into(),
                stage.to_string().into(),
                render_message(&corpus[i]).into(),
                results[i].2.to_hex().into(),
            ]);
        }
        digest_groups += 1;
    }

    let mut graph_groups = 0usize;
    for members in by_graph.values().filter(|m| m.len() > 1) {
        for &i in members {
            report.push(vec![
                "graph".into(),
                graph_groups.into(),
                CollisionStage::Graph.to_string().into(),
                render_message(&corpus[i]).into(),
                results[i].2.to_hex().into(),
            ]);
        }
        graph_groups += 1;
    }

    let digest_collisions = corpus.len() - by_digest.len();
    report.stat("distinct_digests", by_digest.len());
    report.stat("distinct_graphs", by_graph.len());
    report.stat("digest_collisions", digest_collisions);
    report.stat("digest_collision_groups", digest_groups);
    report.stat("graph_collisions", corpus.len() - by_graph.len());
    report.stat("graph_collision_groups", graph_groups);
    for (stage, n) in stage_counts {
        report.stat(&format!("groups_at_{stage}"), n);
    }
    report.passed = digest_collisions == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Field;

    #[test]
    fn duplicates_are_input_errors() {
        let corpus = vec![b"ab".to_vec(), b"ab".to_vec()];
        assert!(matches!(collision_scan(&HashConfig::default(), &corpus), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn commuting_loops_collide_at_graph_stage() {
        // 'A' = U,D,D,U and 'D' = U,D,U,D both return to the start node
        let corpus = vec![b"AD".to_vec(), b"DA".to_vec(), b"Hi".to_vec()];
        let r = collision_scan(&HashConfig::default(), &corpus).unwrap();
        assert!(!r.passed);
        assert_eq!(r.get_stat("digest_collisions"), Some(&Field::UInt(1)));
        assert_eq!(r.get_stat("graph_collisions"), Some(&Field::UInt(1)));
        assert_eq!(r.get_stat("groups_at_graph"), Some(&Field::UInt(1)));
    }

    #[test]
    fn distinct_graphs_do_not_collide() {
        let corpus = vec![b"Hello".to_vec(), b"Hella".to_vec(), b"Hi".to_vec()];
        let r = collision_scan(&HashConfig::default(), &corpus).unwrap();
        assert!(r.passed);
        assert!(r.records().is_empty());
    }
}
