//! Brute-force enumeration of small simple graphs and canonical labeling.
//!
//! A graph on `n <= 8` vertices is an edge bitmask: bit `k` is the `k`-th
//! pair `(i, j)`, `i < j`, in lexicographic order. The canonical form is the
//! smallest mask over all vertex relabelings.

use crate::linalg::Matrix;
use crate::spectral::{laplacian, LaplacianMatrix};
use crate::walk::WeightedGraph;

pub const MAX_VERTICES: usize = 8;

pub fn edge_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn pair_index(n: usize) -> Vec<Vec<usize>> {
    let mut idx = vec![vec![usize::MAX; n]; n];
    for (k, (i, j)) in edge_pairs(n).into_iter().enumerate() {
        idx[i][j] = k;
        idx[j][i] = k;
    }
    idx
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Precomputed edge relabelings for every vertex permutation of `n` vertices.
pub struct Relabeler {
    n: usize,
    maps: Vec<Vec<u32>>,
}

impl Relabeler {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "brute force is limited to {MAX_VERTICES} vertices");
        let idx = pair_index(n);
        let pairs = edge_pairs(n);
        let maps = permutations(n)
            .into_iter()
            .map(|p| pairs.iter().map(|&(i, j)| 1u32 << idx[p[i]][p[j]]).collect())
            .collect();
        Self { n, maps }
    }

    pub fn relabel(&self, mask: u32, perm: usize) -> u32 {
        let map = &self.maps[perm];
        let mut out = 0;
        let mut rest = mask;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            out |= map[k];
            rest &= rest - 1;
        }
        out
    }

    pub fn canonical(&self, mask: u32) -> u32 {
        (0..self.maps.len()).map(|p| self.relabel(mask, p)).min().unwrap()
    }

    pub fn vertices(&self) -> usize {
        self.n
    }
}

pub fn is_connected(n: usize, mask: u32) -> bool {
    if n == 0 {
        return true;
    }
    let pairs = edge_pairs(n);
    let mut reached = 1u32;
    loop {
        let before = reached;
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 && (reached >> i & 1 == 1 || reached >> j & 1 == 1) {
                reached |= (1 << i) | (1 << j);
            }
        }
        if reached == before {
            return reached.count_ones() as usize == n;
        }
    }
}

/// Canonical masks of all connected simple graphs on `n` vertices, sorted.
pub fn connected_classes(n: usize) -> Vec<u32> {
    let relabeler = Relabeler::new(n);
    let edges = edge_pairs(n).len();
    let mut classes: Vec<u32> = (0..1u32 << edges)
        .filter(|&m| is_connected(n, m))
        .map(|m| relabeler.canonical(m))
        .collect();
    classes.sort_unstable();
    classes.dedup();
    classes
}

pub fn to_graph(n: usize, mask: u32) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    for (k, (i, j)) in edge_pairs(n).into_iter().enumerate() {
        if mask >> k & 1 == 1 {
            g.add_weight(i, j, 1).expect("pairs are in range and distinct");
        }
    }
    g
}

pub fn laplacian_of(n: usize, mask: u32) -> LaplacianMatrix {
    laplacian(&to_graph(n, mask))
}

/// Dense adjacency for diagnostics.
pub fn adjacency(n: usize, mask: u32) -> Matrix {
    let mut a = Matrix::zeros(n, n);
    for (k, (i, j)) in edge_pairs(n).into_iter().enumerate() {
        if mask >> k & 1 == 1 {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(6).len(), 720);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
    }

    #[test]
    fn connected_class_counts_match_known_sequence() {
        // OEIS A001349: 1, 1, 2, 6, 21, 112
        let counts: Vec<usize> = (1..=6).map(|n| connected_classes(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn canonical_form_is_label_invariant() {
        let r = Relabeler::new(5);
        let path = 0b1 | 0b1 << 4 | 0b1 << 7; // 0-1, 1-2, 2-3
        let c = r.canonical(path);
        for p in 0..120 {
            assert_eq!(r.canonical(r.relabel(path, p)), c);
        }
    }

    #[test]
    fn connectivity() {
        assert!(is_connected(3, 0b011));
        assert!(!is_connected(3, 0b001));
        assert!(!is_connected(4, 0b100001)); // 0-1 and 2-3
    }
}
