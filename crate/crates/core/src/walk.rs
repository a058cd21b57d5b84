//! Message-driven walk on a toroidal grid.
//!
//! A message is expanded to bits, padded to an even length, cut into 2-bit
//! blocks, and each block moves a walker one step on an `n x n` torus. Every
//! traversal adds one to the weight of the undirected edge it crosses.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2-bit movement symbol, `0b00..=0b11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block(u8);

impl Block {
    pub fn new(bits: u8) -> Result<Self> {
        if bits > 3 {
            return Err(Error::InvalidInput(format!("block value {bits} exceeds 2 bits")));
        }
        Ok(Self(bits))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl std::fmt::Display for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitBlockStream {
    pub bits: Vec<bool>,
    pub blocks: Vec<Block>,
}

/// Big-endian bit expansion of the message's UTF-8 bytes.
pub fn encode_utf8(message: &str) -> BitBlockStream {
    encode_bytes(message.as_bytes())
}

pub fn encode_bytes(bytes: &[u8]) -> BitBlockStream {
    let bits = bytes
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
        .collect();
    BitBlockStream { bits, blocks: Vec::new() }
}

/// Appends a single zero when the bit count is odd, then groups bits in pairs.
pub fn pad_and_block(bits: &[bool]) -> BitBlockStream {
    let mut bits = bits.to_vec();
    if bits.len() % 2 == 1 {
        bits.push(false);
    }
    let blocks = bits
        .chunks_exact(2)
        .map(|pair| Block(((pair[0] as u8) << 1) | pair[1] as u8))
        .collect();
    BitBlockStream { bits, blocks }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Down,
    Up,
    Right,
    Left,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Down, Direction::Up, Direction::Right, Direction::Left];
}

/// Bijection from the four block values to the four directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionMap {
    table: [Direction; 4],
}

impl Default for DirectionMap {
    /// `00 -> down, 01 -> up, 10 -> right, 11 -> left`.
    fn default() -> Self {
        Self { table: Direction::ALL }
    }
}

impl DirectionMap {
    pub const COUNT: usize = 24;

    pub fn new(table: [Direction; 4]) -> Result<Self> {
        for d in Direction::ALL {
            if table.iter().filter(|&&x| x == d).count() != 1 {
                return Err(Error::InvalidConfig(format!(
                    "direction map {table:?} is not a bijection"
                )));
            }
        }
        Ok(Self { table })
    }

    /// The `id`-th permutation of `[down, up, right, left]` in lexicographic
    /// order; id 0 is the default map.
    pub fn from_id(id: usize) -> Result<Self> {
        if id >= Self::COUNT {
            return Err(Error::InvalidConfig(format!(
                "direction map id {id} must be below {}",
                Self::COUNT
            )));
        }
        let mut pool: Vec<Direction> = Direction::ALL.to_vec();
        let mut rest = id;
        let mut table = [Direction::Down; 4];
        for (slot, radix) in table.iter_mut().zip([6usize, 2, 1, 1]) {
            *slot = pool.remove(rest / radix);
            rest %= radix;
        }
        Ok(Self { table })
    }

    pub fn id(&self) -> usize {
        (0..Self::COUNT)
            .find(|&id| Self::from_id(id).map(|m| m == *self).unwrap_or(false))
            .expect("every bijection has an id")
    }

    pub fn direction(&self, block: Block) -> Direction {
        self.table[block.0 as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    n: usize,
}

impl TorusGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("grid side must be at least 2, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.n * self.n
    }

    pub fn node(&self, row: usize, col: usize) -> usize {
        row * self.n + col
    }

    pub fn coords(&self, node: usize) -> (usize, usize) {
        (node / self.n, node % self.n)
    }

    /// Neighbor reached by one step; "up" decrements the row.
    pub fn step(&self, node: usize, dir: Direction) -> usize {
        let n = self.n;
        let (r, c) = self.coords(node);
        match dir {
            Direction::Up => self.node((r + n - 1) % n, c),
            Direction::Down => self.node((r + 1) % n, c),
            Direction::Right => self.node(r, (c + 1) % n),
            Direction::Left => self.node(r, (c + n - 1) % n),
        }
    }

    pub fn are_adjacent(&self, u: usize, v: usize) -> bool {
        Direction::ALL.iter().any(|&d| self.step(u, d) == v)
    }
}

/// Undirected graph with positive integer edge weights and no self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedGraph {
    n_nodes: usize,
    weights: BTreeMap<(usize, usize), u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub w: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    n: usize,
    edges: Vec<EdgeRecord>,
}

impl WeightedGraph {
    pub fn new(n_nodes: usize) -> Self {
        Self { n_nodes, weights: BTreeMap::new() }
    }

    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut g = Self::new(n_nodes);
        for &(u, v, w) in edges {
            g.add_weight(u, v, w)?;
        }
        Ok(g)
    }

    pub fn add_weight(&mut self, u: usize, v: usize, w: u64) -> Result<()> {
        for x in [u, v] {
            if x >= self.n_nodes {
                return Err(Error::NodeOutOfRange { index: x, nodes: self.n_nodes });
            }
        }
        if u == v {
            return Err(Error::InvalidInput(format!("self-loop at node {u}")));
        }
        if w > 0 {
            *self.weights.entry((u.min(v), u.max(v))).or_insert(0) += w;
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn weight(&self, u: usize, v: usize) -> u64 {
        self.weights.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.weights.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.values().sum()
    }

    pub fn degree(&self, node: usize) -> u64 {
        self.edges()
            .filter(|&(u, v, _)| u == node || v == node)
            .map(|(_, _, w)| w)
            .sum()
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            n: self.n_nodes,
            edges: self.edges().map(|(u, v, w)| EdgeRecord { u, v, w }).collect(),
        };
        serde_json::to_string(&doc).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let mut g = Self::new(doc.n);
        for e in doc.edges {
            g.add_weight(e.u, e.v, e.w)?;
        }
        Ok(g)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for i in 0..self.n_nodes {
            let _ = writeln!(out, "  {i};");
        }
        for (u, v, w) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v} [weight={w}, label=\"{w}\"];");
        }
        out.push_str("}\n");
        out
    }
}

/// Traces the walk and accumulates edge traversal counts.
pub fn walk(
    blocks: &[Block],
    grid: TorusGrid,
    map: DirectionMap,
    start: usize,
) -> Result<WeightedGraph> {
    let nodes = grid.nodes();
    if start >= nodes {
        return Err(Error::NodeOutOfRange { index: start, nodes });
    }
    // Dense counters: slot 2*node for the edge to the right, 2*node+1 for the edge below.
    let mut counts = vec![0u64; 2 * nodes];
    let mut pos = start;
    for &block in blocks {
        let dir = map.direction(block);
        let next = grid.step(pos, dir);
        let slot = match dir {
            Direction::Right => 2 * pos,
            Direction::Left => 2 * next,
            Direction::Down => 2 * pos + 1,
            Direction::Up => 2 * next + 1,
        };
        counts[slot] += 1;
        pos = next;
    }
    let mut graph = WeightedGraph::new(nodes);
    for (slot, &w) in counts.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let node = slot / 2;
        let dir = if slot % 2 == 0 { Direction::Right } else { Direction::Down };
        graph.add_weight(node, grid.step(node, dir), w)?;
    }
    Ok(graph)
}

/// Final walker position, used only for diagnostics and tests.
pub fn walk_end(blocks: &[Block], grid: TorusGrid, map: DirectionMap, start: usize) -> usize {
    blocks.iter().fold(start, |pos, &b| grid.step(pos, map.direction(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().filter(|c| !c.is_whitespace()).map(|c| c == '1').collect()
    }

    fn blocks(s: &[&str]) -> Vec<Block> {
        s.iter().map(|b| Block::new(u8::from_str_radix(b, 2).unwrap()).unwrap()).collect()
    }

    #[test]
    fn utf8_expansion() {
        assert_eq!(encode_utf8("Hi").bits, bits("01001000 01101001"));
        assert_eq!(encode_utf8("A").bits, bits("01000001"));
        assert!(encode_utf8("").bits.is_empty());
        // multi-byte characters expand byte by byte
        assert_eq!(encode_utf8("é").bits, bits("11000011 10101001"));
    }

    #[test]
    fn padding() {
        let s = pad_and_block(&bits("010"));
        assert_eq!(s.blocks, blocks(&["01", "00"]));
        assert_eq!(s.bits, bits("0100"));
        assert!(pad_and_block(&[]).blocks.is_empty());
        assert_eq!(pad_and_block(&bits("01001000")).blocks, blocks(&["01", "00", "10", "00"]));
    }

    #[test]
    fn direction_map_ids() {
        assert_eq!(DirectionMap::from_id(0).unwrap(), DirectionMap::default());
        let mut seen = std::collections::HashSet::new();
        for id in 0..24 {
            let m = DirectionMap::from_id(id).unwrap();
            assert_eq!(m.id(), id);
            assert!(seen.insert(m.table));
        }
        assert!(DirectionMap::from_id(24).is_err());
        assert!(DirectionMap::new([Direction::Up, Direction::Up, Direction::Left, Direction::Right]).is_err());
    }

    #[test]
    fn grid_rejects_degenerate_side() {
        assert!(TorusGrid::new(1).is_err());
        assert!(TorusGrid::new(0).is_err());
    }

    #[test]
    fn empty_walk() {
        let g = walk(&[], TorusGrid::new(4).unwrap(), DirectionMap::default(), 0).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.total_weight(), 0);
        assert_eq!(g.n_nodes(), 16);
    }

    #[test]
    fn single_step_right() {
        let grid = TorusGrid::new(4).unwrap();
        let b = blocks(&["10"]);
        let g = walk(&b, grid, DirectionMap::default(), 0).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 1)]);
        assert_eq!(walk_end(&b, grid, DirectionMap::default(), 0), 1);
    }

    #[test]
    fn hi_golden_walk() {
        // U, D, R, D, U, R, R, U from (0,0):
        // (0,0)->(3,0)->(0,0)->(0,1)->(1,1)->(0,1)->(0,2)->(0,3)->(3,3)
        let stream = pad_and_block(&encode_utf8("Hi").bits);
        assert_eq!(stream.blocks, blocks(&["01", "00", "10", "00", "01", "10", "10", "01"]));
        let grid = TorusGrid::new(4).unwrap();
        let g = walk(&stream.blocks, grid, DirectionMap::default(), 0).unwrap();
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1, 1), (0, 12, 2), (1, 2, 1), (1, 5, 2), (2, 3, 1), (3, 15, 1)]
        );
        assert_eq!(g.total_weight(), 8);
        assert_eq!(walk_end(&stream.blocks, grid, DirectionMap::default(), 0), 15);
    }

    #[test]
    fn two_by_two_merges_parallel_steps() {
        // on n = 2, right and left from column 0 cross the same node pair
        let grid = TorusGrid::new(2).unwrap();
        let g = walk(&blocks(&["10", "10"]), grid, DirectionMap::default(), 0).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 2)]);
    }

    #[test]
    fn out_of_range_start() {
        let grid = TorusGrid::new(3).unwrap();
        assert!(matches!(
            walk(&[], grid, DirectionMap::default(), 9),
            Err(Error::NodeOutOfRange { index: 9, nodes: 9 })
        ));
    }

    #[test]
    fn graph_rejects_self_loops() {
        let mut g = WeightedGraph::new(3);
        assert!(g.add_weight(1, 1, 1).is_err());
        assert!(g.add_weight(0, 3, 1).is_err());
    }

    #[test]
    fn json_is_sorted_and_parses_back() {
        let g = WeightedGraph::from_edges(4, &[(3, 2, 1), (1, 0, 5), (2, 0, 2)]).unwrap();
        let json = g.to_json();
        assert_eq!(
            json,
            r#"{"n":4,"edges":[{"u":0,"v":1,"w":5},{"u":0,"v":2,"w":2},{"u":2,"v":3,"w":1}]}"#
        );
        assert_eq!(WeightedGraph::from_json(&json).unwrap(), g);
    }

    #[test]
    fn dot_export() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 3)]).unwrap();
        assert_eq!(g.to_dot(), "graph G {\n  0;\n  1;\n  0 -- 1 [weight=3, label=\"3\"];\n}\n");
    }
}
