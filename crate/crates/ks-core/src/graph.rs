//! Configuration-model multigraphs built by uniform half-edge pairing.
//!
//! The raw pairing may contain self-loops and parallel edges; a self-loop
//! contributes 2 to its endpoint's degree and 2 entries to its incidence
//! list. `erase_to_simple` is the opt-in cleanup (erasure, not rejection
//! sampling).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("total degree {total} is odd; half-edges cannot be paired")]
    OddTotalDegree { total: usize },
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
}

/// Undirected multigraph with explicit per-vertex incidence.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGraph {
    n: usize,
    degrees: Vec<usize>,
    edges: Vec<(usize, usize)>,
    /// Per vertex: (edge index, endpoint slot); a self-loop appears twice.
    incidence: Vec<Vec<(usize, u8)>>,
}

/// Multiplicity diagnostics of one multigraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub self_loop_count: usize,
    pub multi_edge_count: usize,
    pub isolated_count: usize,
}

impl MultiGraph {
    /// Builds the graph from an explicit edge list (tests and fixtures).
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { u, v, n });
            }
        }
        let mut degrees = vec![0usize; n];
        let mut incidence = vec![Vec::new(); n];
        for (idx, &(u, v)) in edges.iter().enumerate() {
            degrees[u] += 1;
            degrees[v] += 1;
            incidence[u].push((idx, 0));
            incidence[v].push((idx, 1));
        }
        Ok(Self {
            n,
            degrees,
            edges,
            incidence,
        })
    }

    /// Uniform configuration-model pairing: shuffle the half-edge multiset
    /// with a seeded generator, then pair consecutive entries. Deterministic
    /// given `seed`.
    pub fn pair_half_edges(degrees: &[usize], seed: u64) -> Result<Self, GraphError> {
        let total: usize = degrees.iter().sum();
        if total % 2 == 1 {
            return Err(GraphError::OddTotalDegree { total });
        }
        let mut half_edges = Vec::with_capacity(total);
        for (v, &d) in degrees.iter().enumerate() {
            half_edges.extend(std::iter::repeat_n(v, d));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        half_edges.shuffle(&mut rng);
        let edges: Vec<(usize, usize)> = half_edges
            .chunks_exact(2)
            .map(|pair| (pair[0], pair[1]))
            .collect();
        Self::from_edges(degrees.len(), edges)
    }

    /// Removes self-loops and collapses parallel edges; degrees recomputed.
    pub fn erase_to_simple(&self) -> MultiGraph {
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            if u == v {
                continue;
            }
            if seen.insert((u.min(v), u.max(v))) {
                edges.push((u, v));
            }
        }
        MultiGraph::from_edges(self.n, edges).expect("vertex ids already validated")
    }

    pub fn stats(&self) -> GraphStats {
        let self_loop_count = self.edges.iter().filter(|&&(u, v)| u == v).count();
        let mut distinct = HashSet::new();
        let mut non_loop = 0usize;
        for &(u, v) in &self.edges {
            if u != v {
                non_loop += 1;
                distinct.insert((u.min(v), u.max(v)));
            }
        }
        GraphStats {
            self_loop_count,
            multi_edge_count: non_loop - distinct.len(),
            isolated_count: self.degrees.iter().filter(|&&d| d == 0).count(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn incidence(&self, v: usize) -> &[(usize, u8)] {
        &self.incidence[v]
    }

    /// The endpoint of edge `e` opposite to `v` (equals `v` for a loop).
    pub fn other_endpoint(&self, e: usize, v: usize) -> usize {
        let (u, w) = self.edges[e];
        if u == v {
            w
        } else {
            u
        }
    }

    /// Plain-text dump: header `# n=<n> m=<m>`, then one `u v` per line.
    pub fn write_edge_list(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "# n={} m={}", self.n, self.edges.len())?;
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}
