//! Shared fixtures for the integration suites: frozen oracle constants,
//! labeled-tree generation via Prüfer sequences, and the brute-force
//! maximum-matching oracle.

#![allow(dead_code)]
#![allow(clippy::excessive_precision)]

use ks_core::graph::MultiGraph;
use rand::Rng;

// Pre-build bisection-oracle values (40-digit mpmath on the power series)
// for the law pmf {1: 0.1, 3: 0.9}.
pub const A_ALPHA_LOW: f64 = 0.078728070850447510;
pub const A_ALPHA_MID: f64 = 0.60791898709226291;
pub const A_ALPHA_HIGH: f64 = 0.95830896618658953;
pub const A_STABILITY: f64 = 0.28061224489795918;
pub const A_CORE_FRACTION: f64 = 0.77690311215869294;
pub const A_SURVIVAL_DELTA_20: f64 = 0.77690329722060533;

// Truncated Poisson(2, 20): unique transversal root.
pub const POISSON_ROOT: f64 = 0.57369724899312243;

/// Decodes a Prüfer sequence over `[0, n)` into its labeled tree;
/// `seq.len() == n - 2`.
pub fn tree_from_prufer(n: usize, seq: &[usize]) -> MultiGraph {
    assert!(n >= 2);
    assert_eq!(seq.len(), n - 2);
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let mut rest = (0..n).filter(|&v| degree[v] == 1);
    let (u, v) = (rest.next().unwrap(), rest.next().unwrap());
    edges.push((u, v));
    MultiGraph::from_edges(n, edges).unwrap()
}

pub fn random_labeled_tree(n: usize, rng: &mut impl Rng) -> MultiGraph {
    if n == 1 {
        return MultiGraph::from_edges(1, vec![]).unwrap();
    }
    let seq: Vec<usize> = (0..n.saturating_sub(2))
        .map(|_| rng.gen_range(0..n))
        .collect();
    tree_from_prufer(n, &seq)
}

/// Disjoint union of random trees: a random labeled forest.
pub fn random_forest(component_sizes: &[usize], rng: &mut impl Rng) -> MultiGraph {
    let n: usize = component_sizes.iter().sum();
    let mut edges = Vec::new();
    let mut offset = 0;
    for &size in component_sizes {
        let tree = random_labeled_tree(size, rng);
        edges.extend(tree.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
        offset += size;
    }
    MultiGraph::from_edges(n, edges).unwrap()
}

/// Exhaustive maximum-matching size by branching over edges; fine for the
/// tree sizes the oracle runs on (m <= 11).
pub fn max_matching_brute(g: &MultiGraph) -> usize {
    fn recurse(edges: &[(usize, usize)], i: usize, used: u64) -> usize {
        if i == edges.len() {
            return 0;
        }
        let mut best = recurse(edges, i + 1, used);
        let (u, v) = edges[i];
        if u != v && used & (1 << u) == 0 && used & (1 << v) == 0 {
            best = best.max(1 + recurse(edges, i + 1, used | (1 << u) | (1 << v)));
        }
        best
    }
    assert!(g.n() <= 64);
    recurse(g.edges(), 0, 0)
}
