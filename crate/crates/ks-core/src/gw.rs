//! Unimodular Galton-Watson trees and upward Warning Propagation.
//!
//! The root's child count follows the degree law itself; every other node's
//! child count follows the size-biased offspring law. Trees are truncated at
//! a fixed depth and materialized breadth-first, level by level, so a deeper
//! sampling of the same seed re-derives the shallower tree as a prefix.
//! Only child-to-parent messages exist; round-`t` messages from the root's
//! children are exact once the tree reaches depth `t + 1`.

use crate::degree::{cumulative, draw, DegreeDistribution};
use crate::fixed_point::MessageDistribution;
use crate::seeds::mix_seed;
use crate::wp::Msg;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Expected-size guard for tree materialization.
pub const DEFAULT_NODE_CAP: f64 = 1e8;

#[derive(Debug, Error, PartialEq)]
pub enum GwError {
    #[error("requested round {t} exceeds tree depth {depth}")]
    DepthTooShallow { t: usize, depth: usize },
    #[error("expected node count {expected:.3e} exceeds the cap {cap:.3e}")]
    TreeTooLarge { expected: f64, cap: f64 },
}

/// Depth-truncated rooted tree in breadth-first layout; node 0 is the root
/// and each node's children occupy a contiguous index range.
#[derive(Debug, Clone)]
pub struct GwTree {
    child_start: Vec<u32>,
    child_count: Vec<u32>,
    /// `level_offsets[d]..level_offsets[d+1]` are the nodes at depth `d`.
    level_offsets: Vec<usize>,
    depth: usize,
}

impl GwTree {
    pub fn node_count(&self) -> usize {
        self.child_start.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn children(&self, node: usize) -> std::ops::Range<usize> {
        let start = self.child_start[node] as usize;
        start..start + self.child_count[node] as usize
    }

    pub fn child_count(&self, node: usize) -> usize {
        self.child_count[node] as usize
    }

    pub fn root_child_count(&self) -> usize {
        self.child_count(0)
    }

    pub fn nodes_at_depth(&self, d: usize) -> std::ops::Range<usize> {
        self.level_offsets[d]..self.level_offsets[d + 1]
    }
}

/// `1 + lambda * sum_{j<depth} nu^j` with `nu` the mean size-biased offspring
/// count: the expected size of the truncated tree.
pub fn expected_node_count(dist: &DegreeDistribution, depth: usize) -> f64 {
    let lambda = dist.mean_degree();
    let nu = dist.size_biased().mean();
    let mut generations = 0.0;
    let mut level = 1.0;
    for _ in 0..depth {
        generations += level;
        level *= nu;
    }
    1.0 + lambda * generations
}

pub fn sample_tree(
    dist: &DegreeDistribution,
    depth: usize,
    seed: u64,
) -> Result<GwTree, GwError> {
    sample_tree_capped(dist, depth, seed, DEFAULT_NODE_CAP)
}

pub fn sample_tree_capped(
    dist: &DegreeDistribution,
    depth: usize,
    seed: u64,
    cap: f64,
) -> Result<GwTree, GwError> {
    let expected = expected_node_count(dist, depth);
    if expected > cap {
        return Err(GwError::TreeTooLarge { expected, cap });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root_cdf = cumulative(dist.pmf());
    let offspring_cdf = dist.size_biased().cumulative();

    let mut child_start = vec![0u32; 1];
    let mut child_count = vec![0u32; 1];
    let mut level_offsets = vec![0usize, 1];

    for d in 0..=depth {
        let level = level_offsets[d]..level_offsets[d + 1];
        let mut next_free = level_offsets[d + 1];
        for node in level {
            let count = if d == depth {
                0
            } else if d == 0 {
                draw(&root_cdf, &mut rng)
            } else {
                draw(&offspring_cdf, &mut rng)
            };
            child_start[node] = next_free as u32;
            child_count[node] = count as u32;
            next_free += count;
        }
        if d < depth {
            level_offsets.push(next_free);
            child_start.resize(next_free, 0);
            child_count.resize(next_free, 0);
        }
    }
    Ok(GwTree {
        child_start,
        child_count,
        level_offsets,
        depth,
    })
}

/// Upward messages of the root's children for every round `0..=t_max`,
/// computed bottom-up. Round `s` of a depth-`d` node only needs rounds
/// `< s` of depth `d+1`, so work concentrates near the horizon.
pub fn wp_on_tree(tree: &GwTree, t_max: usize) -> Result<Vec<Vec<Msg>>, GwError> {
    if t_max > tree.depth {
        return Err(GwError::DepthTooShallow {
            t: t_max,
            depth: tree.depth,
        });
    }
    if tree.depth == 0 || tree.root_child_count() == 0 {
        return Ok(vec![Vec::new(); t_max + 1]);
    }
    // rounds_needed(d) = t_max - d + 1: messages 0..=rounds_needed per node.
    let width = |d: usize| t_max.saturating_sub(d - 1) + 1;
    let mut below: Vec<Msg> = Vec::new();
    for d in (1..=tree.depth).rev() {
        let level = tree.nodes_at_depth(d);
        let w = width(d);
        let w_below = width(d + 1);
        let below_offset = tree.level_offsets.get(d + 1).copied().unwrap_or(0);
        let mut current = vec![Msg::U; level.len() * w];
        for node in level.clone() {
            let row = (node - level.start) * w;
            for s in 1..w {
                let (mut any_l, mut all_m) = (false, true);
                for child in tree.children(node) {
                    let value = below[(child - below_offset) * w_below + (s - 1)];
                    any_l |= value == Msg::L;
                    all_m &= value == Msg::M;
                }
                current[row + s] = if any_l {
                    Msg::M
                } else if all_m {
                    Msg::L
                } else {
                    Msg::U
                };
            }
        }
        below = current;
    }
    let w = width(1);
    let children = tree.root_child_count();
    Ok((0..=t_max)
        .map(|t| (0..children).map(|c| below[c * w + t]).collect())
        .collect())
}

/// Monte Carlo estimate of the probability that the root is labeled U after
/// `t` rounds, over `trials` independent depth-`(t+1)` trees. Returns the
/// frequency and its binomial standard error.
pub fn root_survival_mc(
    dist: &DegreeDistribution,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64), GwError> {
    let mut survivors = 0usize;
    for trial in 0..trials {
        let tree = sample_tree(dist, t + 1, mix_seed(seed, trial as u64))?;
        let rounds = wp_on_tree(&tree, t)?;
        if root_label_is_u(&rounds[t]) {
            survivors += 1;
        }
    }
    let estimate = survivors as f64 / trials as f64;
    let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok((estimate, stderr))
}

/// Root labeling from its children's messages: U iff no L and at least two U.
pub fn root_label_is_u(child_messages: &[Msg]) -> bool {
    let u_count = child_messages.iter().filter(|&&m| m == Msg::U).count();
    !child_messages.contains(&Msg::L) && u_count >= 2
}

/// Exact message law `Delta_t` for comparison with the empirical run.
pub fn analytic_delta(
    dist: &DegreeDistribution,
    t: usize,
) -> Result<MessageDistribution, crate::fixed_point::FixedPointError> {
    crate::fixed_point::delta_at(dist, t)
}
