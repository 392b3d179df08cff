//! Enhanced Warning Propagation on multigraphs.
//!
//! Every undirected edge carries two directed message instances over the
//! alphabet {L, M, U}; a self-loop carries two instances on its own vertex,
//! both feeding that vertex's updates. Updates are synchronous (double
//! buffered). From the all-U start every message is non-increasing in the
//! order L < M < U and the state fixes within |E| rounds.

use crate::graph::MultiGraph;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WpError {
    #[error("message histogram undefined on an empty edge set")]
    EmptyGraph,
    #[error("state holds {got} messages, graph needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("WP did not fix within |E|={edge_count} rounds (internal error)")]
    ConvergenceBound { edge_count: usize },
    #[error("message {instance} increased between rounds (internal error)")]
    MonotonicityViolated { instance: usize },
}

/// Message alphabet; the derived order L < M < U is the hierarchy under
/// which messages only ever decrease.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Msg {
    L,
    M,
    U,
}

/// Per-vertex core verdict of the labeling rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    M,
    U,
}

/// One synchronous-round snapshot: directed instance `2e` runs along edge
/// `e = (u, v)` from `u` to `v`, instance `2e + 1` runs back; `i ^ 1` is the
/// paired reverse of instance `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    values: Vec<Msg>,
    round: usize,
}

impl MessageState {
    pub fn from_values(
        g: &MultiGraph,
        values: Vec<Msg>,
        round: usize,
    ) -> Result<Self, WpError> {
        if values.len() != 2 * g.edge_count() {
            return Err(WpError::LengthMismatch {
                expected: 2 * g.edge_count(),
                got: values.len(),
            });
        }
        Ok(Self { values, round })
    }

    pub fn values(&self) -> &[Msg] {
        &self.values
    }

    pub fn round(&self) -> usize {
        self.round
    }
}

fn instance_head(g: &MultiGraph, i: usize) -> usize {
    let (u, v) = g.edges()[i / 2];
    if i & 1 == 0 {
        v
    } else {
        u
    }
}

fn instance_tail(g: &MultiGraph, i: usize) -> usize {
    let (u, v) = g.edges()[i / 2];
    if i & 1 == 0 {
        u
    } else {
        v
    }
}

/// Counts of incoming (head == vertex) messages per vertex, by value.
fn incoming_counts(g: &MultiGraph, state: &MessageState) -> Vec<[usize; 3]> {
    let mut counts = vec![[0usize; 3]; g.n()];
    for (i, &msg) in state.values.iter().enumerate() {
        counts[instance_head(g, i)][msg as usize] += 1;
    }
    counts
}

/// All messages U at round 0.
pub fn wp_init(g: &MultiGraph) -> MessageState {
    MessageState {
        values: vec![Msg::U; 2 * g.edge_count()],
        round: 0,
    }
}

/// One synchronous update. The answer `u -> v` aggregates round-`t` messages
/// incoming at `u`, excluding only the paired reverse instance `v -> u`:
/// L if all inputs are M (vacuously for leaves), M if any input is L, else U.
pub fn wp_round(g: &MultiGraph, state: &MessageState) -> MessageState {
    let counts = incoming_counts(g, state);
    let values = (0..state.values.len())
        .map(|i| {
            let u = instance_tail(g, i);
            let reverse = state.values[i ^ 1];
            let n_l = counts[u][Msg::L as usize] - (reverse == Msg::L) as usize;
            let n_m = counts[u][Msg::M as usize] - (reverse == Msg::M) as usize;
            let inputs = g.degree(u) - 1;
            if n_l >= 1 {
                Msg::M
            } else if n_m == inputs {
                Msg::L
            } else {
                Msg::U
            }
        })
        .collect();
    MessageState {
        values,
        round: state.round + 1,
    }
}

/// Full run to the fixed point.
#[derive(Debug, Clone)]
pub struct WpRun {
    pub state: MessageState,
    /// Smallest t with state(t+1) == state(t); at most |E|.
    pub rounds_to_fix: usize,
    /// Times each directed instance changed value (at most 2 each).
    pub change_counts: Vec<u32>,
    /// Messages changed per applied round.
    pub per_round_changes: Vec<usize>,
}

pub fn wp_run(g: &MultiGraph) -> Result<WpRun, WpError> {
    let edge_count = g.edge_count();
    let mut state = wp_init(g);
    let mut change_counts = vec![0u32; 2 * edge_count];
    let mut per_round_changes = Vec::new();
    loop {
        let next = wp_round(g, &state);
        let mut changed = 0;
        for (i, (new, old)) in next.values.iter().zip(&state.values).enumerate() {
            if new != old {
                if new > old {
                    return Err(WpError::MonotonicityViolated { instance: i });
                }
                change_counts[i] += 1;
                changed += 1;
            }
        }
        if changed == 0 {
            return Ok(WpRun {
                rounds_to_fix: state.round,
                state,
                change_counts,
                per_round_changes,
            });
        }
        per_round_changes.push(changed);
        state = next;
        if state.round > edge_count {
            return Err(WpError::ConvergenceBound { edge_count });
        }
    }
}

/// Vertex rule: U iff no incoming L and at least two incoming U; degree-0
/// vertices label M. A self-loop contributes both of its instances.
pub fn label_nodes(g: &MultiGraph, state: &MessageState) -> Vec<Label> {
    let counts = incoming_counts(g, state);
    counts
        .iter()
        .map(|c| {
            if c[Msg::L as usize] == 0 && c[Msg::U as usize] >= 2 {
                Label::U
            } else {
                Label::M
            }
        })
        .collect()
}

/// U-labeled vertices after `2t` WP rounds; equals the alive set after `t`
/// synchronized peel rounds (the final core once peeling has finished).
pub fn survivors_after(g: &MultiGraph, t: usize) -> BTreeSet<usize> {
    let mut state = wp_init(g);
    for _ in 0..2 * t {
        let next = wp_round(g, &state);
        let fixed = next.values == state.values;
        state = next;
        if fixed {
            break;
        }
    }
    label_nodes(g, &state)
        .iter()
        .enumerate()
        .filter_map(|(v, &label)| (label == Label::U).then_some(v))
        .collect()
}

/// Fraction of U labels at the WP fixed point; identical to the peel-based
/// core fraction on the same graph.
pub fn wp_core_fraction(g: &MultiGraph) -> Result<f64, WpError> {
    if g.n() == 0 {
        return Ok(0.0);
    }
    let run = wp_run(g)?;
    let survivors = label_nodes(g, &run.state)
        .iter()
        .filter(|&&label| label == Label::U)
        .count();
    Ok(survivors as f64 / g.n() as f64)
}

/// Empirical (L, M, U) fractions over directed instances.
pub fn message_histogram(state: &MessageState) -> Result<(f64, f64, f64), WpError> {
    if state.values.is_empty() {
        return Err(WpError::EmptyGraph);
    }
    let mut counts = [0usize; 3];
    for &msg in &state.values {
        counts[msg as usize] += 1;
    }
    let total = state.values.len() as f64;
    Ok((
        counts[0] as f64 / total,
        counts[1] as f64 / total,
        counts[2] as f64 / total,
    ))
}
