//! Karp-Sipser leaf removal and the full two-phase matching heuristic.
//!
//! Peeling runs in synchronized rounds: all degree-1 vertices present at the
//! start of a round are processed in a seeded random order; each still-alive
//! leaf is matched to its unique alive neighbor and both are removed. The
//! final core is independent of the processing order (Bauer-Golinelli), so
//! round grouping only pins down what "after t rounds" means.

use crate::graph::MultiGraph;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Outcome of the leaf-removal phase.
#[derive(Debug, Clone)]
pub struct PeelResult {
    /// Vertices never removed, min degree 2 in the induced subgraph.
    pub core_vertices: BTreeSet<usize>,
    /// Forced pairs, in removal order, as (leaf, partner).
    pub matching: Vec<(usize, usize)>,
    /// Number of sweeps that matched at least one pair.
    pub rounds: usize,
    /// Per-round (leaf, partner) removals; `removal_trace.len() == rounds`.
    pub removal_trace: Vec<Vec<(usize, usize)>>,
}

/// Outcome of the full two-phase heuristic.
#[derive(Debug, Clone)]
pub struct MatchingResult {
    pub matching: Vec<(usize, usize)>,
    pub phase1_size: usize,
    pub phase2_size: usize,
}

/// Mutable working state shared by peeling and the full matching.
struct Peeler<'g> {
    g: &'g MultiGraph,
    alive: Vec<bool>,
    live_deg: Vec<usize>,
    edge_dead: Vec<bool>,
    /// Vertices to examine next round (reached degree 1, or dropped to 0
    /// while queued).
    next: Vec<usize>,
}

impl<'g> Peeler<'g> {
    fn new(g: &'g MultiGraph) -> Self {
        let mut alive = vec![true; g.n()];
        let live_deg = g.degrees().to_vec();
        // Initial isolated vertices are discarded up front.
        for v in 0..g.n() {
            if live_deg[v] == 0 {
                alive[v] = false;
            }
        }
        Self {
            g,
            alive,
            live_deg,
            edge_dead: vec![false; g.edge_count()],
            next: Vec::new(),
        }
    }

    fn remove_vertex(&mut self, v: usize) {
        self.alive[v] = false;
        for &(e, _) in self.g.incidence(v) {
            if self.edge_dead[e] {
                continue;
            }
            self.edge_dead[e] = true;
            let other = self.g.other_endpoint(e, v);
            if other != v && self.alive[other] {
                self.live_deg[other] -= 1;
                if self.live_deg[other] == 1 {
                    self.next.push(other);
                }
            }
        }
    }

    /// Runs leaf removal to exhaustion, appending per-round traces.
    fn run_phase1(
        &mut self,
        rng: &mut ChaCha8Rng,
        trace: &mut Vec<Vec<(usize, usize)>>,
        matching: &mut Vec<(usize, usize)>,
    ) {
        let mut current: Vec<usize> = (0..self.g.n())
            .filter(|&v| self.alive[v] && self.live_deg[v] == 1)
            .collect();
        while !current.is_empty() {
            current.shuffle(rng);
            let mut round_pairs = Vec::new();
            for v in current.drain(..) {
                if !self.alive[v] {
                    continue;
                }
                match self.live_deg[v] {
                    0 => {
                        // Leaf whose partner died; discard as isolated.
                        self.alive[v] = false;
                    }
                    1 => {
                        let partner = self
                            .g
                            .incidence(v)
                            .iter()
                            .find_map(|&(e, _)| {
                                if self.edge_dead[e] {
                                    return None;
                                }
                                let other = self.g.other_endpoint(e, v);
                                (other != v && self.alive[other]).then_some(other)
                            })
                            .expect("degree-1 vertex must have one live neighbor");
                        self.remove_vertex(v);
                        self.remove_vertex(partner);
                        matching.push((v, partner));
                        round_pairs.push((v, partner));
                    }
                    _ => unreachable!("live degree can only drop"),
                }
            }
            if !round_pairs.is_empty() {
                trace.push(round_pairs);
            }
            current = std::mem::take(&mut self.next);
        }
    }

    fn core(&self) -> BTreeSet<usize> {
        (0..self.g.n()).filter(|&v| self.alive[v]).collect()
    }
}

pub fn peel(g: &MultiGraph, order_seed: u64) -> PeelResult {
    let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
    let mut peeler = Peeler::new(g);
    let mut trace = Vec::new();
    let mut matching = Vec::new();
    peeler.run_phase1(&mut rng, &mut trace, &mut matching);
    PeelResult {
        core_vertices: peeler.core(),
        rounds: trace.len(),
        removal_trace: trace,
        matching,
    }
}

pub fn core_fraction(g: &MultiGraph, order_seed: u64) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    peel(g, order_seed).core_vertices.len() as f64 / g.n() as f64
}

/// Vertices still in play after `t` peel rounds: not yet removed and with
/// residual degree at least 2 (current leaves and isolated vertices are
/// already condemned). For `t >= rounds` this is the core.
pub fn survivors_after_peel(g: &MultiGraph, result: &PeelResult, t: usize) -> BTreeSet<usize> {
    let mut alive = vec![true; g.n()];
    for round in result.removal_trace.iter().take(t) {
        for &(leaf, partner) in round {
            alive[leaf] = false;
            alive[partner] = false;
        }
    }
    let mut deg = vec![0usize; g.n()];
    for &(u, v) in g.edges() {
        if alive[u] && alive[v] {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    (0..g.n()).filter(|&v| alive[v] && deg[v] >= 2).collect()
}

/// Full Karp-Sipser: leaf removal to exhaustion, then one uniform pick among
/// the surviving non-loop edges, repeated until none remain. Self-loops are
/// unmatchable and never picked.
pub fn full_matching(g: &MultiGraph, order_seed: u64, phase2_seed: u64) -> MatchingResult {
    let mut order_rng = ChaCha8Rng::seed_from_u64(order_seed);
    let mut pick_rng = ChaCha8Rng::seed_from_u64(phase2_seed);
    let mut peeler = Peeler::new(g);
    let mut trace = Vec::new();
    let mut matching = Vec::new();

    peeler.run_phase1(&mut order_rng, &mut trace, &mut matching);
    let mut phase2_size = 0;

    // Candidate pool with lazy compaction: dead entries are swap-removed as
    // they are drawn, keeping picks uniform over the alive remainder.
    let mut pool: Vec<usize> = (0..g.edge_count())
        .filter(|&e| {
            let (u, v) = g.edges()[e];
            u != v && !peeler.edge_dead[e]
        })
        .collect();
    loop {
        let mut picked = None;
        while !pool.is_empty() {
            let i = pick_rng.gen_range(0..pool.len());
            let e = pool[i];
            if peeler.edge_dead[e] {
                pool.swap_remove(i);
                continue;
            }
            picked = Some(e);
            break;
        }
        let Some(e) = picked else { break };
        let (x, y) = g.edges()[e];
        peeler.remove_vertex(x);
        peeler.remove_vertex(y);
        matching.push((x, y));
        phase2_size += 1;
        peeler.run_phase1(&mut order_rng, &mut trace, &mut matching);
    }
    MatchingResult {
        phase1_size: matching.len() - phase2_size,
        phase2_size,
        matching,
    }
}
