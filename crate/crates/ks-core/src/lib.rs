// Frozen oracle constants in tests keep all their computed digits.
#![allow(clippy::excessive_precision)]

//! Karp-Sipser core of configuration-model random graphs.
//!
//! The library predicts the asymptotic core size from a bounded-support
//! degree distribution by solving `zeta(a) = a + phi_hat(1 - phi_hat(a)) - 1`
//! on [0, 1], and measures it empirically by two independent routes that
//! must agree vertex-for-vertex on every graph: leaf-removal peeling and
//! Warning Propagation with node labeling. Galton-Watson sampling validates
//! the density-evolution recursion `Delta_{t+1} = Y(Delta_t)` against the
//! local limit.
//!
//! Modules map one-to-one onto the pipeline:
//!
//! * [`degree`] - degree laws, generating functions, size biasing, sampling
//! * [`dist_spec`] - the CLI's `pmf:...` / `leaf351:...` / `poisson:...` mini-language
//! * [`fixed_point`] - root scan, stability, duality, density evolution
//! * [`graph`] - configuration-model multigraphs by half-edge pairing
//! * [`peel`] - leaf removal and the full two-phase matching
//! * [`wp`] - synchronous Warning Propagation and node labeling
//! * [`gw`] - Galton-Watson trees and Monte Carlo survival estimates
//! * [`experiment`] - CSV-producing harnesses gluing the above together

pub mod degree;
pub mod dist_spec;
pub mod experiment;
pub mod fixed_point;
pub mod graph;
pub mod gw;
pub mod peel;
pub mod seeds;
pub mod wp;

pub use degree::{AssumptionReport, DegreeDistribution, DegreeError, SizeBiasedDistribution};
pub use dist_spec::parse_dist_spec;
pub use fixed_point::{
    check_duality, contraction_probe, density_evolution, find_roots, metric_d,
    survival_probability, upsilon, zeta, FixedPointError, FixedPointReport,
    MessageDistribution,
};
pub use graph::{GraphError, GraphStats, MultiGraph};
pub use gw::{root_survival_mc, sample_tree, wp_on_tree, GwError, GwTree};
pub use peel::{core_fraction, full_matching, peel, MatchingResult, PeelResult};
pub use seeds::mix_seed;
pub use wp::{
    label_nodes, message_histogram, survivors_after, wp_core_fraction, wp_init, wp_round,
    wp_run, Label, MessageState, Msg, WpError,
};
