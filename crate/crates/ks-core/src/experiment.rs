//! Monte Carlo orchestration: empirical core fractions against the analytic
//! prediction, parametric sweeps, and WP convergence probes. All output is
//! CSV with a header row; floats carry 9 significant digits; identical
//! configs produce byte-identical files.

use crate::degree::DegreeDistribution;
use crate::dist_spec::parse_dist_spec;
use crate::fixed_point::{self, FixedPointError, FixedPointReport};
use crate::graph::{GraphError, MultiGraph};
use crate::peel;
use crate::seeds::mix_seed;
use crate::wp;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("distribution violates the giant-core conditions (p1 > 0 and sum k(k-2) p_k > 0); pass force to override")]
    AssumptionViolation,
    #[error("config invalid: {0}")]
    BadConfig(&'static str),
    #[error("peel core and WP core disagree on graph for n={n}, trial {trial} (internal error)")]
    CoreMismatch { n: usize, trial: usize },
    #[error(transparent)]
    Degree(#[from] crate::degree::DegreeError),
    #[error(transparent)]
    FixedPoint(#[from] FixedPointError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Wp(#[from] wp::WpError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One empirical-vs-analytic run over several graph sizes.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dist_spec: String,
    pub n_values: Vec<usize>,
    pub trials_per_n: usize,
    pub master_seed: u64,
    pub simple_mode: bool,
    pub force: bool,
    pub output_path: Option<String>,
}

/// Parametric sweep over the leaf351 family.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub q_values: Vec<f64>,
    pub p_start: f64,
    pub p_stop: f64,
    pub p_step: f64,
    pub grid_size: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            q_values: vec![0.0, 0.001, 0.005],
            p_start: 0.0,
            p_stop: 1.0,
            p_step: 0.01,
            grid_size: fixed_point::DEFAULT_GRID,
        }
    }
}

/// 9 significant digits, locale-free.
pub fn fmt9(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.8e}")
    }
}

/// Builds one trial graph: degree sample, pairing, optional erasure.
fn build_graph(
    dist: &DegreeDistribution,
    n: usize,
    trial_seed: u64,
    simple: bool,
) -> Result<MultiGraph, ExperimentError> {
    let degrees = dist.sample_degree_sequence(n, mix_seed(trial_seed, 0))?;
    let g = MultiGraph::pair_half_edges(&degrees, mix_seed(trial_seed, 1))?;
    Ok(if simple { g.erase_to_simple() } else { g })
}

/// Core fraction computed by both routes; they must agree on the vertex set.
fn dual_core_fraction(
    g: &MultiGraph,
    order_seed: u64,
    n: usize,
    trial: usize,
) -> Result<f64, ExperimentError> {
    let result = peel::peel(g, order_seed);
    let run = wp::wp_run(g)?;
    let wp_set: std::collections::BTreeSet<usize> = wp::label_nodes(g, &run.state)
        .iter()
        .enumerate()
        .filter_map(|(v, &label)| (label == wp::Label::U).then_some(v))
        .collect();
    if wp_set != result.core_vertices {
        return Err(ExperimentError::CoreMismatch { n, trial });
    }
    Ok(result.core_vertices.len() as f64 / g.n() as f64)
}

/// Per-trial rows `n,trial,seed,core_fraction,analytic_prediction,abs_gap`,
/// then per-n summary rows with `trial` set to `mean` / `stdev`.
pub fn run_experiment(
    config: &ExperimentConfig,
    out: &mut impl Write,
) -> Result<(), ExperimentError> {
    if config.n_values.is_empty() || config.n_values.contains(&0) {
        return Err(ExperimentError::BadConfig("n_values must be non-empty and positive"));
    }
    if config.trials_per_n == 0 {
        return Err(ExperimentError::BadConfig("trials_per_n must be at least 1"));
    }
    let dist = parse_dist_spec(&config.dist_spec)?;
    let assumptions = dist.check_assumptions();
    if !(assumptions.p1_positive && assumptions.giant_condition) && !config.force {
        return Err(ExperimentError::AssumptionViolation);
    }
    let report = fixed_point::find_roots(&dist, fixed_point::DEFAULT_GRID)?;
    let analytic = report.core_fraction;

    writeln!(out, "n,trial,seed,core_fraction,analytic_prediction,abs_gap")?;
    for (n_index, &n) in config.n_values.iter().enumerate() {
        let mut fractions = Vec::with_capacity(config.trials_per_n);
        for trial in 0..config.trials_per_n {
            let trial_seed = mix_seed(
                mix_seed(config.master_seed, n_index as u64),
                trial as u64,
            );
            let g = build_graph(&dist, n, trial_seed, config.simple_mode)?;
            let fraction = dual_core_fraction(&g, mix_seed(trial_seed, 2), n, trial)?;
            fractions.push(fraction);
            writeln!(
                out,
                "{n},{trial},{trial_seed},{},{},{}",
                fmt9(fraction),
                fmt9(analytic),
                fmt9((fraction - analytic).abs())
            )?;
        }
        let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
        let stdev = if fractions.len() < 2 {
            0.0
        } else {
            let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>()
                / (fractions.len() - 1) as f64;
            var.sqrt()
        };
        writeln!(
            out,
            "{n},mean,,{},{},{}",
            fmt9(mean),
            fmt9(analytic),
            fmt9((mean - analytic).abs())
        )?;
        writeln!(out, "{n},stdev,,{},,", fmt9(stdev))?;
    }
    Ok(())
}

/// Rows `q,p,alpha_low,alpha_high,stability_product,core_fraction`, ordered
/// by (q, p).
pub fn run_sweep(config: &SweepConfig, out: &mut impl Write) -> Result<(), ExperimentError> {
    if config.p_step <= 0.0 {
        return Err(ExperimentError::BadConfig("p_step must be positive"));
    }
    if !(0.0..=1.0).contains(&config.p_start)
        || !(0.0..=1.0).contains(&config.p_stop)
        || config.p_stop < config.p_start
    {
        return Err(ExperimentError::BadConfig("p grid must lie within [0, 1]"));
    }
    writeln!(out, "q,p,alpha_low,alpha_high,stability_product,core_fraction")?;
    let steps = ((config.p_stop - config.p_start) / config.p_step).round() as usize;
    for &q in &config.q_values {
        for i in 0..=steps {
            let p = (config.p_start + i as f64 * config.p_step).min(config.p_stop);
            let dist = DegreeDistribution::leaf351(q, p)?;
            let report = fixed_point::find_roots(&dist, config.grid_size)?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt9(q),
                fmt9(p),
                fmt9(report.alpha_star_low),
                fmt9(report.alpha_star_high),
                fmt9(report.stability_product),
                fmt9(report.core_fraction)
            )?;
        }
    }
    Ok(())
}

/// Rows `t,changed_fraction`: directed messages differing between round t
/// and the WP fixed point on one sampled graph.
pub fn convergence_probe(
    dist: &DegreeDistribution,
    n: usize,
    seed: u64,
    t_list: &[usize],
    out: &mut impl Write,
) -> Result<(), ExperimentError> {
    if t_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExperimentError::BadConfig("t_list must be strictly ascending"));
    }
    let degrees = dist.sample_degree_sequence(n, mix_seed(seed, 0))?;
    let g = MultiGraph::pair_half_edges(&degrees, mix_seed(seed, 1))?;
    let fixed = wp::wp_run(&g)?;
    let total = fixed.state.values().len().max(1) as f64;

    writeln!(out, "t,changed_fraction")?;
    let mut state = wp::wp_init(&g);
    let mut next_t = t_list.iter().peekable();
    let mut t = 0usize;
    loop {
        while next_t.peek() == Some(&&t) {
            let changed = state
                .values()
                .iter()
                .zip(fixed.state.values())
                .filter(|(a, b)| a != b)
                .count();
            writeln!(out, "{t},{}", fmt9(changed as f64 / total))?;
            next_t.next();
        }
        if next_t.peek().is_none() {
            break;
        }
        state = wp::wp_round(&g, &state);
        t += 1;
    }
    Ok(())
}

/// Report used by the `solve` CLI row; `find_roots` wrapped so the degenerate
/// law still renders as a row.
pub fn solve_row(dist: &DegreeDistribution, grid: usize) -> Result<String, ExperimentError> {
    match fixed_point::find_roots(dist, grid) {
        Ok(report) => Ok(format_solve_row(&report)),
        Err(FixedPointError::DegenerateZeta) => {
            Ok("nan,nan,nan,false,nan,true".to_string())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn format_solve_row(report: &FixedPointReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        fmt9(report.alpha_star_low),
        fmt9(report.alpha_star_high),
        fmt9(report.stability_product),
        report.stable,
        fmt9(report.core_fraction),
        report.degenerate
    )
}
