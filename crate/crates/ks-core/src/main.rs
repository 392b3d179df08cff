//! `ks-core` CLI: analytic solve, peeling, Warning Propagation, Galton-Watson
//! Monte Carlo, experiments, sweeps, and convergence probes. CSV on stdout or
//! `--out`. Exit codes: 0 success, 2 validation errors, 1 internal errors.

use clap::{Args, Parser, Subcommand};
use ks_core::degree::DegreeError;
use ks_core::experiment::{
    self, fmt9, ExperimentConfig, ExperimentError, SweepConfig,
};
use ks_core::fixed_point::{self, FixedPointError};
use ks_core::graph::MultiGraph;
use ks_core::seeds::mix_seed;
use ks_core::{gw, parse_dist_spec, peel, wp};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ks-core", version, about = "Karp-Sipser core of configuration-model graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutArg {
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve zeta(a) = 0 and print one CSV row:
    /// alpha_low,alpha_high,stability_product,stable,core_fraction,degenerate
    Solve {
        #[arg(long)]
        dist: String,
        /// Grid points for the sign scan.
        #[arg(long, default_value_t = fixed_point::DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sample one graph and peel it; prints
    /// n,core_size,core_fraction,rounds,phase1_matching_size
    Peel {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Erase self-loops and parallel edges before peeling.
        #[arg(long)]
        simple: bool,
        /// Also dump the sampled graph as an edge list to this path.
        #[arg(long)]
        dump_graph: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run Warning Propagation on one sampled graph; with --trace prints one
    /// row per round: t,frac_L,frac_M,frac_U,changed_count,core_fraction
    Wp {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        simple: bool,
        /// Print every round, not just the fixed point.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Galton-Watson Monte Carlo root survival; prints
    /// t,mc_estimate,stderr,analytic_value,z_score
    Gw {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Empirical core fractions vs the analytic prediction over graph sizes.
    Experiment {
        #[arg(long)]
        dist: String,
        /// Comma-separated list of graph sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        simple: bool,
        /// Run even if the giant-core conditions fail.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// leaf351 parametric sweep; rows q,p,alpha_low,alpha_high,stability_product,core_fraction
    Sweep {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.001, 0.005])]
        q: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        p_start: f64,
        #[arg(long, default_value_t = 1.0)]
        p_stop: f64,
        #[arg(long, default_value_t = 0.01)]
        p_step: f64,
        #[arg(long, default_value_t = fixed_point::DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fraction of messages still changing after round t on one graph.
    Probe {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ascending list of rounds to report.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0, 1, 2, 5, 10, 20])]
        t_list: Vec<usize>,
        #[command(flatten)]
        out: OutArg,
    },
}

fn open_out(path: &Option<String>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn build_graph(
    spec: &str,
    n: usize,
    seed: u64,
    simple: bool,
) -> Result<MultiGraph, ExperimentError> {
    let dist = parse_dist_spec(spec)?;
    let degrees = dist.sample_degree_sequence(n, mix_seed(seed, 0))?;
    let g = MultiGraph::pair_half_edges(&degrees, mix_seed(seed, 1))?;
    Ok(if simple { g.erase_to_simple() } else { g })
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Solve { dist, grid, out } => {
            let d = parse_dist_spec(&dist)?;
            let row = experiment::solve_row(&d, grid)?;
            let mut w = open_out(&out.out)?;
            writeln!(w, "alpha_low,alpha_high,stability_product,stable,core_fraction,degenerate")?;
            writeln!(w, "{row}")?;
            w.flush()?;
        }
        Command::Peel {
            dist,
            n,
            seed,
            simple,
            dump_graph,
            out,
        } => {
            let g = build_graph(&dist, n, seed, simple)?;
            if let Some(path) = dump_graph {
                let mut f = BufWriter::new(File::create(path)?);
                g.write_edge_list(&mut f)?;
                f.flush()?;
            }
            let result = peel::peel(&g, mix_seed(seed, 2));
            let mut w = open_out(&out.out)?;
            writeln!(w, "n,core_size,core_fraction,rounds,phase1_matching_size")?;
            writeln!(
                w,
                "{},{},{},{},{}",
                g.n(),
                result.core_vertices.len(),
                fmt9(result.core_vertices.len() as f64 / g.n() as f64),
                result.rounds,
                result.matching.len()
            )?;
            w.flush()?;
        }
        Command::Wp {
            dist,
            n,
            seed,
            simple,
            trace,
            out,
        } => {
            let g = build_graph(&dist, n, seed, simple)?;
            let mut w = open_out(&out.out)?;
            writeln!(w, "t,frac_L,frac_M,frac_U,changed_count,core_fraction")?;
            let mut state = wp::wp_init(&g);
            loop {
                let next = wp::wp_round(&g, &state);
                let changed = next
                    .values()
                    .iter()
                    .zip(state.values())
                    .filter(|(a, b)| a != b)
                    .count();
                if trace || changed == 0 {
                    let (l, m, u) = wp::message_histogram(&state)
                        .unwrap_or((0.0, 0.0, 0.0));
                    if changed == 0 {
                        let survivors = wp::label_nodes(&g, &state)
                            .iter()
                            .filter(|&&lab| lab == wp::Label::U)
                            .count();
                        writeln!(
                            w,
                            "{},{},{},{},{changed},{}",
                            state.round(),
                            fmt9(l),
                            fmt9(m),
                            fmt9(u),
                            fmt9(survivors as f64 / g.n() as f64)
                        )?;
                        break;
                    }
                    writeln!(
                        w,
                        "{},{},{},{},{changed},",
                        state.round(),
                        fmt9(l),
                        fmt9(m),
                        fmt9(u)
                    )?;
                }
                state = next;
            }
            w.flush()?;
        }
        Command::Gw {
            dist,
            t,
            trials,
            seed,
            out,
        } => {
            let d = parse_dist_spec(&dist)?;
            let (estimate, stderr) = root_survival(&d, t, trials, seed)?;
            let delta = fixed_point::delta_at(&d, t)?;
            let analytic = fixed_point::survival_probability(&d, &delta)?;
            let z = if stderr > 0.0 {
                (estimate - analytic) / stderr
            } else if (estimate - analytic).abs() < 1e-15 {
                0.0
            } else {
                f64::INFINITY
            };
            let mut w = open_out(&out.out)?;
            writeln!(w, "t,mc_estimate,stderr,analytic_value,z_score")?;
            writeln!(
                w,
                "{t},{},{},{},{}",
                fmt9(estimate),
                fmt9(stderr),
                fmt9(analytic),
                fmt9(z)
            )?;
            w.flush()?;
        }
        Command::Experiment {
            dist,
            n,
            trials,
            seed,
            simple,
            force,
            out,
        } => {
            let config = ExperimentConfig {
                dist_spec: dist,
                n_values: n,
                trials_per_n: trials,
                master_seed: seed,
                simple_mode: simple,
                force,
                output_path: out.out.clone(),
            };
            let mut w = open_out(&config.output_path)?;
            experiment::run_experiment(&config, &mut w)?;
            w.flush()?;
        }
        Command::Sweep {
            q,
            p_start,
            p_stop,
            p_step,
            grid,
            out,
        } => {
            let config = SweepConfig {
                q_values: q,
                p_start,
                p_stop,
                p_step,
                grid_size: grid,
            };
            let mut w = open_out(&out.out)?;
            experiment::run_sweep(&config, &mut w)?;
            w.flush()?;
        }
        Command::Probe {
            dist,
            n,
            seed,
            t_list,
            out,
        } => {
            let d = parse_dist_spec(&dist)?;
            let mut w = open_out(&out.out)?;
            experiment::convergence_probe(&d, n, seed, &t_list, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn root_survival(
    d: &ks_core::DegreeDistribution,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64), ExperimentError> {
    gw::root_survival_mc(d, t, trials, seed).map_err(|e| match e {
        gw::GwError::TreeTooLarge { .. } | gw::GwError::DepthTooShallow { .. } => {
            ExperimentError::BadConfig("tree horizon too large for the configured node cap")
        }
    })
}

/// Validation failures (bad input, violated preconditions) exit 2; broken
/// internal invariants exit 1.
fn exit_code_for(err: &ExperimentError) -> u8 {
    match err {
        ExperimentError::AssumptionViolation | ExperimentError::BadConfig(_) => 2,
        ExperimentError::Degree(_) | ExperimentError::Graph(_) => 2,
        ExperimentError::FixedPoint(e) => match e {
            FixedPointError::InvalidGrid(_)
            | FixedPointError::DegenerateZeta
            | FixedPointError::SimplexViolation { .. }
            | FixedPointError::DegenerateWeights
            | FixedPointError::ZeroPerturbation => 2,
            FixedPointError::Degree(DegreeError::Domain { .. }) => 2,
            FixedPointError::Degree(_) => 2,
            FixedPointError::NoRootFound | FixedPointError::CoreFractionOutOfRange(_) => 1,
        },
        ExperimentError::Wp(_) | ExperimentError::CoreMismatch { .. } => 1,
        ExperimentError::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("ks-core: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
