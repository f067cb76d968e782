use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempreach::analysis::analyze;
use tempreach::cactus::{build_switching_digraph, temporal_cactus_lower_bound};
use tempreach::cdg::{build_cdg, cdg_upper_bound, crp_check};
use tempreach::graphkit::{digraph_to_dot, Digraph, Linking};
use tempreach::io::{network_to_json, parse_network};
use tempreach::mdg::{build_mdg, mdg_upper_bound};
use tempreach::oracle::OracleParams;
use tempreach::switched::{crp_min_length_search, switched_dim_lower_bound};
use tempreach::{stcp_embedding, StructuredPair, SwitchingPath, TargetSpec, TemporalNetwork};

/// Bounds and Monte Carlo estimates of reachable-subspace dimensions for
/// temporal linear networks.
#[derive(Parser, Debug)]
#[command(name = "tempreach", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct OracleArgs {
    /// Random realizations per oracle estimate
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Relative singular-value threshold
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

impl OracleArgs {
    fn params(&self) -> OracleParams {
        OracleParams::new(self.trials, self.seed, self.tol)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bounds and oracle values for both subspaces, as JSON
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Matching restarts for the temporal cactus bound
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Include linkings and the cactus witness
        #[arg(long)]
        witnesses: bool,
    },
    /// Check a switching path, or search for the shortest passing one
    Crp {
        file: PathBuf,
        /// Comma-separated 1-based subsystem indices, e.g. 1,2,1
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "search",
            required_unless_present = "search"
        )]
        path: Option<Vec<usize>>,
        /// Longest path length to try
        #[arg(long)]
        search: Option<usize>,
    },
    /// Lower bound for the switched system over subsystem reorderings
    Switched {
        file: PathBuf,
        /// Number of orderings to evaluate
        #[arg(long, default_value_t = 24)]
        budget: usize,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Write a graph as Graphviz DOT
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        graph: GraphKind,
        #[arg(long)]
        out: PathBuf,
        /// Highlight the bound's witness edges
        #[arg(long)]
        witness: bool,
        /// Seed and restarts for the cactus witness of `gsw`
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Random target-controllability instance embedded as a temporal network
    GenStcp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Comma-separated 1-based target nodes
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<usize>,
        #[arg(long = "N")]
        n_subsystems: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.4)]
        density: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GraphKind {
    Cdg,
    Mdg,
    Gsw,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(e: impl ToString) -> Self {
        Self {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn load(path: &Path) -> Result<TemporalNetwork, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_network(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(text: &str) {
    // A closed pipe (e.g. `| head`) is not an error for a report writer.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json(v: &impl serde::Serialize) {
    emit(&serde_json::to_string_pretty(v).expect("reports serialize"));
}

fn one_based(path: &SwitchingPath) -> Value {
    json!(path.one_based())
}

fn linking_edges(linking: &Linking) -> BTreeSet<(usize, usize)> {
    linking
        .paths
        .iter()
        .flat_map(|p| p.windows(2).map(|w| (w[0], w[1])))
        .collect()
}

fn cactus_edges(
    g: &Digraph,
    net: &TemporalNetwork,
    restarts: usize,
    seed: u64,
) -> Result<BTreeSet<(usize, usize)>, Failure> {
    let witness = temporal_cactus_lower_bound(net, restarts, seed)
        .map_err(Failure::input)?
        .witness;
    let mut edges = BTreeSet::new();
    let mut add = |a, b| {
        if let (Some(u), Some(v)) = (g.id(a), g.id(b)) {
            edges.insert((u, v));
        }
    };
    for stem in &witness.stems {
        for w in stem.windows(2) {
            add(&w[0], &w[1]);
        }
    }
    for cycle in &witness.cycles {
        for (i, t) in cycle.iter().enumerate() {
            add(t, &cycle[(i + 1) % cycle.len()]);
        }
    }
    Ok(edges)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            file,
            oracle,
            restarts,
            witnesses,
        } => {
            let net = load(&file)?;
            let report =
                analyze(&net, &oracle.params(), restarts, witnesses).map_err(Failure::input)?;
            print_json(&report);
            let violations = report.sandwich_violations();
            if !violations.is_empty() {
                return Err(Failure {
                    code: 3,
                    message: format!("sandwich violated: {}", violations.join("; ")),
                });
            }
        }
        Command::Crp { file, path, search } => {
            let net = load(&file)?;
            if let Some(l_max) = search {
                let r = crp_min_length_search(&net, l_max).map_err(Failure::input)?;
                print_json(&json!({
                    "min_length_lower_bound": r.min_length_lower_bound,
                    "witness_path": r.witness_path.as_ref().map(one_based),
                    "per_length": r.per_length,
                }));
            } else {
                let path = SwitchingPath::from_one_based(&path.unwrap_or_default())
                    .map_err(Failure::input)?;
                let check = crp_check(&net, &path).map_err(Failure::input)?;
                print_json(&json!({
                    "path": one_based(&path),
                    "passes": check.passes,
                    "linking": check.linking,
                }));
            }
        }
        Command::Switched {
            file,
            budget,
            oracle,
        } => {
            let net = load(&file)?;
            let r =
                switched_dim_lower_bound(&net, budget, &oracle.params()).map_err(Failure::input)?;
            print_json(&json!({
                "switched_dim_lower_bound": r.switched_dim_lower_bound,
                "best_permutation": one_based(&r.best_permutation),
                "permutations_evaluated": r.permutations_evaluated,
                "exhaustive": r.exhaustive,
            }));
        }
        Command::Export {
            file,
            graph,
            out,
            witness,
            seed,
            restarts,
        } => {
            let net = load(&file)?;
            let (g, highlight) = match graph {
                GraphKind::Cdg => {
                    let hl = if witness {
                        linking_edges(&cdg_upper_bound(&net).witness)
                    } else {
                        BTreeSet::new()
                    };
                    (build_cdg(&net).graph, hl)
                }
                GraphKind::Mdg => {
                    let hl = if witness {
                        linking_edges(&mdg_upper_bound(&net).witness)
                    } else {
                        BTreeSet::new()
                    };
                    (build_mdg(&net).graph, hl)
                }
                GraphKind::Gsw => {
                    let g = build_switching_digraph(&net).raw;
                    let hl = if witness {
                        cactus_edges(&g, &net, restarts, seed)?
                    } else {
                        BTreeSet::new()
                    };
                    (g, hl)
                }
            };
            let name = format!("{graph:?}").to_lowercase();
            fs::write(&out, digraph_to_dot(&g, &name, &highlight)).map_err(|e| Failure {
                code: 4,
                message: format!("{}: {e}", out.display()),
            })?;
        }
        Command::GenStcp {
            n,
            m,
            target,
            n_subsystems,
            seed,
            density,
        } => {
            if n == 0 || !(0.0..=1.0).contains(&density) {
                return Err(Failure::input("need n ≥ 1 and density in [0, 1]"));
            }
            let nodes = target
                .iter()
                .map(|&t| {
                    t.checked_sub(1)
                        .ok_or_else(|| Failure::input("target nodes are 1-based"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let target = TargetSpec::new(n, nodes).map_err(Failure::input)?;
            let pair = StructuredPair::random(&mut ChaCha8Rng::seed_from_u64(seed), n, m, density);
            let net = stcp_embedding(&pair, &target, n_subsystems).map_err(Failure::input)?;
            emit(&network_to_json(&net));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
