use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ghz_graphs::ghz::{self, Feasibility, DEFAULT_EPSILON};
use ghz_graphs::io::{self, cut_json, table_json, verdict_json, ErrorCode, WeightRepr};
use ghz_graphs::matching::{colouring_weight_table, evaluate_colouring, filter};
use ghz_graphs::reduction::{reduce, ReduceOptions};
use ghz_graphs::search::SearchProblem;
use ghz_graphs::structure::{find_cut, mcg, vertex_connectivity};
use ghz_graphs::{Colour, Multigraph, VertexColouring};

#[derive(Parser)]
#[command(name = "ghz", version, about = "Exact analysis of edge-coloured weighted multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Graph document (JSON).
    file: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// GHZ / g-GHZ verdict. Float documents are checked within --epsilon.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Count feasible monochromatic colourings of weight 0 as violations.
        #[arg(long)]
        strict: bool,
        /// Exit 0 when the graph is g-GHZ rather than GHZ.
        #[arg(long = "g-ghz")]
        g_ghz: bool,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Dimension of a g-GHZ graph.
    Dimension(Input),
    /// Colouring weight table, or the weight of one colouring.
    Weights {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',')]
        colouring: Option<Vec<u32>>,
    },
    /// Subgraph filtered out by a vertex colouring.
    Filter {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', required = true)]
        colouring: Vec<u32>,
    },
    /// Maximum matching-covered subgraph.
    Mcg(Input),
    /// Merge parallel edges of the same colour class.
    Merge(Input),
    /// Drop edges of weight zero.
    DropZeros(Input),
    /// Vertex connectivity.
    Connectivity(Input),
    /// Lexicographically first vertex cut of the given size.
    Cut {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
    /// Reduce across a vertex cut of size 3.
    Reduce {
        #[command(flatten)]
        input: Input,
        /// Try every size-3 cut and keep the smallest result.
        #[arg(long)]
        all_cuts: bool,
    },
    /// Rescale a g-GHZ graph into a GHZ graph (float weights).
    Scale {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Non-monochromatic perfect matching (edge indices).
    Bogdanov(Input),
    /// Numerical search for a GHZ assignment of the given dimension.
    Search {
        #[arg(long)]
        skeleton: PathBuf,
        #[arg(long)]
        dim: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Verification tolerance; defaults to 10 * sqrt(tol).
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

struct Failure {
    code: &'static str,
    message: String,
    path: Option<String>,
}

impl Failure {
    fn new(code: &'static str, message: impl ToString) -> Failure {
        Failure { code, message: message.to_string(), path: None }
    }
}

impl From<io::ParseError> for Failure {
    fn from(e: io::ParseError) -> Failure {
        Failure { code: e.code.as_str(), message: e.message, path: Some(e.path) }
    }
}

/// Result of a command: JSON for stdout and whether the exit status is 0.
type Outcome = Result<(Value, bool), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new("IO_ERROR", format!("{}: {e}", path.display())))
}

fn load(input: &Input) -> Result<Multigraph, Failure> {
    Ok(io::parse(&read(&input.file)?)?)
}

fn document<W: WeightRepr>(g: &Multigraph<W>) -> Value {
    serde_json::to_value(io::to_document(g)).expect("documents serialize")
}

fn colouring(g: &Multigraph, colours: &[u32]) -> Result<VertexColouring, Failure> {
    let vc = VertexColouring::new(colours.iter().map(|&c| Colour(c)).collect());
    g.check_colouring(&vc).map_err(|e| Failure::new("INVALID_COLOURING", e))?;
    Ok(vc)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Verify { input, strict, g_ghz, epsilon } => {
            let text = read(&input.file)?;
            let mode = if strict { Feasibility::Strict } else { Feasibility::Lenient };
            let (value, holds) = match io::parse(&text) {
                Ok(g) => {
                    let v = ghz::verify_with(&g, mode);
                    (verdict_json(&v), if g_ghz { v.is_g_ghz } else { v.is_ghz })
                }
                Err(e) if e.code == ErrorCode::WrongArity => {
                    let g = io::parse_float(&text)?;
                    let v = ghz::verify_numeric(&g, epsilon, mode);
                    (verdict_json(&v), if g_ghz { v.is_g_ghz } else { v.is_ghz })
                }
                Err(e) => return Err(e.into()),
            };
            Ok((value, holds))
        }
        Command::Dimension(input) => {
            let d = ghz::dimension(&load(&input)?).map_err(|e| Failure::new("NOT_G_GHZ", e))?;
            Ok((json!(d), true))
        }
        Command::Weights { input, colouring: colours } => {
            let g = load(&input)?;
            match colours {
                None => Ok((table_json(&colouring_weight_table(&g)), true)),
                Some(c) => {
                    let vc = colouring(&g, &c)?;
                    let e = evaluate_colouring(&g, &vc);
                    Ok((json!({"colouring": c, "weight": e.weight.to_json(), "matchings": e.matchings}), true))
                }
            }
        }
        Command::Filter { input, colouring: colours } => {
            let g = load(&input)?;
            let vc = colouring(&g, &colours)?;
            Ok((document(&filter(&g, &vc)), true))
        }
        Command::Mcg(input) => Ok((document(&mcg(&load(&input)?)), true)),
        Command::Merge(input) => Ok((document(&load(&input)?.merge_parallel_edges()), true)),
        Command::DropZeros(input) => Ok((document(&load(&input)?.drop_zero_edges()), true)),
        Command::Connectivity(input) => Ok((json!(vertex_connectivity(&load(&input)?)), true)),
        Command::Cut { input, size } => {
            let g = load(&input)?;
            Ok((find_cut(&g, size).map_or(json!("none"), |c| cut_json(&c)), true))
        }
        Command::Reduce { input, all_cuts } => {
            let g = load(&input)?;
            let r = reduce(&g, ReduceOptions { all_cuts }).map_err(|e| Failure::new("REDUCTION_FAILED", e))?;
            let value = json!({
                "kappa": r.kappa,
                "connectivity_bound": r.connectivity_bound,
                "cut": cut_json(&r.cut),
                "cuts_tried": r.cuts_tried,
                "classification": r.classification,
                "case": r.case,
                "dimension": r.reduced_verdict.dimension,
                "reduced": document(&r.reduced),
                "verdict": verdict_json(&r.verdict),
                "reduced_verdict": verdict_json(&r.reduced_verdict),
                "scaled": r.scaled.as_ref().map(|s| document(&s.graph)),
            });
            Ok((value, true))
        }
        Command::Scale { input, epsilon } => {
            let s = ghz::scale_to_ghz(&load(&input)?, epsilon).map_err(|e| Failure::new("SCALING_FAILED", e))?;
            Ok((document(&s.graph), true))
        }
        Command::Bogdanov(input) => {
            let m = ghz::find_bogdanov_witness(&load(&input)?).map_err(|e| Failure::new("HYPOTHESIS_NOT_SATISFIED", e))?;
            Ok((json!(m.edge_indices()), true))
        }
        Command::Search { skeleton, dim, seed, restarts, iters, tol, epsilon } => {
            let g = io::parse(&read(&skeleton)?)?;
            let mut p = SearchProblem::new(&g, dim).map_err(|e| Failure::new("INVALID_PROBLEM", e))?;
            p.seed = seed;
            p.restarts = restarts;
            p.max_iters = iters;
            p.tolerance = tol;
            let out = p.search();
            let found = out.residual.value < tol;
            let eps = epsilon.unwrap_or(10.0 * tol.sqrt());
            let v = p.verify_weights(&out.weights, eps).expect("sized");
            let value = json!({
                "status": if found { "found" } else { "no assignment found" },
                "residual": io::format_float(out.residual.value),
                "restart": out.restart,
                "iterations": out.iterations,
                "weights": document(&p.graph(&out.weights).expect("sized")),
                "verification": {"mode": v.mode, "is_ghz": v.is_ghz, "dimension": v.dimension},
            });
            Ok((value, true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((value, ok)) => {
            let text = serde_json::to_string_pretty(&value).expect("json");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            let mut e = json!({"error": f.code, "message": f.message});
            if let Some(p) = f.path {
                e["path"] = json!(p);
            }
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
