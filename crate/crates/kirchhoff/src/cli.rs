//! Command-line surface: parse → normalize → factor/compress/count/
//! enumerate/sample/gcd/gen-pe/stats pipelines over edge-list files.
//!
//! stdout carries only the result payload; diagnostics go to stderr.
//! Exit codes: 0 success, 1 no-arborescence input, 2 usage or input error,
//! 3 cap or depth errors.

use crate::decompose::all_factors;
use crate::digraph::Digraph;
use crate::engine::{compress, CompressConfig, CompressionReport, EngineError, Heuristic};
use crate::ops::{kirchhoff_gcd, pe_generate, sample_arborescence, BaseKind, PeSpec};
use crate::oracle;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NO_ARBORESCENCE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "kirchhoff",
    version,
    about = "Factorized arborescence enumeration for directed graphs",
    max_term_width = 100
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    /// maximize SCC count after deletion
    Scc,
    /// maximize new domination pairs after deletion
    Dom,
    /// maximize edges eliminated by contraction
    Elim,
}

impl From<HeuristicArg> for Heuristic {
    fn from(h: HeuristicArg) -> Heuristic {
        match h {
            HeuristicArg::Scc => Heuristic::MaxSccSplit,
            HeuristicArg::Dom => Heuristic::MaxNewDominators,
            HeuristicArg::Elim => Heuristic::MaxEdgeElimination,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args)]
struct CompressOpts {
    /// Deletion-contraction edge heuristic
    #[arg(long, value_enum, default_value = "scc")]
    heuristic: HeuristicArg,
    /// Expand prime factors with at most this many vertices directly
    #[arg(long, default_value_t = 5)]
    expand_threshold: usize,
    /// Cap on deletion-contraction recursion depth
    #[arg(long)]
    max_depth: Option<usize>,
    /// Seed for randomized tie-breaking (unused by the default tie-break)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CompressOpts {
    fn config(&self) -> CompressConfig {
        CompressConfig {
            heuristic: self.heuristic.into(),
            expand_threshold: self.expand_threshold,
            max_depth: self.max_depth,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct InputOpts {
    /// Edge-list input file
    input: PathBuf,
    /// Enumerate in-arborescences: transpose the digraph before anything else
    #[arg(long)]
    transpose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Prime-factorize the digraph (SCC + domination pipeline)
    Factor {
        #[command(flatten)]
        input: InputOpts,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Compress the enumerator and report its size
    Compress {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        opts: CompressOpts,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Count arborescences exactly
    Count {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        opts: CompressOpts,
    },
    /// List every arborescence, one edge-label list per line
    Enumerate {
        #[command(flatten)]
        input: InputOpts,
        /// Vertex-count cap for enumeration
        #[arg(long, default_value_t = oracle::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Draw arborescences uniformly at random from the compressed form
    Sample {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        opts: CompressOpts,
        /// Number of draws
        #[arg(long, default_value_t = 1)]
        samples: u64,
    },
    /// Greatest common divisor of two enumerators
    Gcd {
        /// First edge-list input file
        input1: PathBuf,
        /// Second edge-list input file
        input2: PathBuf,
        /// Enumerate in-arborescences of both inputs
        #[arg(long)]
        transpose: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Generate a practically enumerable digraph with known prime structure
    GenPe {
        /// Recursion depth of the build-up
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Prime components attached per component and level
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cycle lengths of the base components
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
        base_cycles: Vec<usize>,
        /// Write the JSON manifest of the intended prime structure here
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Compression report only
    Stats {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        opts: CompressOpts,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Parses argv and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap renders its own help/usage; keep its exit semantics
            // (0 for --help/--version, 2 for usage errors)
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("kirchhoff: {}", err.message);
            err.code
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> CliError {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> CliError {
        match e {
            EngineError::ZeroEnumerator => CliError::new(EXIT_NO_ARBORESCENCE, e.to_string()),
            EngineError::DepthExceeded { .. } | EngineError::Expansion(_) => {
                CliError::new(EXIT_CAP, e.to_string())
            }
            EngineError::InvalidConfig(_) => CliError::new(EXIT_USAGE, e.to_string()),
        }
    }
}

fn load(path: &Path, transpose: bool) -> Result<Digraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let g = Digraph::parse_edge_list(&text)
        .map_err(|e| CliError::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let g = if transpose { g.transpose() } else { g };
    Ok(g.normalize())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Factor { input, format } => {
            let g = load(&input.input, input.transpose)?;
            let fz =
                all_factors(&g).map_err(|e| CliError::new(EXIT_NO_ARBORESCENCE, e.to_string()))?;
            match format {
                Format::Json => writeln!(out, "{}", fz.to_json()).unwrap(),
                Format::Text => {
                    for f in &fz.factors {
                        let g = &f.digraph;
                        let verts: Vec<String> =
                            g.vertices().iter().map(|&v| g.vertex_name(v)).collect();
                        let edges: Vec<String> = g
                            .edges()
                            .iter()
                            .map(|e| {
                                format!(
                                    "{}->{}:{}",
                                    g.vertex_name(e.src),
                                    g.vertex_name(e.dst),
                                    e.label.pretty()
                                )
                            })
                            .collect();
                        writeln!(
                            out,
                            "{} prime={} root={} vertices=[{}] edges=[{}]",
                            f.rule.as_str(),
                            f.prime,
                            f.root
                                .map(|r| g.vertex_name(r))
                                .unwrap_or_else(|| "-".into()),
                            verts.join(","),
                            edges.join(" ")
                        )
                        .unwrap();
                    }
                }
                Format::Dot => {
                    writeln!(out, "digraph factors {{").unwrap();
                    for (i, f) in fz.factors.iter().enumerate() {
                        let g = &f.digraph;
                        writeln!(out, "  subgraph cluster_{i} {{").unwrap();
                        writeln!(out, "    label=\"{} prime={}\";", f.rule.as_str(), f.prime)
                            .unwrap();
                        for &v in g.vertices() {
                            writeln!(out, "    \"f{i}_{}\";", g.vertex_name(v)).unwrap();
                        }
                        for e in g.edges() {
                            writeln!(
                                out,
                                "    \"f{i}_{}\" -> \"f{i}_{}\" [label=\"{}\"];",
                                g.vertex_name(e.src),
                                g.vertex_name(e.dst),
                                e.label.pretty()
                            )
                            .unwrap();
                        }
                        writeln!(out, "  }}").unwrap();
                    }
                    writeln!(out, "}}").unwrap();
                }
            }
            Ok(EXIT_OK)
        }
        Command::Compress {
            input,
            opts,
            format,
        } => {
            let g = load(&input.input, input.transpose)?;
            let expr = compress(&g, &opts.config())?;
            let report = CompressionReport::new(&g, &expr);
            match format {
                Format::Json => {
                    writeln!(
                        out,
                        "{}",
                        json!({ "expr": expr.to_json(), "report": report.to_json() })
                    )
                    .unwrap();
                }
                _ => {
                    writeln!(out, "{}", expr.pretty()).unwrap();
                    writeln!(
                        out,
                        "# vertices={} edges={} scc={} arborescences={} expanded={} compressed={} ratio={}",
                        report.vertices,
                        report.edges,
                        report.scc_count,
                        report.arborescence_count,
                        report.expanded_symbol_count,
                        report.compressed_symbol_count,
                        report.ratio_display()
                    )
                    .unwrap();
                }
            }
            Ok(EXIT_OK)
        }
        Command::Count { input, opts } => {
            let g = load(&input.input, input.transpose)?;
            match compress(&g, &opts.config()) {
                Ok(expr) => {
                    writeln!(out, "{}", expr.count_monomials()).unwrap();
                    Ok(EXIT_OK)
                }
                Err(EngineError::ZeroEnumerator) => {
                    writeln!(out, "0").unwrap();
                    Ok(EXIT_NO_ARBORESCENCE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Enumerate { input, cap } => {
            let g = load(&input.input, input.transpose)?;
            let arbs = oracle::enumerate_capped(&g, cap).map_err(|e| {
                let estimate = oracle::matrix_tree_count(&g);
                CliError::new(
                    EXIT_CAP,
                    format!("{e}; estimated arborescence count {estimate}"),
                )
            })?;
            for a in &arbs.items {
                let labels: Vec<String> = a
                    .edges
                    .iter()
                    .map(|&id| {
                        let label = &g.edge(id).expect("enumerated edge").label;
                        match label.var_symbol() {
                            Some(s) => s.name().to_string(),
                            None => format!("({})", label.pretty()),
                        }
                    })
                    .collect();
                writeln!(out, "{}", labels.join(" ")).unwrap();
            }
            if arbs.is_empty() {
                return Ok(EXIT_NO_ARBORESCENCE);
            }
            Ok(EXIT_OK)
        }
        Command::Sample {
            input,
            opts,
            samples,
        } => {
            let g = load(&input.input, input.transpose)?;
            let expr = compress(&g, &opts.config())?;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..samples {
                let m = sample_arborescence(&expr, &mut rng);
                let mut names: Vec<String> = m.vars.iter().map(|s| s.name().to_string()).collect();
                names.sort();
                writeln!(out, "{}", names.join(" ")).unwrap();
            }
            Ok(EXIT_OK)
        }
        Command::Gcd {
            input1,
            input2,
            transpose,
            format,
        } => {
            let g1 = load(&input1, transpose)?;
            let g2 = load(&input2, transpose)?;
            let result = kirchhoff_gcd(&g1, &g2).map_err(|e| match e {
                crate::ops::OpsError::NoArborescence => {
                    CliError::new(EXIT_NO_ARBORESCENCE, e.to_string())
                }
                crate::ops::OpsError::Engine(err) => err.into(),
                other => CliError::new(EXIT_USAGE, other.to_string()),
            })?;
            match format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    json!({ "expr": result.expr.to_json(), "exact": result.exact })
                )
                .unwrap(),
                _ => {
                    writeln!(out, "{}", result.expr.pretty()).unwrap();
                    writeln!(out, "# exact={}", result.exact).unwrap();
                }
            }
            Ok(EXIT_OK)
        }
        Command::GenPe {
            depth,
            width,
            seed,
            base_cycles,
            manifest,
        } => {
            let bases: Vec<BaseKind> = base_cycles.into_iter().map(BaseKind::Cycle).collect();
            let spec = PeSpec::new(depth, width).with_bases(bases).with_seed(seed);
            let (g, m) =
                pe_generate(&spec).map_err(|e| CliError::new(EXIT_USAGE, e.to_string()))?;
            write!(
                out,
                "{}",
                g.to_edge_list()
                    .expect("generated labels are plain variables")
            )
            .unwrap();
            if let Some(path) = manifest {
                let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
                std::fs::write(&path, text)
                    .map_err(|e| CliError::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
            }
            Ok(EXIT_OK)
        }
        Command::Stats {
            input,
            opts,
            format,
        } => {
            let g = load(&input.input, input.transpose)?;
            match format {
                Format::Dot => {
                    write!(out, "{}", g.to_dot()).unwrap();
                    if let Some(root) = g.root() {
                        let tree = g.dominator_tree(root).expect("rooted");
                        writeln!(out, "// dominator tree").unwrap();
                        writeln!(out, "digraph dominators {{").unwrap();
                        for &v in g.vertices() {
                            if let Some(p) = tree.parent(v) {
                                writeln!(
                                    out,
                                    "  \"{}\" -> \"{}\" [style=dashed];",
                                    g.vertex_name(p),
                                    g.vertex_name(v)
                                )
                                .unwrap();
                            }
                        }
                        writeln!(out, "}}").unwrap();
                    }
                    Ok(EXIT_OK)
                }
                _ => {
                    let expr = compress(&g, &opts.config())?;
                    let report = CompressionReport::new(&g, &expr);
                    match format {
                        Format::Json => writeln!(out, "{}", report.to_json()).unwrap(),
                        _ => write!(out, "{}", report.to_text()).unwrap(),
                    }
                    Ok(EXIT_OK)
                }
            }
        }
    }
}
