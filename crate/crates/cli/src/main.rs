use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use framelab::complex::{clique_complex, DEFAULT_BUDGET};
use framelab::graph::build_graph;
use framelab::poset::{build_decomp_poset, build_nondeg_poset, hat_poset};
use framelab::Error;
use framelab_cli::commands::{self, CountOptions, HomologyArgs, TorsionSpec};
use framelab_cli::exit_code;
use framelab_cli::report::RunReport;
use framelab_cli::suite;

#[derive(Parser)]
#[command(name = "framelab", version, about = "Exact checks on frame complexes of finite unitary spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Annotate every check with the published result it audits.
    #[arg(long, global = true)]
    paper_refs: bool,
    /// Worker thread cap.
    #[arg(long, global = true, env = "FRAMELAB_THREADS")]
    threads: Option<usize>,
    /// Include wall-clock timings (makes reports differ between runs).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Instance {
    /// Dimension of the unitary space.
    n: u32,
    /// Order of the fixed field; the space lives over GF(q²).
    q: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form counts, optionally checked by enumeration.
    Count {
        #[command(flatten)]
        inst: Instance,
        /// Also report the Euler characteristic of the decomposition poset.
        #[arg(long)]
        euler_decomp: bool,
        /// Enumerate lines, vectors and frames when the instance is small.
        #[arg(long)]
        oracle: bool,
    },
    /// Walk counts by relative position.
    Walks {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = 4)]
        max_k: u32,
    },
    /// Adjacency spectrum and its checks.
    Spectrum {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value = "rational")]
        engine: String,
    },
    /// Homology of the frame complex.
    Homology {
        #[command(flatten)]
        inst: Instance,
        /// Highest homology degree to compute.
        #[arg(long)]
        max_dim: Option<usize>,
        /// none, all, or a comma-separated list of degrees.
        #[arg(long, default_value = "none")]
        torsion: String,
        #[arg(long, default_value = "auto")]
        collapse: String,
        #[arg(long, default_value = "rational")]
        engine: String,
        /// Also compute Betti numbers over these primes.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
    },
    /// Spectral vanishing bounds and predictions.
    Garland {
        #[command(flatten)]
        inst: Instance,
    },
    /// Subspace and decomposition poset checks.
    Poset {
        #[command(flatten)]
        inst: Instance,
    },
    /// Run the quick or full verification suite.
    VerifyAll {
        #[arg(long, value_enum, default_value_t = SuiteKind::Quick)]
        suite: SuiteKind,
    },
    /// Export a built object as text.
    Export {
        #[command(flatten)]
        inst: Instance,
        #[arg(value_enum)]
        what: ExportKind,
        /// Dimension of the boundary map or simplices to export.
        #[arg(long)]
        dim: Option<usize>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum SuiteKind {
    Quick,
    Full,
}

#[derive(Copy, Clone, ValueEnum)]
enum ExportKind {
    /// Edge list of the orthogonality graph.
    Edges,
    /// Adjacency matrix in MatrixMarket format.
    Adjacency,
    /// Simplex list of the frame complex.
    Simplices,
    /// Boundary map of the frame complex in MatrixMarket format (needs --dim).
    Boundary,
    /// Non-degenerate subspace poset.
    NondegPoset,
    /// Decomposition poset.
    DecompPoset,
    /// Frame poset without the top frames.
    HatPoset,
}

fn parse_torsion(s: &str) -> Result<TorsionSpec, Error> {
    match s {
        "none" => Ok(TorsionSpec::None),
        "all" => Ok(TorsionSpec::All),
        _ => s
            .split(',')
            .map(|d| d.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map(TorsionSpec::Degrees)
            .map_err(|_| Error::InvalidParameter(format!("--torsion expects none, all or degrees, got {s}"))),
    }
}

fn export(inst: &Instance, what: ExportKind, dim: Option<usize>) -> Result<String, Error> {
    commands::validate(inst.n, inst.q)?;
    let g = build_graph(inst.n as usize, inst.q)?;
    let top = inst.n as usize - 1;
    Ok(match what {
        ExportKind::Edges => g.edge_list(),
        ExportKind::Adjacency => g.matrix_market(),
        ExportKind::Simplices => clique_complex(&g, dim.unwrap_or(top).min(top), DEFAULT_BUDGET)?.export(),
        ExportKind::Boundary => {
            let k = dim.ok_or_else(|| Error::InvalidParameter("boundary export needs --dim".into()))?;
            if k == 0 || k > top {
                return Err(Error::InvalidParameter(format!("boundary dimension must be in 1..={top}")));
            }
            clique_complex(&g, k, DEFAULT_BUDGET)?.boundary(k).matrix_market()
        }
        ExportKind::NondegPoset => build_nondeg_poset(&g)?.0.export(),
        ExportKind::DecompPoset => build_decomp_poset(&g)?.0.export(),
        ExportKind::HatPoset => hat_poset(&g)?.export(),
    })
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let report = match &cli.command {
        Command::Count { inst, euler_decomp, oracle } => commands::count(
            inst.n,
            inst.q,
            &CountOptions {
                euler_decomp: *euler_decomp,
                oracle: *oracle,
            },
        )?,
        Command::Walks { inst, max_k } => commands::walks(inst.n, inst.q, *max_k)?,
        Command::Spectrum { inst, engine } => commands::spectrum(inst.n, inst.q, engine)?,
        Command::Homology { inst, max_dim, torsion, collapse, engine, primes } => commands::homology(
            inst.n,
            inst.q,
            &HomologyArgs {
                max_dim: *max_dim,
                torsion: parse_torsion(torsion)?,
                collapse: collapse.clone(),
                engine: engine.clone(),
                primes: primes.clone(),
            },
        )?,
        Command::Garland { inst } => commands::garland(inst.n, inst.q)?,
        Command::Poset { inst } => commands::poset(inst.n, inst.q)?,
        Command::VerifyAll { suite } => suite::verify_all(matches!(suite, SuiteKind::Full))?,
        Command::Export { inst, what, dim } => return Ok(Output::Text(export(inst, *what, *dim)?)),
    };
    Ok(Output::Report(report))
}

enum Output {
    Report(RunReport),
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("framelab: cannot set thread count: {e}");
            return ExitCode::from(2);
        }
    }
    let (text, code) = match run(&cli) {
        Ok(Output::Text(t)) => (t, 0),
        Ok(Output::Report(r)) => {
            let body = match cli.global.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&r.to_json(cli.global.paper_refs, cli.global.timings))
                        .expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Csv => r.to_csv(cli.global.paper_refs),
            };
            (body, if r.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("framelab: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("framelab: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
