//! `ned`: node and tree distances from the command line.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 on a data error
//! (unreadable or malformed input, unknown node labels, violated invariants).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::RangedU64ValueParser;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "ned", version, about = "Node distances over k-adjacent trees", propagate_version = true)]
pub struct Cli {
    /// Output layout.
    #[arg(long, value_enum, default_value = "plain", global = true)]
    pub format: Format,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub cmd: Cmd,
}

fn k_parser() -> RangedU64ValueParser<usize> {
    RangedU64ValueParser::new().range(1..)
}

fn ratio_parser(s: &str) -> Result<f64, String> {
    let r: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&r) {
        Ok(r)
    } else {
        Err(format!("{r} is outside [0, 1]"))
    }
}

#[derive(Args, Debug, Clone)]
pub struct WeightArg {
    /// `unit`, `wplus`, or a file with one `level w1 w2` line per level.
    #[arg(long, default_value = "unit")]
    pub weights: String,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Print the k-adjacent tree of a node.
    Ktree {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        node: String,
        #[arg(long, value_parser = k_parser())]
        k: usize,
        #[arg(long)]
        directed: bool,
        /// Also list which graph node sits at each tree position.
        #[arg(long)]
        annotate: bool,
    },
    /// TED* between two tree literals.
    Dist {
        // both are required; checked after the literals given are parsed so
        // a malformed literal is reported as such
        #[arg(long)]
        tree1: Option<String>,
        #[arg(long)]
        tree2: Option<String>,
        #[command(flatten)]
        weights: WeightArg,
        #[arg(long)]
        breakdown: bool,
    },
    /// NED between a node of one graph and a node of another.
    Ned {
        #[arg(long)]
        graph1: PathBuf,
        #[arg(long)]
        node1: String,
        #[arg(long)]
        graph2: PathBuf,
        #[arg(long)]
        node2: String,
        #[arg(long, value_parser = k_parser())]
        k: usize,
        #[command(flatten)]
        weights: WeightArg,
        #[arg(long)]
        directed: bool,
        #[arg(long)]
        breakdown: bool,
    },
    /// Nearest neighbors (or a range query) through a vantage-point index.
    #[command(group = clap::ArgGroup::new("query").required(true).args(["l", "range"]))]
    Knn {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_parser = k_parser())]
        k: usize,
        /// Seed for vantage selection; defaults to --seed.
        #[arg(long)]
        index_seed: Option<u64>,
        /// Graph holding the query node; defaults to --graph.
        #[arg(long)]
        query_graph: Option<PathBuf>,
        #[arg(long)]
        query_node: String,
        /// Number of neighbors.
        #[arg(short = 'l', value_parser = k_parser())]
        l: Option<usize>,
        /// Return every node within this distance instead (`3` or `7/2`).
        #[arg(long)]
        range: Option<String>,
        /// Report how many distances the query evaluated.
        #[arg(long)]
        count_evals: bool,
        /// Answer with a linear scan instead of the index.
        #[arg(long)]
        linear: bool,
        #[command(flatten)]
        weights: WeightArg,
        #[arg(long)]
        directed: bool,
    },
    /// Distance between two graphs.
    Graphdist {
        /// Hausdorff distance over node distances (the only mode).
        #[arg(long, required = true)]
        hausdorff: bool,
        #[arg(long, value_parser = k_parser())]
        k: usize,
        graph1: PathBuf,
        graph2: PathBuf,
        /// Compare seeded samples of at most this many nodes per side.
        #[arg(long, value_parser = k_parser())]
        sample: Option<usize>,
        #[command(flatten)]
        weights: WeightArg,
        #[arg(long)]
        directed: bool,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Anonymize a graph and try to re-identify its nodes.
    Deanon {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        directed: bool,
        #[arg(long, value_enum, default_value = "naive")]
        method: Method,
        /// Fraction of edges touched; several comma-separated values run a sweep.
        #[arg(long, value_parser = ratio_parser, value_delimiter = ',', default_value = "0")]
        ratio: Vec<f64>,
        #[arg(long, value_parser = k_parser(), default_value = "3")]
        k: usize,
        #[arg(short = 'l', value_parser = k_parser(), default_value = "5")]
        l: usize,
        /// Query this many anonymized nodes instead of all of them.
        #[arg(long, value_parser = k_parser())]
        sample: Option<usize>,
        #[arg(long, value_enum, default_value = "inclusive")]
        tie_policy: Tie,
        #[arg(long, value_enum, default_value = "ned")]
        ranker: RankerArg,
        #[command(flatten)]
        weights: WeightArg,
        /// Also print one line per query.
        #[arg(long)]
        rows: bool,
    },
    /// Experiment tables.
    Study {
        #[command(subcommand)]
        cmd: StudyCmd,
    },
    /// Solve an assignment problem read from a whitespace matrix file.
    #[command(hide = true)]
    Match {
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleCmd {
    /// TED* against the exact searches, for two trees or a whole corpus.
    #[command(group = clap::ArgGroup::new("input").required(true).args(["all", "tree1"]))]
    Compare {
        /// Every pair of distinct trees up to --nmax nodes and --depth-max height.
        #[arg(long, conflicts_with_all = ["tree1", "tree2"])]
        all: bool,
        #[arg(long, requires = "tree2")]
        tree1: Option<String>,
        #[arg(long, requires = "tree1")]
        tree2: Option<String>,
        #[arg(long, default_value = "7", value_parser = k_parser())]
        nmax: usize,
        #[arg(long, default_value = "3")]
        depth_max: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum StudyCmd {
    /// TED* against the exact unordered tree edit distance on all small trees.
    TedCloseness {
        #[arg(long, default_value = "6", value_parser = k_parser())]
        nmax: usize,
        /// Height bound; defaults to no bound.
        #[arg(long)]
        depth_max: Option<usize>,
    },
    /// TED* wall time on random tree pairs.
    Scaling {
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,500", value_parser = k_parser())]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "3,4", value_parser = k_parser())]
        levels: Vec<usize>,
        #[arg(long, default_value = "20", value_parser = k_parser())]
        reps: usize,
    },
    /// Nearest-neighbor sets and top-l ties as k grows.
    KEffect {
        #[arg(long)]
        graph1: PathBuf,
        #[arg(long)]
        graph2: PathBuf,
        #[arg(long)]
        directed: bool,
        #[arg(long, default_value = "100", value_parser = k_parser())]
        queries: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6", value_parser = k_parser())]
        ks: Vec<usize>,
        #[arg(short = 'l', default_value = "5", value_parser = k_parser())]
        l: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Naive,
    Sparsify,
    Perturb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Tie {
    Inclusive,
    Exclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RankerArg {
    Ned,
    Degree,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = commands::run(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| commands::CliError::Data(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| commands::CliError::Data(e.to_string()))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
