//! `rf`: counting, validation, searches and certificate checks from the shell.

mod cache;
mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::cache::Cache;

pub const CODE_VERSION: &str = concat!("rf-", env!("CARGO_PKG_VERSION"));

#[derive(Parser, Debug)]
#[command(name = "rf", version, about = "Finite structural Ramsey computations on binary trees")]
struct Cli {
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Skip the result cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Cache directory.
    #[arg(long, global = true, env = "RF_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count types, Joyce trees, Joyce graphs or embedding types by height.
    Count(CountArgs),
    /// Validate a structure read from a file.
    Validate(ValidateArgs),
    /// Search for a certificate.
    Search(SearchArgs),
    /// Re-check a certificate bundle.
    Verify { file: PathBuf },
    /// The type-count table.
    Table {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        /// Print CSV instead of JSON.
        #[arg(long)]
        csv: bool,
        #[arg(long, value_enum, default_value_t = Injectivity::Members)]
        length_injectivity: Injectivity,
    },
    /// All type signatures of a size, with representatives.
    EmitCatalog {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = CatalogKind::Tuple)]
        kind: CatalogKind,
    },
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(value_enum)]
    object: CountObject,
    /// Size, or height for `emb-height`.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, value_enum, default_value_t = Injectivity::Members)]
    length_injectivity: Injectivity,
    /// Levels of the minimizing tree for the MINIMIZER method.
    #[arg(long)]
    minimizer_depth: Option<usize>,
    /// Underlying graph filter: `K3`, `E3` or `3:0-1,1-2`.
    #[arg(long)]
    graph: Option<String>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(value_enum)]
    object: ValidateObject,
    file: PathBuf,
    /// Ambient tree for `strong-subtree` (default: the full binary tree just covering the input).
    #[arg(long)]
    tree: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(value_enum)]
    kind: SearchKind,
    /// Coloring JSON file.
    #[arg(long, conflicts_with = "coloring_spec")]
    coloring: Option<PathBuf>,
    /// Coloring spec applied to full binary trees, e.g. `f-lt-q` or `constant:0`.
    #[arg(long)]
    coloring_spec: Option<String>,
    /// Height of the generated full binary trees.
    #[arg(long, default_value_t = 3)]
    tree_height: usize,
    /// Number of trees; for `min-fhl` the product dimension.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Height of the sought subtrees (`hl`), `m` for `milliken`.
    #[arg(long)]
    height: Option<usize>,
    /// Height of the colored subtrees (`milliken`).
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::General)]
    mode: ModeArg,
    /// Height `N` of the monochromatic tuple (`min-fhl`).
    #[arg(long = "N")]
    big_n: Option<usize>,
    /// Number of colors (`min-fhl`).
    #[arg(long)]
    k: Option<u64>,
    /// Constant branching bound, 1 or 2 (`min-fhl`).
    #[arg(long, default_value_t = 2)]
    b: usize,
    /// Largest height tried (`min-fhl`).
    #[arg(long, default_value_t = 6)]
    cap: usize,
    #[arg(long, default_value_t = rf_core::hl::DEFAULT_BUDGET)]
    budget: u64,
    /// Where to write the certificate bundle.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountObject {
    Types,
    JoyceTrees,
    JoyceGraphs,
    EmbHeight,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    EmbAll,
    TupAll,
    EmbMin,
    TupMin,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Brute,
    Predicate,
    Minimizer,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Injectivity {
    Members,
    MeetClosure,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogKind {
    Embedding,
    Tuple,
    Weak,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidateObject {
    JoyceOrder,
    CodedOrder,
    JoyceGraph,
    CodedGraph,
    Blossom,
    StrongSubtree,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchKind {
    Hl,
    Dense,
    Milliken,
    MinFhl,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    General,
    Leaves,
}

/// What a command produced, before it is wrapped in a record.
pub struct Outcome {
    pub result: Value,
    pub exit: u8,
    /// Text printed instead of the JSON record (CSV output).
    pub raw: Option<String>,
    /// A certificate bundle to write to `--out`.
    pub artifact: Option<Value>,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Self { result, exit: 0, raw: None, artifact: None }
    }

    pub fn negative(result: Value) -> Self {
        Self { result, exit: 1, raw: None, artifact: None }
    }
}

/// A failed invocation: exit code 2 for bad input, 3 for exhausted budgets.
#[derive(Debug)]
pub struct Failure {
    pub exit: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl ToString) -> Self {
        Self { exit: 2, message: message.to_string() }
    }
}

impl From<rf_core::Error> for Failure {
    fn from(e: rf_core::Error) -> Self {
        use rf_core::Error::*;
        let exit = match e {
            BudgetExceeded { .. } | CapExceeded { .. } | KTooLarge(_) => 3,
            Parse(_) | Precondition(_) | Invalid(_) => 2,
        };
        Self { exit, message: e.to_string() }
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    params: &'a Map<String, Value>,
    result: &'a Value,
    code_version: &'a str,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("rf: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let (name, params, cacheable) = commands::describe(&cli.command);
    let cache = (!cli.no_cache && cacheable).then(|| Cache::open(cli.cache_dir.clone())).flatten();
    let key = Cache::key(&name, &params, CODE_VERSION);
    let run = || commands::run(&cli.command);
    let outcome = match cache.as_ref().and_then(|c| c.get(&key)) {
        Some(o) => Ok(o),
        None => {
            let fresh = run();
            if let (Ok(o), Some(c)) = (&fresh, &cache) {
                c.put(&key, o);
            }
            fresh
        }
    };
    let (result, exit, raw, artifact) = match outcome {
        Ok(o) => (o.result, o.exit, o.raw, o.artifact),
        Err(f) => {
            eprintln!("rf: {}", f.message);
            (serde_json::json!({ "error": f.message }), f.exit, None, None)
        }
    };
    if let (Some(bundle), Command::Search(SearchArgs { out: Some(path), .. })) = (&artifact, &cli.command) {
        let text = serde_json::to_string_pretty(bundle).expect("bundles serialize");
        if let Err(e) = std::fs::write(path, text + "\n") {
            eprintln!("rf: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let mut stdout = std::io::stdout().lock();
    let text = match raw {
        Some(raw) => raw,
        None => {
            let record = RunRecord { command: &name, params: &params, result: &result, code_version: CODE_VERSION };
            serde_json::to_string_pretty(&record).expect("records serialize") + "\n"
        }
    };
    let _ = stdout.write_all(text.as_bytes());
    eprintln!("elapsed_ms: {}", start.elapsed().as_millis());
    ExitCode::from(exit)
}
