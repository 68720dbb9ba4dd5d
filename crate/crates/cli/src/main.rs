use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use kfc_core::ingest::{sync_directory, watch_directory, StopSignal, SyncConfig, SyncReport};
use kfc_core::{search, Container, Error, Mode, SearchOptions, SearchResult, Stats};

mod bench;

#[derive(Parser)]
#[command(name = "kfc", version, about = "Single-file knowledge container")]
struct Cli {
    /// Container file. Not needed for `init` (takes a path) or `bench`.
    #[arg(short, long, env = "KF_CONTAINER", global = true)]
    container: Option<PathBuf>,

    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create an empty container.
    Init { path: PathBuf },
    /// Bring the container in line with a directory.
    Sync(SyncArgs),
    /// Hybrid search.
    Query(QueryArgs),
    /// Document, segment and term counts.
    Stats,
    /// Synthetic corpus and experiment harness.
    #[command(subcommand)]
    Bench(bench::BenchCommand),
}

#[derive(Args)]
struct SyncArgs {
    dir: PathBuf,
    /// Keep syncing until interrupted.
    #[arg(long)]
    watch: bool,
    /// Seconds between watch passes.
    #[arg(long, default_value_t = 2.0, value_parser = parse_interval)]
    interval: f64,
    /// Remove documents whose file disappeared.
    #[arg(long)]
    prune: bool,
    #[arg(long = "include", value_name = "GLOB")]
    include: Vec<String>,
    #[arg(long = "exclude", value_name = "GLOB")]
    exclude: Vec<String>,
    #[arg(long)]
    include_hidden: bool,
}

#[derive(Args)]
struct QueryArgs {
    text: String,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// One result per document.
    #[arg(long)]
    collapse_docs: bool,
}

fn parse_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("interval must be a positive number of seconds".into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kfc: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let json = cli.json;
    match cli.command {
        Command::Init { path } => {
            let c = Container::create(&path)?;
            print_stats(&c.stats()?, json);
            c.close()
        }
        Command::Sync(args) => cmd_sync(container_path(&cli.container)?, args, json),
        Command::Query(args) => {
            let c = Container::open(container_path(&cli.container)?, Mode::ReadOnly)?;
            let options = SearchOptions {
                alpha: args.alpha,
                beta: args.beta,
                k: args.top_k,
                collapse_docs: args.collapse_docs,
            };
            let results = search(&c, &args.text, &options)?;
            print_results(&results, json);
            Ok(())
        }
        Command::Stats => {
            let c = Container::open(container_path(&cli.container)?, Mode::ReadOnly)?;
            print_stats(&c.stats()?, json);
            Ok(())
        }
        Command::Bench(cmd) => bench::run(cmd, json),
    }
}

fn container_path(flag: &Option<PathBuf>) -> Result<&Path, Error> {
    flag.as_deref()
        .ok_or_else(|| Error::InvalidOption("no container given (use --container or KF_CONTAINER)".into()))
}

fn cmd_sync(path: &Path, args: SyncArgs, json: bool) -> Result<(), Error> {
    let mut c = Container::open(path, Mode::ReadWrite)?;
    let config = SyncConfig {
        prune: args.prune,
        include_globs: args.include,
        exclude_globs: args.exclude,
        include_hidden: args.include_hidden,
        ..SyncConfig::default()
    };
    if !args.watch {
        let report = sync_directory(&mut c, &args.dir, &config)?;
        print_report(&report, json);
        return c.close();
    }

    let stop = StopSignal::new();
    let handler_stop = stop.clone();
    ctrlc::set_handler(move || handler_stop.stop())
        .map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e),
        })?;
    let interval = Duration::from_secs_f64(args.interval);
    for report in watch_directory(&mut c, &args.dir, config, interval, stop) {
        // Watch output is always one JSON object per pass.
        print_report(&report?, true);
    }
    c.close()
}

fn print_report(report: &SyncReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string(report).expect("report serializes"));
        return;
    }
    println!(
        "scanned {}  added {}  updated {}  skipped {}  removed {}  failed {}  elapsed {:.3}s",
        report.scanned,
        report.added,
        report.updated,
        report.skipped,
        report.removed,
        report.failed.len(),
        report.elapsed
    );
    for f in &report.failed {
        println!("  failed: {}: {}", f.path, f.reason);
    }
}

fn print_stats(stats: &Stats, json: bool) {
    if json {
        println!("{}", serde_json::to_string(stats).expect("stats serialize"));
    } else {
        println!("documents   {}", stats.documents);
        println!("segments    {}", stats.segments);
        println!("terms       {}", stats.terms);
        println!("file_bytes  {}", stats.file_bytes);
    }
}

const TABLE_SNIPPET_CHARS: usize = 60;

fn print_results(results: &[SearchResult], json: bool) {
    if json {
        println!("{}", serde_json::to_string(results).expect("results serialize"));
        return;
    }
    let path_width = results
        .iter()
        .map(|r| r.source_path.chars().count())
        .max()
        .unwrap_or(0)
        .max("source_path".len());
    println!(
        "{:>4}  {:>8}  {:>8}  {:<7}  {:<path_width$}  snippet",
        "rank", "score", "cosine", "boosted", "source_path"
    );
    for (i, r) in results.iter().enumerate() {
        let flat: Vec<char> = r.snippet.split_whitespace().collect::<Vec<_>>().join(" ").chars().collect();
        // Boosted snippets are centered on the match, so keep their middle.
        let start = if r.boosted {
            flat.len().saturating_sub(TABLE_SNIPPET_CHARS) / 2
        } else {
            0
        };
        let end = (start + TABLE_SNIPPET_CHARS).min(flat.len());
        let snippet = format!(
            "{}{}{}",
            if start > 0 { "..." } else { "" },
            flat[start..end].iter().collect::<String>(),
            if end < flat.len() { "..." } else { "" }
        );
        println!(
            "{:>4}  {:>8.4}  {:>8.4}  {:<7}  {:<path_width$}  {}",
            i + 1,
            r.score,
            r.cosine,
            r.boosted,
            r.source_path,
            snippet
        );
    }
}
