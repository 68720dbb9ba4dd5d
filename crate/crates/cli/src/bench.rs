use std::path::PathBuf;

use clap::{Args, Subcommand};
use kfc_core::bench::{
    default_query_set, generate_corpus, run_rq1, run_rq2, run_rq3, run_rq3_concurrent, BenchReport, CorpusSpec,
    ManifestEntry,
};
use kfc_core::ingest::{sync_directory, SyncConfig};
use kfc_core::{Container, Error, SearchOptions};
use serde_json::json;

#[derive(Subcommand)]
pub enum BenchCommand {
    /// Write a synthetic corpus into an empty directory.
    Corpus {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Cold ingestion vs incremental re-sync.
    Rq1 {
        #[command(flatten)]
        run: RunArgs,
        /// Files to modify before the re-sync.
        #[arg(long, default_value_t = 0)]
        mutate: usize,
    },
    /// Recall@1 of injected entity codes.
    Rq2 {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Query latency.
    Rq3 {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        latency: LatencyArgs,
    },
    /// All three experiments on one corpus.
    All {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0)]
        mutate: usize,
        #[command(flatten)]
        latency: LatencyArgs,
    },
}

#[derive(Args, Clone)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 1000)]
    docs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Injected entity codes; the first goes to doc 500 when it exists.
    #[arg(long, default_value_t = 20)]
    probes: usize,
}

#[derive(Args)]
pub struct RunArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Empty or missing directory for the corpus and container. A temporary
    /// directory is used (and removed) when omitted.
    #[arg(long)]
    workdir: Option<PathBuf>,
}

#[derive(Args)]
pub struct LatencyArgs {
    #[arg(long, default_value_t = 50)]
    warmup: usize,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    /// Concurrent read-only handles; 1 runs in-process on the writer handle.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

struct Workspace {
    _temp: Option<tempfile::TempDir>,
    corpus: PathBuf,
    container: PathBuf,
    manifest: Vec<ManifestEntry>,
    seed: u64,
}

impl Workspace {
    fn prepare(run: &RunArgs) -> Result<Self, Error> {
        let (temp, root) = match &run.workdir {
            Some(dir) => (None, dir.clone()),
            None => {
                let t = tempfile::tempdir().map_err(|e| Error::Io {
                    path: std::env::temp_dir(),
                    source: e,
                })?;
                let root = t.path().to_path_buf();
                (Some(t), root)
            }
        };
        let corpus = root.join("corpus");
        let manifest = generate_corpus(&spec(&run.corpus), &corpus)?;
        Ok(Workspace {
            _temp: temp,
            corpus,
            container: root.join("bench.kfc"),
            manifest,
            seed: run.corpus.seed,
        })
    }

    fn synced(&self) -> Result<Container, Error> {
        let mut c = Container::create(&self.container)?;
        let report = sync_directory(&mut c, &self.corpus, &SyncConfig::default())?;
        if report.added != self.manifest.len() as u64 || !report.failed.is_empty() {
            return Err(Error::BenchInvalid(format!(
                "sync added {} of {} files",
                report.added,
                self.manifest.len()
            )));
        }
        Ok(c)
    }
}

fn spec(args: &CorpusArgs) -> CorpusSpec {
    CorpusSpec::with_probes(args.docs, args.seed, args.probes)
}

pub fn run(cmd: BenchCommand, json: bool) -> Result<(), Error> {
    match cmd {
        BenchCommand::Corpus { out, corpus } => {
            let spec = spec(&corpus);
            let manifest = generate_corpus(&spec, &out)?;
            if json {
                let value = json!({
                    "out": out,
                    "docs": manifest.len(),
                    "seed": spec.seed,
                    "manifest": manifest,
                });
                println!("{value}");
            } else {
                println!("wrote {} documents to {}", manifest.len(), out.display());
                for e in manifest.iter().filter(|e| e.entity.is_some()) {
                    println!("  {}  {}", e.path, e.entity.as_deref().unwrap_or_default());
                }
            }
            Ok(())
        }
        BenchCommand::Rq1 { run, mutate } => {
            let ws = Workspace::prepare(&run)?;
            let report = rq1(&ws, mutate, BenchReport::default())?;
            emit(&report, json);
            Ok(())
        }
        BenchCommand::Rq2 { run } => {
            let ws = Workspace::prepare(&run)?;
            let c = ws.synced()?;
            let report = rq2(&c, &ws, BenchReport::default())?;
            emit(&report, json);
            Ok(())
        }
        BenchCommand::Rq3 { run, latency } => {
            let ws = Workspace::prepare(&run)?;
            let c = ws.synced()?;
            let report = rq3(&c, &ws, &latency, BenchReport::default())?;
            emit(&report, json);
            Ok(())
        }
        BenchCommand::All { run, mutate, latency } => {
            let ws = Workspace::prepare(&run)?;
            let report = rq1(&ws, mutate, BenchReport::default())?;
            let c = Container::open(&ws.container, kfc_core::Mode::ReadWrite)?;
            let report = rq2(&c, &ws, report)?;
            let report = rq3(&c, &ws, &latency, report)?;
            emit(&report, json);
            Ok(())
        }
    }
}

fn rq1(ws: &Workspace, mutate: usize, report: BenchReport) -> Result<BenchReport, Error> {
    let mut c = Container::create(&ws.container)?;
    let outcome = run_rq1(&mut c, &ws.corpus, &ws.manifest, mutate)?;
    c.close()?;
    Ok(report.with_rq1(&outcome))
}

fn rq2(c: &Container, ws: &Workspace, report: BenchReport) -> Result<BenchReport, Error> {
    let boosted = run_rq2(c, &ws.manifest, &SearchOptions::default())?;
    let plain = run_rq2(
        c,
        &ws.manifest,
        &SearchOptions {
            beta: 0.0,
            ..SearchOptions::default()
        },
    )?;
    Ok(report.with_rq2(&boosted, Some(&plain)))
}

fn rq3(c: &Container, ws: &Workspace, args: &LatencyArgs, report: BenchReport) -> Result<BenchReport, Error> {
    let queries = default_query_set(&ws.manifest, ws.seed);
    let options = SearchOptions::default();
    let outcome = if args.threads > 1 {
        run_rq3_concurrent(&ws.container, &queries, args.warmup, args.iterations, args.threads, &options)?
    } else {
        run_rq3(c, &queries, args.warmup, args.iterations, &options)?
    };
    Ok(report.with_rq3(&outcome))
}

fn emit(report: &BenchReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string(report).expect("report serializes"));
        return;
    }
    let value = serde_json::to_value(report).expect("report serializes");
    let fields = value.as_object().expect("report is an object");
    let width = fields.keys().map(String::len).max().unwrap_or(0);
    for (key, v) in fields {
        println!("{key:<width$}  {v}");
    }
}
