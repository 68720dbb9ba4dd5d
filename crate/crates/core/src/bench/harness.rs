//! Experiment drivers: ingestion speedup, entity recall, query latency.
//!
//! Every driver checks the correctness side of its experiment (report
//! counts, commit counts, result identity) before it hands back timings.

use std::path::Path;
use std::thread;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::corpus::{mutate_corpus, ManifestEntry};
use super::words::{business_words, technical_words};
use crate::container::{Container, Mode};
use crate::error::{Error, Result};
use crate::ingest::{sync_directory, SyncConfig, SyncReport};
use crate::query::{search, SearchOptions};

/// Flat summary of whichever experiments were run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cold_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incremental_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speedup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cold_docs_per_sec: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recall_at_1: Option<f64>,
    /// Same probes with the substring boost switched off. Recorded for contrast.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recall_at_1_without_boost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_query_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p95_query_ms: Option<f64>,
}

impl BenchReport {
    pub fn with_rq1(mut self, rq1: &Rq1Outcome) -> Self {
        self.cold_seconds = Some(round_ms(rq1.cold_seconds));
        self.incremental_seconds = Some(round_ms(rq1.incremental_seconds));
        self.speedup = Some(rq1.speedup);
        self.cold_docs_per_sec = Some(rq1.cold_docs_per_sec);
        self
    }

    pub fn with_rq2(mut self, boosted: &Rq2Outcome, unboosted: Option<&Rq2Outcome>) -> Self {
        self.recall_at_1 = Some(boosted.recall_at_1);
        self.recall_at_1_without_boost = unboosted.map(|o| o.recall_at_1);
        self
    }

    pub fn with_rq3(mut self, rq3: &Rq3Outcome) -> Self {
        self.mean_query_ms = Some(rq3.mean_ms);
        self.p95_query_ms = Some(rq3.p95_ms);
        self
    }
}

fn round_ms(seconds: f64) -> f64 {
    (seconds * 1000.0).round() / 1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rq1Outcome {
    pub cold: SyncReport,
    pub incremental: SyncReport,
    pub cold_seconds: f64,
    pub incremental_seconds: f64,
    pub speedup: f64,
    pub cold_docs_per_sec: f64,
    pub mutated: Vec<String>,
}

/// Cold sync of `corpus_dir` into an empty container, then a re-sync after
/// touching `mutate_count` files.
pub fn run_rq1(
    container: &mut Container,
    corpus_dir: &Path,
    manifest: &[ManifestEntry],
    mutate_count: usize,
) -> Result<Rq1Outcome> {
    if container.stats()?.documents != 0 {
        return Err(Error::BenchInvalid("cold ingestion needs an empty container".into()));
    }
    let config = SyncConfig::default();
    let n = manifest.len() as u64;

    let started = Instant::now();
    let cold = sync_directory(container, corpus_dir, &config)?;
    let cold_seconds = started.elapsed().as_secs_f64();
    if cold.added != n || cold.updated != 0 || cold.skipped != 0 || !cold.failed.is_empty() {
        return Err(Error::BenchInvalid(format!(
            "cold sync of {n} files reported added={} updated={} skipped={} failed={}",
            cold.added,
            cold.updated,
            cold.skipped,
            cold.failed.len()
        )));
    }

    let mutated = mutate_corpus(corpus_dir, manifest, mutate_count, container.generation()? as u64)?;
    let commits_before = container.commit_count();
    let started = Instant::now();
    let incremental = sync_directory(container, corpus_dir, &config)?;
    let incremental_seconds = started.elapsed().as_secs_f64();
    let k = mutate_count as u64;
    let committed = container.commit_count() - commits_before;
    if incremental.updated != k
        || incremental.added != 0
        || incremental.skipped != n - k
        || !incremental.failed.is_empty()
        || committed != k
    {
        return Err(Error::BenchInvalid(format!(
            "re-sync after touching {k} files reported updated={} added={} skipped={} with {committed} commits",
            incremental.updated, incremental.added, incremental.skipped
        )));
    }

    Ok(Rq1Outcome {
        cold,
        incremental,
        cold_seconds,
        incremental_seconds,
        speedup: cold_seconds / incremental_seconds.max(f64::MIN_POSITIVE),
        cold_docs_per_sec: n as f64 / cold_seconds.max(f64::MIN_POSITIVE),
        mutated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rq2Outcome {
    pub probes: usize,
    pub hits: usize,
    pub recall_at_1: f64,
    /// Entity codes whose top result was missing or in the wrong document.
    pub misses: Vec<String>,
}

/// Queries every injected entity code and counts rank-1 hits on the file
/// that holds it.
pub fn run_rq2(container: &Container, manifest: &[ManifestEntry], options: &SearchOptions) -> Result<Rq2Outcome> {
    let probes: Vec<(&str, &str)> = manifest
        .iter()
        .filter_map(|e| e.entity.as_deref().map(|code| (code, e.path.as_str())))
        .collect();
    if probes.is_empty() {
        return Err(Error::NothingToMeasure("no injected entity codes in the manifest"));
    }
    let options = SearchOptions { k: 1, ..*options };
    let mut misses = Vec::new();
    for &(code, path) in &probes {
        let top = search(container, code, &options)?;
        if top.first().map(|r| r.source_path.as_str()) != Some(path) {
            misses.push(code.to_owned());
        }
    }
    let hits = probes.len() - misses.len();
    Ok(Rq2Outcome {
        probes: probes.len(),
        hits,
        recall_at_1: hits as f64 / probes.len() as f64,
        misses,
    })
}

/// Fixed mixed workload: 25 common-word queries, 20 rare-word queries and
/// 5 entity queries. Entity slots fall back to rare words when the manifest
/// has fewer than five codes.
pub fn default_query_set(manifest: &[ManifestEntry], seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let business = business_words();
    let technical = technical_words();
    let mut queries = Vec::with_capacity(50);
    for _ in 0..25 {
        let pair: Vec<&str> = business.choose_multiple(&mut rng, 2).copied().collect();
        queries.push(pair.join(" "));
    }
    for word in technical.choose_multiple(&mut rng, 25) {
        queries.push((*word).to_owned());
    }
    let entities: Vec<&String> = manifest.iter().filter_map(|e| e.entity.as_ref()).collect();
    let replace = entities.len().min(5);
    let total = queries.len();
    for (slot, code) in entities.choose_multiple(&mut rng, replace).enumerate() {
        queries[total - 5 + slot] = (*code).clone();
    }
    queries
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rq3Outcome {
    pub samples: usize,
    pub mean_ms: f64,
    pub p95_ms: f64,
}

impl Rq3Outcome {
    fn from_samples(mut samples_ms: Vec<f64>) -> Self {
        samples_ms.sort_by(f64::total_cmp);
        let n = samples_ms.len();
        let mean = samples_ms.iter().sum::<f64>() / n as f64;
        // Nearest-rank percentile.
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        Rq3Outcome {
            samples: n,
            mean_ms: mean,
            p95_ms: samples_ms[rank - 1],
        }
    }
}

/// Times `iterations` searches, cycling through `queries`, after `warmup`
/// untimed ones.
pub fn run_rq3(
    container: &Container,
    queries: &[String],
    warmup: usize,
    iterations: usize,
    options: &SearchOptions,
) -> Result<Rq3Outcome> {
    Ok(Rq3Outcome::from_samples(time_searches(container, queries, warmup, iterations, options)?))
}

/// Same as [`run_rq3`] but with `threads` read-only handles querying the
/// container file concurrently; each thread performs `iterations` searches.
pub fn run_rq3_concurrent(
    container_path: &Path,
    queries: &[String],
    warmup: usize,
    iterations: usize,
    threads: usize,
    options: &SearchOptions,
) -> Result<Rq3Outcome> {
    if threads == 0 {
        return Err(Error::InvalidOption("threads must be positive".into()));
    }
    let per_thread: Vec<Result<Vec<f64>>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let reader = Container::open(container_path, Mode::ReadOnly)?;
                    time_searches(&reader, queries, warmup, iterations, options)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    });
    let mut samples = Vec::new();
    for result in per_thread {
        samples.extend(result?);
    }
    Ok(Rq3Outcome::from_samples(samples))
}

fn time_searches(
    container: &Container,
    queries: &[String],
    warmup: usize,
    iterations: usize,
    options: &SearchOptions,
) -> Result<Vec<f64>> {
    if iterations == 0 {
        return Err(Error::NothingToMeasure("iterations must be at least 1"));
    }
    if queries.is_empty() {
        return Err(Error::NothingToMeasure("query set is empty"));
    }
    for q in queries.iter().cycle().take(warmup) {
        search(container, q, options)?;
    }
    let mut samples = Vec::with_capacity(iterations);
    for q in queries.iter().cycle().take(iterations) {
        let started = Instant::now();
        std::hint::black_box(search(container, q, options)?);
        samples.push(started.elapsed().as_secs_f64() * 1000.0);
    }
    Ok(samples)
}
