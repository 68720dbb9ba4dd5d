#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use kfc_core::container::{Container, NewDocument, SegmentId};
use kfc_core::ingest::{Modality, Signature};
use rand::seq::SliceRandom;
use rand::Rng;

/// Brute-force TF-IDF over dense vectors, written without any of the
/// library's scoring code.
pub struct DenseOracle {
    vocab: Vec<String>,
    segments: Vec<(SegmentId, Vec<f64>)>,
    idf: Vec<f64>,
}

fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn tf_vector(text: &str, vocab: &[String]) -> Vec<f64> {
    let mut v = vec![0.0f64; vocab.len()];
    for w in words(text) {
        if let Ok(i) = vocab.binary_search(&w) {
            v[i] += 1.0;
        }
    }
    v.iter().map(|&f| if f > 0.0 { 1.0 + f.ln() } else { 0.0 }).collect()
}

impl DenseOracle {
    pub fn new(segments: &[(SegmentId, String)]) -> Self {
        let vocab: Vec<String> = segments
            .iter()
            .flat_map(|(_, t)| words(t))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let tfs: Vec<(SegmentId, Vec<f64>)> =
            segments.iter().map(|(id, t)| (*id, tf_vector(t, &vocab))).collect();
        let n = segments.len() as f64;
        let idf: Vec<f64> = (0..vocab.len())
            .map(|i| {
                let df = tfs.iter().filter(|(_, v)| v[i] > 0.0).count() as f64;
                (n / (1.0 + df)).ln() + 1.0
            })
            .collect();
        let weighted = tfs
            .into_iter()
            .map(|(id, v)| (id, v.iter().zip(&idf).map(|(t, w)| t * w).collect()))
            .collect();
        DenseOracle {
            vocab,
            segments: weighted,
            idf,
        }
    }

    /// Cosine of the query against every segment, zero scores dropped.
    pub fn cosines(&self, query: &str) -> BTreeMap<SegmentId, f64> {
        let q: Vec<f64> = tf_vector(query, &self.vocab)
            .iter()
            .zip(&self.idf)
            .map(|(t, w)| t * w)
            .collect();
        let qn = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut out = BTreeMap::new();
        if qn == 0.0 {
            return out;
        }
        for (id, d) in &self.segments {
            let dn = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = q.iter().zip(d).map(|(a, b)| a * b).sum();
            if dn > 0.0 && dot > 0.0 {
                out.insert(*id, dot / (qn * dn));
            }
        }
        out
    }
}

pub fn new_doc(path: &str, body: &str) -> NewDocument {
    NewDocument {
        source_path: path.to_owned(),
        signature: Signature::of_bytes(body.as_bytes()),
        size_bytes: body.len() as u64,
        modality: Modality::PlainText,
    }
}

pub const SMALL_POOL: [&str; 14] = [
    "ledger", "invoice", "server", "cache", "latency", "budget", "audit", "vendor", "kernel", "quota",
    "shipment", "router", "margin", "token",
];

pub fn random_segment<R: Rng>(rng: &mut R, pool: &[&str]) -> String {
    let n = rng.gen_range(1..=12);
    (0..n).map(|_| *pool.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// Commits random documents until `total_segments` segments exist; returns
/// every `(segment_id, content)`.
pub fn random_corpus<R: Rng>(
    rng: &mut R,
    container: &mut Container,
    total_segments: usize,
    pool: &[&str],
) -> Vec<(SegmentId, String)> {
    let mut doc = 0;
    let mut left = total_segments;
    while left > 0 {
        let n = rng.gen_range(1..=4).min(left);
        let segs: Vec<String> = (0..n).map(|_| random_segment(rng, pool)).collect();
        let path = format!("d{doc}.txt");
        container.commit_document(&new_doc(&path, &segs.join("\n\n")), &segs).unwrap();
        left -= n;
        doc += 1;
    }
    container
        .all_segments()
        .unwrap()
        .into_iter()
        .map(|s| (s.segment_id, s.content))
        .collect()
}

pub fn write_files(root: &Path, files: &[(&str, &str)]) {
    for (rel, body) in files {
        let path = root.join(rel);
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, body).unwrap();
    }
}

/// Runs a pure-cosine search and checks it against the oracle: same result
/// set, scores within `tol`, and an order consistent with score descending
/// then segment id ascending.
pub fn check_cosine_search(
    container: &Container,
    oracle: &DenseOracle,
    query: &str,
    tol: f64,
) -> Result<(), String> {
    let options = kfc_core::SearchOptions {
        alpha: 1.0,
        beta: 0.0,
        k: usize::MAX,
        collapse_docs: false,
    };
    let results = match kfc_core::search(container, query, &options) {
        Ok(r) => r,
        Err(kfc_core::Error::EmptyQuery) => return Ok(()),
        Err(e) => return Err(e.to_string()),
    };
    let expected = oracle.cosines(query);
    let got: BTreeMap<SegmentId, f64> = results.iter().map(|r| (r.segment_id, r.cosine)).collect();
    if got.keys().ne(expected.keys()) {
        return Err(format!("query {query:?}: result set {got:?} != oracle {expected:?}"));
    }
    for r in &results {
        let want = expected[&r.segment_id];
        if (r.cosine - want).abs() > tol || r.score != r.cosine {
            return Err(format!(
                "query {query:?}: segment {} cosine {} vs oracle {want}",
                r.segment_id, r.cosine
            ));
        }
    }
    for pair in results.windows(2) {
        let (a, b) = (expected[&pair[0].segment_id], expected[&pair[1].segment_id]);
        let tied = (a - b).abs() <= 1e-12;
        let ok = if tied { pair[0].segment_id < pair[1].segment_id } else { a > b };
        if !ok {
            return Err(format!(
                "query {query:?}: segment {} ranked above {} (oracle {a} vs {b})",
                pair[0].segment_id, pair[1].segment_id
            ));
        }
    }
    Ok(())
}

/// A random query of 1..=3 pool words, sometimes with an unknown word.
pub fn random_query<R: Rng>(rng: &mut R, pool: &[&str]) -> String {
    let mut words: Vec<&str> = (0..rng.gen_range(1..=3)).map(|_| *pool.choose(rng).unwrap()).collect();
    if rng.gen_bool(0.2) {
        words.push("zzunknown");
    }
    words.join(" ")
}

/// Plants `needle` into one random segment of a random corpus and returns
/// the id of the segment holding it.
pub fn corpus_with_needle<R: Rng>(
    rng: &mut R,
    container: &mut Container,
    total_segments: usize,
    needle: &str,
) -> SegmentId {
    let target = rng.gen_range(0..total_segments);
    let mut doc = 0;
    let mut made = 0;
    while made < total_segments {
        let n = rng.gen_range(1..=4).min(total_segments - made);
        let segs: Vec<String> = (0..n)
            .map(|i| {
                let mut s = random_segment(rng, &SMALL_POOL);
                if made + i == target {
                    s = format!("{s} {needle} {}", random_segment(rng, &SMALL_POOL));
                }
                s
            })
            .collect();
        container
            .commit_document(&new_doc(&format!("n{doc}.txt"), &segs.join("\n\n")), &segs)
            .unwrap();
        made += n;
        doc += 1;
    }
    let segments = container.all_segments().unwrap();
    let needle_folded = needle.to_lowercase();
    let holders: Vec<SegmentId> = segments
        .iter()
        .filter(|s| s.content.to_lowercase().contains(&needle_folded))
        .map(|s| s.segment_id)
        .collect();
    assert_eq!(holders.len(), 1, "needle must live in exactly one segment");
    holders[0]
}

/// Needles shaped like entity codes, multi-word phrases or mixed-case
/// tokens, built so they never occur by accident.
pub fn random_needle<R: Rng>(rng: &mut R) -> String {
    let letters = |rng: &mut R, n: usize| -> String { (0..n).map(|_| rng.gen_range(b'a'..=b'z') as char).collect() };
    match rng.gen_range(0..3) {
        0 => format!("UNIQUE_{}_CODE_{:03}", letters(rng, 4).to_uppercase(), rng.gen_range(0..1000)),
        1 => format!("{} {} qx{}", SMALL_POOL.choose(rng).unwrap(), SMALL_POOL.choose(rng).unwrap(), letters(rng, 5)),
        _ => format!("Zz{}Q", letters(rng, 6)),
    }
}

pub const CRASH_ENV: &str = "KFC_CRASH_CONTAINER";
pub const CRASH_BOUNDARY_ENV: &str = "KFC_CRASH_BOUNDARY";
/// Exit status of a crash child whose commit ran to completion.
pub const CRASH_CHILD_COMMITTED: i32 = 3;

pub fn victim_segments() -> Vec<String> {
    vec![
        "victim ledger shipment fresh".to_owned(),
        "victim second segment novelterm".to_owned(),
    ]
}

/// Child side: when the crash variables are set, commit one document with
/// an aborting fault armed and never return.
pub fn crash_child_if_requested() {
    let Ok(path) = std::env::var(CRASH_ENV) else {
        return;
    };
    let boundary: usize = std::env::var(CRASH_BOUNDARY_ENV).unwrap().parse().unwrap();
    let mut c = Container::open(&path, kfc_core::Mode::ReadWrite).unwrap();
    c.set_fault_plan(Some(kfc_core::container::FaultPlan {
        after_writes: boundary,
        action: kfc_core::container::FaultAction::Abort,
    }));
    c.commit_document(&new_doc("victim.txt", "victim"), &victim_segments()).unwrap();
    std::process::exit(CRASH_CHILD_COMMITTED);
}

/// Parent side: kills a child at every write boundary of one commit and
/// checks the container after each crash. Returns the number of boundaries
/// exercised.
pub fn crash_at_every_boundary(dir: &Path, child_args: &[&str]) -> Result<usize, String> {
    let path = dir.join("crash.kfc");
    {
        let mut c = Container::create(&path).map_err(|e| e.to_string())?;
        c.commit_document(&new_doc("base.txt", "base"), &["base ledger content".to_owned()])
            .map_err(|e| e.to_string())?;
    }
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    for boundary in 0.. {
        let status = std::process::Command::new(&exe)
            .args(child_args)
            .env(CRASH_ENV, &path)
            .env(CRASH_BOUNDARY_ENV, boundary.to_string())
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        let committed = status.code() == Some(CRASH_CHILD_COMMITTED);
        if !committed && status.success() {
            return Err(format!("child at boundary {boundary} exited cleanly without committing"));
        }
        let c = Container::open(&path, kfc_core::Mode::ReadWrite)
            .map_err(|e| format!("boundary {boundary}: reopen failed: {e}"))?;
        c.verify().map_err(|e| format!("boundary {boundary}: {e}"))?;
        let victim = c.document("victim.txt").map_err(|e| e.to_string())?;
        let base = c.document("base.txt").map_err(|e| e.to_string())?;
        if base.is_none() {
            return Err(format!("boundary {boundary}: committed document lost"));
        }
        match (committed, victim) {
            (true, Some(v)) => {
                let segs = c.segments(v.doc_id).map_err(|e| e.to_string())?;
                let contents: Vec<String> = segs.into_iter().map(|s| s.content).collect();
                if contents != victim_segments() {
                    return Err("committed document is incomplete".into());
                }
                return Ok(boundary);
            }
            (false, None) => {}
            (true, None) => return Err(format!("boundary {boundary}: commit reported but missing")),
            (false, Some(_)) => return Err(format!("boundary {boundary}: crashed commit is visible")),
        }
    }
    unreachable!()
}
