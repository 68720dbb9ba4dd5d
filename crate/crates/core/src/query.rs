//! Hybrid retrieval: `score = alpha * cosine + beta * substring_indicator`.
//!
//! Cosine similarity is computed over tf·idf weights by walking the posting
//! lists of the query terms. The substring indicator is evaluated against
//! every stored segment, so an entity string whose tokens are unknown to the
//! vocabulary is still found and lifted above all non-matching segments.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rusqlite::Connection;
use serde::Serialize;
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::container::{load_postings, load_vector, Container, DocId, IndexCache, SegmentId};
use crate::error::{Error, Result};
use crate::ingest::normalize_text;
use crate::textindex::{fold_case, fold_char, sublinear_tf, tokenize, weighted_norm, SparseVector};

pub const SNIPPET_CHARS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    /// Keep only the best-scoring segment of each document.
    pub collapse_docs: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            alpha: 1.0,
            beta: 1.0,
            k: 10,
            collapse_docs: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryPlan {
    pub raw_query: String,
    /// Case-folded normalized query, matched as one contiguous string.
    pub needle: String,
    /// Unit-length tf·idf vector over terms known to the vocabulary.
    pub query_vector: SparseVector,
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    /// Index generation the idf weights were taken from.
    pub generation: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub segment_id: SegmentId,
    pub doc_id: DocId,
    pub source_path: String,
    pub score: f64,
    pub cosine: f64,
    pub boosted: bool,
    pub snippet: String,
}

pub fn build_query_plan(container: &Container, raw_query: &str, options: &SearchOptions) -> Result<QueryPlan> {
    container.read(|conn| {
        let cache = container.index_cache(conn)?;
        plan_with(&cache, raw_query, options)
    })
}

fn plan_with(cache: &IndexCache, raw_query: &str, options: &SearchOptions) -> Result<QueryPlan> {
    let SearchOptions { alpha, beta, k, .. } = *options;
    if !(alpha.is_finite() && beta.is_finite()) || alpha < 0.0 || beta < 0.0 {
        return Err(Error::InvalidOption(format!(
            "alpha and beta must be finite and non-negative (alpha={alpha}, beta={beta})"
        )));
    }
    if alpha == 0.0 && beta == 0.0 {
        return Err(Error::DegenerateWeights { alpha, beta });
    }
    if k == 0 {
        return Err(Error::InvalidOption("k must be positive".into()));
    }
    let normalized = normalize_text(raw_query);
    if normalized.is_empty() {
        return Err(Error::EmptyQuery);
    }

    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for token in tokenize(&normalized).iter() {
        if let Some(&id) = cache.terms.get(token) {
            *counts.entry(id).or_default() += 1;
        }
    }
    let weighted: Vec<(u32, f64)> = counts
        .into_iter()
        .map(|(t, f)| {
            let idf = cache.idf.idf(t).expect("cached term has a df");
            (t, sublinear_tf(f) * idf)
        })
        .collect();
    let norm = weighted.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    let query_vector = SparseVector::new(weighted.into_iter().map(|(t, w)| (t, w / norm)).collect())?;

    Ok(QueryPlan {
        raw_query: raw_query.to_owned(),
        needle: fold_case(&normalized),
        query_vector,
        alpha,
        beta,
        k,
        generation: cache.generation(),
    })
}

/// Indicator: does `content` contain `needle` after NFC + case folding?
pub fn substring_indicator(needle: &str, content: &str) -> bool {
    let needle = fold_case(&needle.nfc().collect::<String>());
    !needle.is_empty() && fold_case(&content.nfc().collect::<String>()).contains(&needle)
}

/// Cosine similarity of the (unit) query vector with every segment that
/// shares at least one term with it.
pub fn cosine_accumulate(container: &Container, query_vector: &SparseVector) -> Result<HashMap<SegmentId, f64>> {
    container.read(|conn| {
        let mut cache = container.index_cache(conn)?;
        accumulate(conn, &mut cache, query_vector)
    })
}

fn accumulate(
    conn: &Connection,
    cache: &mut IndexCache,
    query_vector: &SparseVector,
) -> Result<HashMap<SegmentId, f64>> {
    let mut dots: HashMap<SegmentId, f64> = HashMap::new();
    for &(term, q_weight) in query_vector.entries() {
        let Some(idf) = cache.idf.idf(term) else {
            continue;
        };
        for (segment, count) in load_postings(conn, term)? {
            *dots.entry(segment).or_default() += q_weight * sublinear_tf(count) * idf;
        }
    }

    let mut cosines = HashMap::with_capacity(dots.len());
    for (segment, dot) in dots {
        let norm = match cache.norms.get(&segment) {
            Some(&n) => n,
            None => {
                let vector = load_vector(conn, segment)?.ok_or_else(|| {
                    Error::IndexInconsistency(format!("posting for segment {segment} without vector"))
                })?;
                let n = weighted_norm(&vector, &cache.idf)?;
                cache.norms.insert(segment, n);
                n
            }
        };
        if let Some(norm) = norm {
            cosines.insert(segment, (dot / norm).clamp(0.0, 1.0));
        }
    }
    Ok(cosines)
}

/// Every segment in the container whose folded content contains `needle`.
pub fn candidate_boost_scan(container: &Container, needle: &str) -> Result<BTreeSet<SegmentId>> {
    let needle = fold_case(&normalize_text(needle));
    if needle.is_empty() {
        return Err(Error::EmptyQuery);
    }
    container.read(|conn| Ok(boost_scan(conn, &needle)?.into_iter().collect()))
}

fn boost_scan(conn: &Connection, needle: &str) -> Result<HashSet<SegmentId>> {
    let mut stmt = conn.prepare_cached("SELECT segment_id, content FROM segments")?;
    let mut rows = stmt.query([])?;
    let mut hits = HashSet::new();
    let mut folded = String::new();
    while let Some(row) = rows.next()? {
        let content = row.get_ref(1)?.as_str().map_err(rusqlite::Error::from)?;
        folded.clear();
        if is_nfc(content) {
            folded.extend(content.chars().map(fold_char));
        } else {
            folded.extend(content.nfc().map(fold_char));
        }
        if folded.contains(needle) {
            hits.insert(row.get(0)?);
        }
    }
    Ok(hits)
}

pub fn search(container: &Container, raw_query: &str, options: &SearchOptions) -> Result<Vec<SearchResult>> {
    container.read(|conn| {
        let mut cache = container.index_cache(conn)?;
        let plan = plan_with(&cache, raw_query, options)?;
        let cosines = accumulate(conn, &mut cache, &plan.query_vector)?;
        drop(cache);
        // With beta = 0 the indicator cannot change any score.
        let boosted = if plan.beta > 0.0 {
            boost_scan(conn, &plan.needle)?
        } else {
            HashSet::new()
        };

        let mut ranked: Vec<(SegmentId, f64, f64, bool)> = cosines
            .keys()
            .chain(boosted.iter())
            .collect::<HashSet<_>>()
            .into_iter()
            .map(|&segment| {
                let cosine = cosines.get(&segment).copied().unwrap_or(0.0);
                let is_boosted = boosted.contains(&segment);
                let indicator = if is_boosted { 1.0 } else { 0.0 };
                (segment, plan.alpha * cosine + plan.beta * indicator, cosine, is_boosted)
            })
            .collect();
        ranked.sort_by(|a, b| rank_order((a.1, a.3, a.2, a.0), (b.1, b.3, b.2, b.0)));

        let mut results = Vec::new();
        let mut seen_docs = HashSet::new();
        let mut doc_stmt = conn.prepare_cached(
            "SELECT s.doc_id, s.content, d.source_path
             FROM segments s JOIN documents d ON d.doc_id = s.doc_id WHERE s.segment_id = ?1",
        )?;
        for (segment, score, cosine, is_boosted) in ranked {
            if results.len() == plan.k {
                break;
            }
            let (doc_id, content, source_path): (DocId, String, String) =
                doc_stmt.query_row([segment], |r| Ok((r.get(0)?, r.get(1)?, r.get(2)?)))?;
            if options.collapse_docs && !seen_docs.insert(doc_id) {
                continue;
            }
            let snippet = if is_boosted {
                snippet_around(&content, &plan.needle)
            } else {
                content.chars().take(SNIPPET_CHARS).collect()
            };
            results.push(SearchResult {
                segment_id: segment,
                doc_id,
                source_path,
                score,
                cosine,
                boosted: is_boosted,
                snippet,
            });
        }
        Ok(results)
    })
}

/// Scores closer than this are ranked as equal. Mathematically equal
/// cosines of different vectors can differ in the last bits depending on
/// summation order; without a resolution the tie-breaks would never apply.
pub const RANK_RESOLUTION: f64 = 1e-12;

fn quantize(x: f64) -> i64 {
    (x / RANK_RESOLUTION).round() as i64
}

/// Total order used for ranking: score descending, boosted first, higher
/// cosine, then lower segment id. Scores and cosines are compared at
/// [`RANK_RESOLUTION`].
pub fn rank_order(a: (f64, bool, f64, SegmentId), b: (f64, bool, f64, SegmentId)) -> Ordering {
    quantize(b.0)
        .cmp(&quantize(a.0))
        .then(b.1.cmp(&a.1))
        .then(quantize(b.2).cmp(&quantize(a.2)))
        .then(a.3.cmp(&b.3))
}

/// Up to [`SNIPPET_CHARS`] characters centered on the first match.
fn snippet_around(content: &str, needle: &str) -> String {
    let text: Vec<char> = content.nfc().collect();
    let folded: String = text.iter().map(|&c| fold_char(c)).collect();
    let Some(byte_pos) = folded.find(needle) else {
        return text.iter().take(SNIPPET_CHARS).collect();
    };
    let match_start = folded[..byte_pos].chars().count();
    let match_len = needle.chars().count();
    let center = match_start + match_len / 2;
    let start = center
        .saturating_sub(SNIPPET_CHARS / 2)
        .min(text.len().saturating_sub(SNIPPET_CHARS));
    text[start..(start + SNIPPET_CHARS).min(text.len())].iter().collect()
}
