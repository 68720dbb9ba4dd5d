//! Deterministic synthetic corpus with injected entity codes.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::words::{business_words, technical_words, ENTITY_WORDS};
use crate::error::{Error, Result};

/// The exemplar probe: injected into document 500 of the default corpus.
pub const EXEMPLAR_ENTITY: &str = "UNIQUE_INVOICE_CODE_XYZ_999";
pub const EXEMPLAR_DOC: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub n_docs: usize,
    pub seed: u64,
    /// `(doc_index, entity_code)`; each code is inserted into its document only.
    pub entity_injections: Vec<(usize, String)>,
    /// Mean document length in words.
    pub doc_length: usize,
    /// Share of words drawn from the business pool; the rest are technical.
    pub business_share: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            n_docs: 1000,
            seed: 42,
            entity_injections: Vec::new(),
            doc_length: 150,
            business_share: 0.7,
        }
    }
}

impl CorpusSpec {
    /// Default corpus with `n_probes` injected codes. The first probe is the
    /// exemplar at doc 500 (when the corpus is large enough); the others get
    /// seeded codes at seeded distinct documents.
    pub fn with_probes(n_docs: usize, seed: u64, n_probes: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c0de);
        let n_probes = n_probes.min(n_docs);
        let mut injections = Vec::with_capacity(n_probes);
        let mut used_docs = BTreeSet::new();
        let mut used_codes = BTreeSet::new();
        if n_probes > 0 && n_docs > EXEMPLAR_DOC {
            injections.push((EXEMPLAR_DOC, EXEMPLAR_ENTITY.to_owned()));
            used_docs.insert(EXEMPLAR_DOC);
            used_codes.insert(EXEMPLAR_ENTITY.to_owned());
        }
        while injections.len() < n_probes {
            let doc = rng.gen_range(0..n_docs);
            let code = entity_code(&mut rng);
            if used_docs.contains(&doc) || used_codes.contains(&code) {
                continue;
            }
            used_docs.insert(doc);
            used_codes.insert(code.clone());
            injections.push((doc, code));
        }
        injections.sort();
        CorpusSpec {
            n_docs,
            seed,
            entity_injections: injections,
            ..CorpusSpec::default()
        }
    }
}

/// `UNIQUE_<WORD>_CODE_<AAA>_<NNN>`
pub fn entity_code<R: Rng>(rng: &mut R) -> String {
    let word = ENTITY_WORDS.choose(rng).expect("non-empty pool");
    let letters: String = (0..3).map(|_| rng.gen_range(b'A'..=b'Z') as char).collect();
    format!("UNIQUE_{word}_CODE_{letters}_{:03}", rng.gen_range(0..1000))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// File name relative to the corpus directory, e.g. `doc_7.txt`.
    pub path: String,
    pub entity: Option<String>,
}

pub fn doc_file_name(index: usize) -> String {
    format!("doc_{index}.txt")
}

/// Text of one document. Each document has its own RNG stream derived from
/// the corpus seed and its index.
pub fn generate_document(spec: &CorpusSpec, index: usize, entity: Option<&str>) -> String {
    let business = business_words();
    let technical = technical_words();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64 + 1);

    let mean = spec.doc_length.max(1);
    let words = rng.gen_range((mean / 2).max(1)..=mean + mean / 2);
    let inject_at = words / 2;

    let mut out = String::new();
    let mut sentence_left = 0usize;
    let mut sentences_in_paragraph = 0usize;
    for i in 0..words {
        if sentence_left == 0 {
            if i > 0 {
                out.push('.');
                sentences_in_paragraph += 1;
                if sentences_in_paragraph >= rng.gen_range(4..=6) {
                    out.push_str("\n\n");
                    sentences_in_paragraph = 0;
                } else {
                    out.push(' ');
                }
            }
            sentence_left = rng.gen_range(8..=15);
        } else {
            out.push(' ');
        }
        let pool = if rng.gen_bool(spec.business_share.clamp(0.0, 1.0)) {
            &business
        } else {
            &technical
        };
        let word = pool.choose(&mut rng).expect("non-empty pool");
        let starts_sentence = out.is_empty() || out.ends_with(". ") || out.ends_with("\n\n");
        if starts_sentence {
            let mut chars = word.chars();
            if let Some(first) = chars.next() {
                out.extend(first.to_uppercase());
                out.push_str(chars.as_str());
            }
        } else {
            out.push_str(word);
        }
        if i == inject_at {
            if let Some(code) = entity {
                out.push_str(" reference ");
                out.push_str(code);
            }
        }
        sentence_left -= 1;
    }
    out.push_str(".\n");
    out
}

/// Writes `doc_0.txt .. doc_{n-1}.txt` into `out_dir`, which must be empty
/// or absent.
pub fn generate_corpus(spec: &CorpusSpec, out_dir: &Path) -> Result<Vec<ManifestEntry>> {
    validate_injections(spec)?;
    match fs::read_dir(out_dir) {
        Ok(mut entries) => {
            if entries.next().is_some() {
                return Err(Error::InvalidOption(format!(
                    "{} is not empty",
                    out_dir.display()
                )));
            }
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        }
        Err(e) => return Err(Error::io(out_dir, e)),
    }

    let mut manifest = Vec::with_capacity(spec.n_docs);
    let mut texts = Vec::with_capacity(spec.n_docs);
    for index in 0..spec.n_docs {
        let entity = spec
            .entity_injections
            .iter()
            .find(|(doc, _)| *doc == index)
            .map(|(_, code)| code.clone());
        texts.push(generate_document(spec, index, entity.as_deref()));
        manifest.push(ManifestEntry {
            path: doc_file_name(index),
            entity,
        });
    }

    // Each code must be findable in exactly one document, case-insensitively.
    for (doc, code) in &spec.entity_injections {
        let needle = code.to_lowercase();
        let holders: Vec<usize> = texts
            .iter()
            .enumerate()
            .filter(|(_, t)| t.to_lowercase().contains(&needle))
            .map(|(i, _)| i)
            .collect();
        if holders != [*doc] {
            return Err(Error::InvalidOption(format!(
                "entity {code} would appear in documents {holders:?}"
            )));
        }
    }

    for (entry, text) in manifest.iter().zip(&texts) {
        let path = out_dir.join(&entry.path);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(manifest)
}

fn validate_injections(spec: &CorpusSpec) -> Result<()> {
    let mut docs = BTreeSet::new();
    for (doc, code) in &spec.entity_injections {
        if *doc >= spec.n_docs {
            return Err(Error::InvalidOption(format!(
                "injection target {doc} outside corpus of {}",
                spec.n_docs
            )));
        }
        if !docs.insert(*doc) {
            return Err(Error::InvalidOption(format!("two entities injected into doc {doc}")));
        }
        if code.trim().is_empty() || code.split_whitespace().count() != 1 {
            return Err(Error::InvalidOption(format!("entity code {code:?} must be one word")));
        }
    }
    Ok(())
}

/// Appends a revision line to `count` documents spread evenly over the
/// corpus. Returns the touched file names.
pub fn mutate_corpus(corpus_dir: &Path, manifest: &[ManifestEntry], count: usize, tag: u64) -> Result<Vec<String>> {
    if count > manifest.len() {
        return Err(Error::InvalidOption(format!(
            "cannot mutate {count} of {} files",
            manifest.len()
        )));
    }
    let mut touched = Vec::with_capacity(count);
    for i in 0..count {
        let entry = &manifest[i * manifest.len() / count];
        let path = corpus_dir.join(&entry.path);
        let mut text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        text.push_str(&format!("\nRevision {tag} appended to the record.\n"));
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        touched.push(entry.path.clone());
    }
    Ok(touched)
}

pub fn manifest_paths(corpus_dir: &Path, manifest: &[ManifestEntry]) -> Vec<PathBuf> {
    manifest.iter().map(|e| corpus_dir.join(&e.path)).collect()
}
