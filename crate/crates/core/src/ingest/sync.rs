//! Hash-based incremental directory sync.
//!
//! Each pass scans the tree, hashes every candidate file and compares the
//! digest with the one stored for its relative path. Only mismatches go
//! through extraction, normalization, vectorization and commit, so a pass
//! over an unchanged tree performs no writes at all.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;
use std::time::Instant;

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;
use walkdir::WalkDir;

use super::{
    compute_file_signature, detect_modality, extract_bytes, ExtractConfig, ExtractorRegistry,
    Signature, SNIFF_LEN,
};
use crate::container::{Container, NewDocument};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_FILE_BYTES: u64 = 64 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct SyncConfig {
    /// Delete documents whose source file no longer exists under the root.
    pub prune: bool,
    /// When non-empty, only relative paths matching one of these are synced.
    pub include_globs: Vec<String>,
    pub exclude_globs: Vec<String>,
    pub include_hidden: bool,
    pub max_file_bytes: u64,
    pub extract: ExtractConfig,
    pub extractors: ExtractorRegistry,
}

impl Default for SyncConfig {
    fn default() -> Self {
        SyncConfig {
            prune: false,
            include_globs: Vec::new(),
            exclude_globs: Vec::new(),
            include_hidden: false,
            max_file_bytes: DEFAULT_MAX_FILE_BYTES,
            extract: ExtractConfig::default(),
            extractors: ExtractorRegistry::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedFile {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SyncReport {
    pub scanned: u64,
    pub added: u64,
    pub updated: u64,
    pub skipped: u64,
    pub removed: u64,
    pub failed: Vec<FailedFile>,
    /// Wall time of the pass in seconds, millisecond precision.
    pub elapsed: f64,
}

impl SyncReport {
    fn fail(&mut self, path: impl Into<String>, reason: impl ToString) {
        self.failed.push(FailedFile {
            path: path.into(),
            reason: reason.to_string(),
        });
    }
}

struct PathFilter {
    include: Option<GlobSet>,
    exclude: GlobSet,
}

impl PathFilter {
    fn new(config: &SyncConfig) -> Result<Self> {
        let build = |patterns: &[String]| -> Result<GlobSet> {
            let mut builder = GlobSetBuilder::new();
            for p in patterns {
                builder.add(Glob::new(p)?);
            }
            Ok(builder.build()?)
        };
        Ok(PathFilter {
            include: if config.include_globs.is_empty() {
                None
            } else {
                Some(build(&config.include_globs)?)
            },
            exclude: build(&config.exclude_globs)?,
        })
    }

    fn accepts(&self, relative: &str) -> bool {
        self.include.as_ref().is_none_or(|g| g.is_match(relative)) && !self.exclude.is_match(relative)
    }
}

/// `/`-separated, NFC-normalized path relative to the sync root.
pub fn relative_source_path(root: &Path, file: &Path) -> Option<String> {
    let rel = file.strip_prefix(root).ok()?;
    let parts: Vec<String> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().nfc().collect())
        .collect();
    if parts.is_empty() {
        None
    } else {
        Some(parts.join("/"))
    }
}

fn is_hidden(entry: &walkdir::DirEntry) -> bool {
    entry.depth() > 0 && entry.file_name().to_string_lossy().starts_with('.')
}

pub fn sync_directory(container: &mut Container, root: &Path, config: &SyncConfig) -> Result<SyncReport> {
    let started = Instant::now();
    let meta = std::fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        ));
    }
    std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let filter = PathFilter::new(config)?;
    let stored = container.signatures()?;

    let mut report = SyncReport::default();
    let mut seen: HashSet<String> = HashSet::new();

    let walker = WalkDir::new(root)
        .follow_links(false)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| config.include_hidden || !is_hidden(e));

    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let path = e
                    .path()
                    .and_then(|p| relative_source_path(root, p))
                    .unwrap_or_else(|| root.display().to_string());
                report.scanned += 1;
                report.fail(path, e);
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(relative) = relative_source_path(root, entry.path()) else {
            continue;
        };
        if !filter.accepts(&relative) {
            continue;
        }
        match entry.metadata() {
            Ok(m) if m.len() > config.max_file_bytes => continue,
            Ok(_) => {}
            Err(e) => {
                report.scanned += 1;
                report.fail(relative, e);
                continue;
            }
        }

        report.scanned += 1;
        seen.insert(relative.clone());
        let signature = match compute_file_signature(entry.path()) {
            Ok(s) => s,
            Err(e) => {
                report.fail(relative, e);
                continue;
            }
        };
        let previous = stored.get(&relative);
        if previous == Some(&signature) {
            report.skipped += 1;
            continue;
        }
        match ingest_file(container, entry.path(), &relative, config) {
            Ok(()) if previous.is_some() => report.updated += 1,
            Ok(()) => report.added += 1,
            Err(e) => report.fail(relative, e),
        }
    }

    if config.prune {
        let mut gone: Vec<&String> = stored
            .keys()
            .filter(|p| !seen.contains(*p) && !root.join(p.as_str()).is_file())
            .collect();
        gone.sort();
        for path in gone {
            if container.delete_document(path)? {
                report.removed += 1;
            }
        }
    }

    report.elapsed = (started.elapsed().as_secs_f64() * 1000.0).round() / 1000.0;
    Ok(report)
}

/// Extraction, normalization, vectorization and commit for one changed file.
fn ingest_file(container: &mut Container, path: &Path, relative: &str, config: &SyncConfig) -> Result<()> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let extension = path
        .extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase())
        .unwrap_or_default();
    let modality = detect_modality(&bytes[..bytes.len().min(SNIFF_LEN)], &extension);
    let extracted = extract_bytes(&bytes, modality, &config.extract, &config.extractors)?;
    let doc = NewDocument {
        source_path: relative.to_owned(),
        // Hash what was actually extracted, not what was scanned earlier.
        signature: Signature::of_bytes(&bytes),
        size_bytes: bytes.len() as u64,
        modality,
    };
    container.commit_document(&doc, &extracted.segments)?;
    Ok(())
}
