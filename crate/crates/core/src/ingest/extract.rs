//! Per-modality text extraction and segmentation.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde_json::Value;

use super::normalize_text;
use super::Modality;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_SEGMENT_CHARS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractConfig {
    pub max_segment_chars: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            max_segment_chars: DEFAULT_MAX_SEGMENT_CHARS,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractedText {
    pub segments: Vec<String>,
    pub warnings: Vec<String>,
}

/// Pluggable extractor for formats the core does not parse itself
/// (PDF, DOCX, spreadsheets, OCR for images). Returns raw text; the caller
/// normalizes and segments it.
pub trait Extractor: Send + Sync {
    fn extract(&self, bytes: &[u8]) -> Result<String>;
}

impl<F> Extractor for F
where
    F: Fn(&[u8]) -> Result<String> + Send + Sync,
{
    fn extract(&self, bytes: &[u8]) -> Result<String> {
        self(bytes)
    }
}

#[derive(Clone, Default)]
pub struct ExtractorRegistry {
    plugins: HashMap<Modality, Arc<dyn Extractor>>,
}

impl ExtractorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `extractor` for `modality`, replacing any built-in handling.
    pub fn register(&mut self, modality: Modality, extractor: impl Extractor + 'static) -> &mut Self {
        self.plugins.insert(modality, Arc::new(extractor));
        self
    }

    pub fn get(&self, modality: Modality) -> Option<&dyn Extractor> {
        self.plugins.get(&modality).map(|e| e.as_ref())
    }
}

impl fmt::Debug for ExtractorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<_> = self.plugins.keys().map(|m| m.as_str()).collect();
        names.sort_unstable();
        f.debug_struct("ExtractorRegistry").field("plugins", &names).finish()
    }
}

pub fn extract_text(
    path: &Path,
    modality: Modality,
    config: &ExtractConfig,
    registry: &ExtractorRegistry,
) -> Result<ExtractedText> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    extract_bytes(&bytes, modality, config, registry)
}

/// Same as [`extract_text`] for bytes already in memory.
pub fn extract_bytes(
    bytes: &[u8],
    modality: Modality,
    config: &ExtractConfig,
    registry: &ExtractorRegistry,
) -> Result<ExtractedText> {
    if config.max_segment_chars == 0 {
        return Err(Error::InvalidOption("max_segment_chars must be positive".into()));
    }
    let max = config.max_segment_chars;
    if let Some(plugin) = registry.get(modality) {
        let raw = plugin.extract(bytes)?;
        return Ok(ExtractedText {
            segments: segment_text(&normalize_text(&raw), max),
            warnings: Vec::new(),
        });
    }

    match modality {
        Modality::PlainText | Modality::Markdown => {
            let (text, warnings) = decode_utf8(bytes);
            Ok(ExtractedText {
                segments: segment_text(&normalize_text(&text), max),
                warnings,
            })
        }
        Modality::Json => {
            let value: Value = serde_json::from_slice(bytes)
                .map_err(|e| Error::Malformed(format!("json: {e}")))?;
            let mut lines = Vec::new();
            flatten_json(&value, &mut String::new(), &mut lines);
            Ok(ExtractedText {
                segments: pack_lines(lines.iter().map(|l| normalize_text(l)), max),
                warnings: Vec::new(),
            })
        }
        Modality::Csv => Ok(ExtractedText {
            segments: pack_lines(csv_rows(bytes)?, max),
            warnings: Vec::new(),
        }),
        other @ (Modality::TabularSpreadsheet | Modality::Pdf | Modality::Docx | Modality::Image) => {
            Err(Error::NoExtractor(other.as_str()))
        }
        Modality::Unknown => Err(Error::NoExtractor("unknown")),
    }
}

fn decode_utf8(bytes: &[u8]) -> (String, Vec<String>) {
    match String::from_utf8_lossy(bytes) {
        std::borrow::Cow::Borrowed(s) => (s.to_owned(), Vec::new()),
        std::borrow::Cow::Owned(s) => (s, vec!["invalid UTF-8 replaced".to_owned()]),
    }
}

/// Flattens leaf values into `dotted.path: value` lines. Object keys come
/// out sorted, array elements by index.
fn flatten_json(value: &Value, prefix: &mut String, out: &mut Vec<String>) {
    let mut descend = |key: &str, child: &Value, prefix: &mut String| {
        let len = prefix.len();
        if !prefix.is_empty() {
            prefix.push('.');
        }
        prefix.push_str(key);
        flatten_json(child, prefix, out);
        prefix.truncate(len);
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                descend(k, v, prefix);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                descend(&i.to_string(), v, prefix);
            }
        }
        leaf => {
            let text = match leaf {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push(if prefix.is_empty() {
                text
            } else {
                format!("{prefix}: {text}")
            });
        }
    }
}

fn csv_rows(bytes: &[u8]) -> Result<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(bytes);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Malformed(format!("csv: {e}")))?
        .iter()
        .map(normalize_text)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Malformed(format!("csv: {e}")))?;
        let values: Vec<String> = record.iter().map(normalize_text).collect();
        let line = normalize_text(&serialize_tabular_row(&headers, &values));
        if !line.is_empty() {
            rows.push(line);
        }
    }
    Ok(rows)
}

/// `h1: v1; h2: v2; ...` with empty values left out. The row is truncated
/// or padded to the header length.
pub fn serialize_tabular_row<H: AsRef<str>, V: AsRef<str>>(headers: &[H], row: &[V]) -> String {
    headers
        .iter()
        .enumerate()
        .filter_map(|(i, header)| {
            let value = row.get(i).map(|v| v.as_ref().trim()).unwrap_or("");
            if value.is_empty() {
                return None;
            }
            let header = header.as_ref().trim();
            Some(if header.is_empty() {
                format!("column_{}: {value}", i + 1)
            } else {
                format!("{header}: {value}")
            })
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// One worksheet of a spreadsheet, as produced by a spreadsheet plugin.
#[derive(Debug, Clone, Default)]
pub struct Sheet {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Serializes sheets in order, each introduced by a `sheet: <name>` line.
/// Rows are separated by blank lines so each packs as its own paragraph.
pub fn serialize_sheets(sheets: &[Sheet]) -> String {
    let mut blocks = Vec::new();
    for sheet in sheets {
        blocks.push(format!("sheet: {}", sheet.name));
        blocks.extend(
            sheet
                .rows
                .iter()
                .map(|row| serialize_tabular_row(&sheet.headers, row))
                .filter(|line| !line.is_empty()),
        );
    }
    blocks.join("\n\n")
}

/// Splits normalized text on blank lines and greedily packs the paragraphs
/// into segments of at most `max_chars` characters.
pub fn segment_text(normalized: &str, max_chars: usize) -> Vec<String> {
    pack(normalized.split("\n\n"), "\n\n", max_chars)
}

fn pack_lines<I: IntoIterator<Item = String>>(lines: I, max_chars: usize) -> Vec<String> {
    let lines: Vec<String> = lines.into_iter().filter(|l| !l.is_empty()).collect();
    pack(lines.iter().map(String::as_str), "\n", max_chars)
}

fn pack<'a>(units: impl Iterator<Item = &'a str>, sep: &str, max_chars: usize) -> Vec<String> {
    let sep_chars = sep.chars().count();
    let mut segments = Vec::new();
    let mut current = String::new();
    let mut current_chars = 0usize;

    let mut flush = |current: &mut String, current_chars: &mut usize| {
        if !current.is_empty() {
            segments.push(std::mem::take(current));
        }
        *current_chars = 0;
    };

    for unit in units.map(str::trim).filter(|u| !u.is_empty()) {
        for piece in hard_split(unit, max_chars) {
            let piece_chars = piece.chars().count();
            if current_chars > 0 && current_chars + sep_chars + piece_chars > max_chars {
                flush(&mut current, &mut current_chars);
            }
            if current_chars > 0 {
                current.push_str(sep);
                current_chars += sep_chars;
            }
            current.push_str(piece);
            current_chars += piece_chars;
        }
    }
    flush(&mut current, &mut current_chars);
    segments
}

/// Cuts an oversize unit at the last whitespace before the limit, or at the
/// limit itself when there is none.
fn hard_split(mut text: &str, max_chars: usize) -> Vec<&str> {
    let mut pieces = Vec::new();
    loop {
        let Some((limit, next)) = text.char_indices().nth(max_chars) else {
            pieces.push(text);
            return pieces;
        };
        let window = &text[..limit];
        // Whitespace right at the limit is also a valid cut point.
        let cut = &text[..limit + next.len_utf8()];
        let (head, tail) = match cut.rfind(char::is_whitespace) {
            Some(ws) if !cut[..ws].trim_end().is_empty() => {
                let ws_len = cut[ws..].chars().next().map_or(1, char::len_utf8);
                (&cut[..ws], &text[ws + ws_len..])
            }
            _ => (window, &text[limit..]),
        };
        let head = head.trim_end();
        if !head.is_empty() {
            pieces.push(head);
        }
        text = tail.trim_start();
        if text.is_empty() {
            return pieces;
        }
    }
}
