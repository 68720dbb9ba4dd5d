use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Number of leading bytes inspected by [`detect_modality`].
pub const SNIFF_LEN: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    PlainText,
    Markdown,
    Json,
    Csv,
    TabularSpreadsheet,
    Pdf,
    Docx,
    Image,
    Unknown,
}

impl Modality {
    pub const ALL: [Modality; 9] = [
        Modality::PlainText,
        Modality::Markdown,
        Modality::Json,
        Modality::Csv,
        Modality::TabularSpreadsheet,
        Modality::Pdf,
        Modality::Docx,
        Modality::Image,
        Modality::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::PlainText => "plain_text",
            Modality::Markdown => "markdown",
            Modality::Json => "json",
            Modality::Csv => "csv",
            Modality::TabularSpreadsheet => "tabular_spreadsheet",
            Modality::Pdf => "pdf",
            Modality::Docx => "docx",
            Modality::Image => "image",
            Modality::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Modality::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown modality {s:?}"))
    }
}

/// Classifies a file from its leading bytes. The extension only breaks ties
/// between formats that share a signature (zip containers, UTF-8 text).
pub fn detect_modality(prefix: &[u8], extension: &str) -> Modality {
    let prefix = &prefix[..prefix.len().min(SNIFF_LEN)];
    let ext = extension.trim_start_matches('.').to_ascii_lowercase();

    if prefix.starts_with(b"%PDF") {
        return Modality::Pdf;
    }
    if prefix.starts_with(b"PK\x03\x04") {
        return match ext.as_str() {
            "docx" => Modality::Docx,
            "xlsx" => Modality::TabularSpreadsheet,
            _ => Modality::Unknown,
        };
    }
    if prefix.starts_with(b"\x89PNG") || prefix.starts_with(b"\xFF\xD8\xFF") || prefix.starts_with(b"GIF8") {
        return Modality::Image;
    }

    let Some(text) = utf8_prefix(prefix) else {
        return Modality::Unknown;
    };
    match ext.as_str() {
        "json" if matches!(text.trim_start().chars().next(), Some('{' | '[')) => Modality::Json,
        "csv" => Modality::Csv,
        "md" => Modality::Markdown,
        _ => Modality::PlainText,
    }
}

/// Decodes the prefix as UTF-8, tolerating a multi-byte sequence cut off by
/// the sniff window.
fn utf8_prefix(bytes: &[u8]) -> Option<&str> {
    match std::str::from_utf8(bytes) {
        Ok(s) => Some(s),
        Err(e) if e.error_len().is_none() && bytes.len() >= SNIFF_LEN => {
            std::str::from_utf8(&bytes[..e.valid_up_to()]).ok()
        }
        Err(_) => None,
    }
}
