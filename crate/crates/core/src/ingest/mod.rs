//! Modality detection, extraction, normalization and incremental sync.

mod extract;
mod modality;
mod normalize;
mod signature;
mod sync;
mod watch;

pub use extract::{
    extract_bytes, extract_text, segment_text, serialize_sheets, serialize_tabular_row, ExtractConfig,
    ExtractedText, Extractor, ExtractorRegistry, Sheet, DEFAULT_MAX_SEGMENT_CHARS,
};
pub use modality::{detect_modality, Modality, SNIFF_LEN};
pub use normalize::normalize_text;
pub use signature::{compute_file_signature, Signature};
pub use sync::{
    relative_source_path, sync_directory, FailedFile, SyncConfig, SyncReport, DEFAULT_MAX_FILE_BYTES,
};
pub use watch::{watch_directory, StopSignal, Watcher};
