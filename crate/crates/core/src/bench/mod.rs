//! Synthetic corpus generation and the ingestion, recall and latency
//! experiments run against it.

mod corpus;
mod harness;
mod words;

pub use corpus::{
    doc_file_name, entity_code, generate_corpus, generate_document, manifest_paths, mutate_corpus, CorpusSpec,
    ManifestEntry, EXEMPLAR_DOC, EXEMPLAR_ENTITY,
};
pub use harness::{
    default_query_set, run_rq1, run_rq2, run_rq3, run_rq3_concurrent, BenchReport, Rq1Outcome, Rq2Outcome,
    Rq3Outcome,
};
pub use words::{business_words, technical_words, ENTITY_WORDS};
