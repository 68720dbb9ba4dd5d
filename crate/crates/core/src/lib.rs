//! Single-file knowledge container with incremental sync and hybrid
//! lexical retrieval.

pub mod bench;
pub mod container;
mod error;
pub mod ingest;
pub mod query;
pub mod textindex;

pub use container::{Container, Mode, Stats};
pub use error::{Error, Result};
pub use query::{search, SearchOptions, SearchResult};
