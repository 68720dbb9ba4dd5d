//! The single-file knowledge container.
//!
//! Four logical regions live in one SQLite file running in WAL mode:
//!
//! * metadata (`documents`): provenance rows with the SHA-256 signature,
//! * content (`segments`): normalized text segments,
//! * vectors (`vectors`): tf-weighted sparse vectors, one per segment,
//! * index (`vocab`, `postings`): term dictionary with df and posting lists.
//!
//! Every mutation runs in one immediate transaction, so readers on other
//! handles only ever observe whole documents. WAL gives one writer and any
//! number of concurrent snapshot readers.

mod writer;

use std::cell::{RefCell, RefMut};
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use rusqlite::{params, Connection, OpenFlags, OptionalExtension, TransactionBehavior};
use serde::Serialize;

pub use writer::{FaultAction, FaultPlan};
pub(crate) use writer::{FaultState, RegionWriter};

use crate::error::{Error, Result};
use crate::ingest::{Modality, Signature};
use crate::textindex::{
    apply_index_delta, count_terms, sublinear_tf, tokenize, IdfTable, IndexDelta, SparseVector,
    TermId, TxVocabulary,
};

pub type DocId = i64;
pub type SegmentId = i64;

/// Current on-disk format version, stored in the `kf.format_version` meta row.
pub const FORMAT_VERSION: u32 = 1;

const SQLITE_MAGIC: &[u8; 16] = b"SQLite format 3\0";
const BUSY_TIMEOUT: Duration = Duration::from_secs(10);

const SCHEMA: &str = "
CREATE TABLE meta (
    key   TEXT PRIMARY KEY,
    value NOT NULL
) WITHOUT ROWID;

CREATE TABLE documents (
    doc_id      INTEGER PRIMARY KEY AUTOINCREMENT,
    source_path TEXT NOT NULL UNIQUE,
    signature   BLOB NOT NULL CHECK (length(signature) = 32),
    ingested_at INTEGER NOT NULL,
    size_bytes  INTEGER NOT NULL CHECK (size_bytes >= 0),
    modality    TEXT NOT NULL
);

CREATE TABLE segments (
    segment_id INTEGER PRIMARY KEY AUTOINCREMENT,
    doc_id     INTEGER NOT NULL REFERENCES documents (doc_id) DEFERRABLE INITIALLY DEFERRED,
    ordinal    INTEGER NOT NULL CHECK (ordinal >= 0),
    content    TEXT NOT NULL CHECK (length(content) > 0),
    char_count INTEGER NOT NULL CHECK (char_count > 0),
    UNIQUE (doc_id, ordinal)
);

CREATE TABLE vectors (
    segment_id INTEGER PRIMARY KEY REFERENCES segments (segment_id) DEFERRABLE INITIALLY DEFERRED,
    data       BLOB NOT NULL
);

CREATE TABLE vocab (
    term_id INTEGER PRIMARY KEY AUTOINCREMENT,
    term    TEXT NOT NULL UNIQUE,
    df      INTEGER NOT NULL CHECK (df >= 0)
);

CREATE TABLE postings (
    term_id    INTEGER NOT NULL REFERENCES vocab (term_id) DEFERRABLE INITIALLY DEFERRED,
    segment_id INTEGER NOT NULL,
    count      INTEGER NOT NULL CHECK (count >= 1),
    PRIMARY KEY (term_id, segment_id)
) WITHOUT ROWID;
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ReadOnly,
    ReadWrite,
}

/// Provenance row in the metadata region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentRecord {
    pub doc_id: DocId,
    pub source_path: String,
    pub signature: Signature,
    /// UTC epoch seconds.
    pub ingested_at: i64,
    pub size_bytes: u64,
    pub modality: Modality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentRecord {
    pub segment_id: SegmentId,
    pub doc_id: DocId,
    pub ordinal: u32,
    pub content: String,
    pub char_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub term_id: TermId,
    pub term: String,
    pub document_frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostingList {
    pub term_id: TermId,
    /// `(segment_id, raw count)`, ascending by segment.
    pub postings: Vec<(SegmentId, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub documents: u64,
    pub segments: u64,
    pub terms: u64,
    pub file_bytes: u64,
}

/// Document metadata supplied by the caller of [`Container::commit_document`].
#[derive(Debug, Clone)]
pub struct NewDocument {
    pub source_path: String,
    pub signature: Signature,
    pub size_bytes: u64,
    pub modality: Modality,
}

/// Query-side view of the index at one generation. Reloaded whenever the
/// stored generation counter moves.
#[derive(Debug, Default)]
pub(crate) struct IndexCache {
    generation: Option<i64>,
    pub(crate) idf: IdfTable,
    pub(crate) terms: HashMap<String, TermId>,
    pub(crate) norms: HashMap<SegmentId, Option<f64>>,
}

impl IndexCache {
    pub(crate) fn generation(&self) -> i64 {
        self.generation.unwrap_or_default()
    }
}

/// Open handle on a container file.
pub struct Container {
    path: PathBuf,
    mode: Mode,
    format_version: u32,
    conn: Connection,
    faults: FaultState,
    commits: u64,
    cache: RefCell<IndexCache>,
}

impl std::fmt::Debug for Container {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Container")
            .field("path", &self.path)
            .field("mode", &self.mode)
            .field("format_version", &self.format_version)
            .finish_non_exhaustive()
    }
}

impl Container {
    /// Creates an empty container. Refuses to touch a non-empty file.
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        match fs::metadata(path) {
            Ok(meta) if meta.len() == 0 => {}
            Ok(_) => {
                return Err(match probe(path) {
                    Ok(_) | Err(Error::UnsupportedVersion { .. }) => {
                        Error::AlreadyExists(path.to_path_buf())
                    }
                    Err(_) => Error::ForeignFile(path.to_path_buf()),
                })
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(Error::io(path, e)),
        }

        let mut conn = open_connection(path, Mode::ReadWrite)?;
        let tx = conn.transaction_with_behavior(TransactionBehavior::Exclusive)?;
        tx.execute_batch(SCHEMA)?;
        tx.execute(
            "INSERT INTO meta (key, value) VALUES ('kf.format_version', ?1), ('kf.generation', 0)",
            [FORMAT_VERSION],
        )?;
        tx.commit()?;
        Self::from_connection(path, Mode::ReadWrite, FORMAT_VERSION, conn)
    }

    pub fn open(path: impl AsRef<Path>, mode: Mode) -> Result<Self> {
        let path = path.as_ref();
        let version = probe(path)?;
        let conn = open_connection(path, mode)?;
        Self::from_connection(path, mode, version, conn)
    }

    fn from_connection(path: &Path, mode: Mode, format_version: u32, conn: Connection) -> Result<Self> {
        if mode == Mode::ReadWrite {
            conn.pragma_update(None, "journal_mode", "WAL")?;
            conn.pragma_update(None, "synchronous", "NORMAL")?;
        }
        conn.pragma_update(None, "foreign_keys", "ON")?;
        Ok(Container {
            path: path.to_path_buf(),
            mode,
            format_version,
            conn,
            faults: FaultState::default(),
            commits: 0,
            cache: RefCell::default(),
        })
    }

    /// Closes the handle, checkpointing the journal when this is the last
    /// writer.
    pub fn close(self) -> Result<()> {
        self.conn.close().map_err(|(_, e)| Error::Storage(e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn format_version(&self) -> u32 {
        self.format_version
    }

    /// Successful `commit_document` calls made through this handle.
    pub fn commit_count(&self) -> u64 {
        self.commits
    }

    /// Arms (or clears) fault injection for subsequent write transactions.
    pub fn set_fault_plan(&mut self, plan: Option<FaultPlan>) {
        self.faults = FaultState::new(plan);
    }

    fn ensure_writable(&self) -> Result<()> {
        match self.mode {
            Mode::ReadWrite => Ok(()),
            Mode::ReadOnly => Err(Error::ReadOnly),
        }
    }

    /// Atomically stores a document with its segments, vectors and postings,
    /// replacing any previous document with the same source path.
    pub fn commit_document(&mut self, doc: &NewDocument, segments: &[String]) -> Result<DocId> {
        self.ensure_writable()?;
        if doc.source_path.is_empty() {
            return Err(Error::Constraint("empty source path".into()));
        }
        if let Some(i) = segments.iter().position(|s| s.is_empty()) {
            return Err(Error::Constraint(format!("segment {i} is empty")));
        }
        let size = i64::try_from(doc.size_bytes)
            .map_err(|_| Error::Constraint("size_bytes out of range".into()))?;

        let tx = self
            .conn
            .transaction_with_behavior(TransactionBehavior::Immediate)?;
        self.faults.reset();
        let mut writer = RegionWriter::new(&tx, &mut self.faults);
        let mut delta = IndexDelta::default();

        if let Some(old) = find_doc_id(writer.conn(), &doc.source_path)? {
            remove_document_rows(&mut writer, old, &mut delta)?;
        }

        let doc_id = writer.insert(
            "INSERT INTO documents (source_path, signature, ingested_at, size_bytes, modality)
             VALUES (?1, ?2, ?3, ?4, ?5)",
            params![
                doc.source_path,
                &doc.signature.0[..],
                now_epoch_seconds(),
                size,
                doc.modality.as_str()
            ],
        )?;

        for (ordinal, content) in segments.iter().enumerate() {
            let segment_id = writer.insert(
                "INSERT INTO segments (doc_id, ordinal, content, char_count) VALUES (?1, ?2, ?3, ?4)",
                params![doc_id, ordinal as i64, content, content.chars().count() as i64],
            )?;
            let counts = count_terms(&tokenize(content), &mut TxVocabulary { writer: &mut writer })?;
            writer.execute(
                "INSERT INTO vectors (segment_id, data) VALUES (?1, ?2)",
                params![segment_id, SparseVector::from_counts(&counts).encode()],
            )?;
            delta.added.push((segment_id, counts));
        }

        apply_index_delta(&mut writer, &delta)?;
        writer.before_commit()?;
        tx.commit()?;
        self.commits += 1;
        Ok(doc_id)
    }

    /// Removes a document and everything derived from it. Returns false when
    /// no document has that path.
    pub fn delete_document(&mut self, source_path: &str) -> Result<bool> {
        self.ensure_writable()?;
        let tx = self
            .conn
            .transaction_with_behavior(TransactionBehavior::Immediate)?;
        self.faults.reset();
        let mut writer = RegionWriter::new(&tx, &mut self.faults);
        let Some(doc_id) = find_doc_id(writer.conn(), source_path)? else {
            return Ok(false);
        };
        let mut delta = IndexDelta::default();
        remove_document_rows(&mut writer, doc_id, &mut delta)?;
        apply_index_delta(&mut writer, &delta)?;
        writer.before_commit()?;
        tx.commit()?;
        Ok(true)
    }

    /// Runs `f` inside a read transaction so every query in it sees one
    /// committed snapshot.
    pub(crate) fn read<T>(&self, f: impl FnOnce(&Connection) -> Result<T>) -> Result<T> {
        let tx = self.conn.unchecked_transaction()?;
        let out = f(&tx)?;
        tx.finish()?;
        Ok(out)
    }

    /// Index cache synchronized with the snapshot visible on `conn`.
    pub(crate) fn index_cache(&self, conn: &Connection) -> Result<RefMut<'_, IndexCache>> {
        let generation = load_generation(conn)?;
        let mut cache = self.cache.borrow_mut();
        if cache.generation != Some(generation) {
            let mut fresh = IndexCache {
                generation: Some(generation),
                ..IndexCache::default()
            };
            fresh.idf.total_segments = count(conn, "SELECT COUNT(*) FROM segments")?;
            let mut stmt = conn.prepare_cached("SELECT term_id, term, df FROM vocab")?;
            let mut rows = stmt.query([])?;
            while let Some(row) = rows.next()? {
                let id: TermId = row.get(0)?;
                fresh.terms.insert(row.get(1)?, id);
                fresh.idf.document_frequency.insert(id, row.get(2)?);
            }
            *cache = fresh;
        }
        Ok(cache)
    }

    pub fn stats(&self) -> Result<Stats> {
        self.read(|conn| {
            let page_count: u64 = conn.query_row("PRAGMA page_count", [], |r| r.get(0))?;
            let page_size: u64 = conn.query_row("PRAGMA page_size", [], |r| r.get(0))?;
            Ok(Stats {
                documents: count(conn, "SELECT COUNT(*) FROM documents")?,
                segments: count(conn, "SELECT COUNT(*) FROM segments")?,
                terms: count(conn, "SELECT COUNT(*) FROM vocab")?,
                file_bytes: page_count * page_size,
            })
        })
    }

    /// Index generation; bumps on every change to df or segment count.
    pub fn generation(&self) -> Result<i64> {
        self.read(load_generation)
    }

    pub fn document(&self, source_path: &str) -> Result<Option<DocumentRecord>> {
        self.read(|conn| {
            conn.prepare_cached(
                "SELECT doc_id, source_path, signature, ingested_at, size_bytes, modality
                 FROM documents WHERE source_path = ?1",
            )?
            .query_row([source_path], document_from_row)
            .optional()?
            .transpose()
        })
    }

    pub fn documents(&self) -> Result<Vec<DocumentRecord>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached(
                "SELECT doc_id, source_path, signature, ingested_at, size_bytes, modality
                 FROM documents ORDER BY doc_id",
            )?;
            let rows = stmt.query_map([], document_from_row)?;
            rows.map(|r| r?).collect()
        })
    }

    /// Stored signature per source path, for change detection.
    pub fn signatures(&self) -> Result<HashMap<String, Signature>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached("SELECT source_path, signature FROM documents")?;
            let mut rows = stmt.query([])?;
            let mut out = HashMap::new();
            while let Some(row) = rows.next()? {
                let blob: Vec<u8> = row.get(1)?;
                let sig = Signature::from_slice(&blob)
                    .ok_or_else(|| Error::IndexInconsistency("signature is not 32 bytes".into()))?;
                out.insert(row.get(0)?, sig);
            }
            Ok(out)
        })
    }

    pub fn segments(&self, doc_id: DocId) -> Result<Vec<SegmentRecord>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached(
                "SELECT segment_id, doc_id, ordinal, content, char_count
                 FROM segments WHERE doc_id = ?1 ORDER BY ordinal",
            )?;
            let rows = stmt.query_map([doc_id], segment_from_row)?;
            Ok(rows.collect::<rusqlite::Result<_>>()?)
        })
    }

    pub fn all_segments(&self) -> Result<Vec<SegmentRecord>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached(
                "SELECT segment_id, doc_id, ordinal, content, char_count
                 FROM segments ORDER BY segment_id",
            )?;
            let rows = stmt.query_map([], segment_from_row)?;
            Ok(rows.collect::<rusqlite::Result<_>>()?)
        })
    }

    pub fn vector(&self, segment_id: SegmentId) -> Result<Option<SparseVector>> {
        self.read(|conn| load_vector(conn, segment_id))
    }

    pub fn vocabulary(&self) -> Result<Vec<VocabEntry>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached("SELECT term_id, term, df FROM vocab ORDER BY term_id")?;
            let rows = stmt.query_map([], |r| {
                Ok(VocabEntry {
                    term_id: r.get(0)?,
                    term: r.get(1)?,
                    document_frequency: r.get(2)?,
                })
            })?;
            Ok(rows.collect::<rusqlite::Result<_>>()?)
        })
    }

    pub fn posting_list(&self, term_id: TermId) -> Result<PostingList> {
        self.read(|conn| {
            Ok(PostingList {
                term_id,
                postings: load_postings(conn, term_id)?,
            })
        })
    }

    /// Full scan of the referential and counting invariants between regions.
    pub fn verify(&self) -> Result<()> {
        self.read(verify_snapshot)
    }
}

fn probe(path: &Path) -> Result<u32> {
    let mut header = [0u8; 16];
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    match file.read_exact(&mut header) {
        Ok(()) if &header == SQLITE_MAGIC => {}
        Ok(()) => return Err(Error::NotAContainer(path.to_path_buf())),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            return Err(Error::NotAContainer(path.to_path_buf()))
        }
        Err(e) => return Err(Error::io(path, e)),
    }
    drop(file);

    let conn = open_connection(path, Mode::ReadOnly)?;
    let version: Option<i64> = conn
        .query_row(
            "SELECT value FROM meta WHERE key = 'kf.format_version'",
            [],
            |r| r.get(0),
        )
        .optional()
        .unwrap_or(None);
    match version {
        Some(v) if v >= 1 && v <= i64::from(FORMAT_VERSION) => Ok(v as u32),
        Some(v) if v > i64::from(FORMAT_VERSION) => Err(Error::UnsupportedVersion {
            path: path.to_path_buf(),
            found: u32::try_from(v).unwrap_or(u32::MAX),
            supported: FORMAT_VERSION,
        }),
        _ => Err(Error::NotAContainer(path.to_path_buf())),
    }
}

fn open_connection(path: &Path, mode: Mode) -> Result<Connection> {
    let conn = match mode {
        // Read-only handles still open the file writable when they can, so
        // that the last handle to close checkpoints and removes the journal
        // files. Writes are refused by `query_only` and by `ensure_writable`.
        Mode::ReadOnly => match Connection::open_with_flags(
            path,
            OpenFlags::SQLITE_OPEN_READ_WRITE | OpenFlags::SQLITE_OPEN_NO_MUTEX,
        ) {
            Ok(conn) => {
                conn.pragma_update(None, "query_only", true)?;
                conn
            }
            Err(_) => Connection::open_with_flags(
                path,
                OpenFlags::SQLITE_OPEN_READ_ONLY | OpenFlags::SQLITE_OPEN_NO_MUTEX,
            )
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?,
        },
        Mode::ReadWrite => Connection::open_with_flags(
            path,
            OpenFlags::SQLITE_OPEN_READ_WRITE | OpenFlags::SQLITE_OPEN_CREATE | OpenFlags::SQLITE_OPEN_NO_MUTEX,
        )
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?,
    };
    conn.busy_timeout(BUSY_TIMEOUT)?;
    Ok(conn)
}

fn now_epoch_seconds() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or_default()
}

fn count(conn: &Connection, sql: &str) -> Result<u64> {
    Ok(conn.prepare_cached(sql)?.query_row([], |r| r.get(0))?)
}

fn load_generation(conn: &Connection) -> Result<i64> {
    Ok(conn
        .prepare_cached("SELECT value FROM meta WHERE key = 'kf.generation'")?
        .query_row([], |r| r.get(0))?)
}

fn find_doc_id(conn: &Connection, source_path: &str) -> Result<Option<DocId>> {
    Ok(conn
        .prepare_cached("SELECT doc_id FROM documents WHERE source_path = ?1")?
        .query_row([source_path], |r| r.get(0))
        .optional()?)
}

pub(crate) fn load_vector(conn: &Connection, segment_id: SegmentId) -> Result<Option<SparseVector>> {
    let blob: Option<Vec<u8>> = conn
        .prepare_cached("SELECT data FROM vectors WHERE segment_id = ?1")?
        .query_row([segment_id], |r| r.get(0))
        .optional()?;
    blob.map(|b| SparseVector::decode(&b)).transpose()
}

pub(crate) fn load_postings(conn: &Connection, term_id: TermId) -> Result<Vec<(SegmentId, u32)>> {
    let mut stmt = conn.prepare_cached(
        "SELECT segment_id, count FROM postings WHERE term_id = ?1 ORDER BY segment_id",
    )?;
    let rows = stmt.query_map([term_id], |r| Ok((r.get(0)?, r.get(1)?)))?;
    Ok(rows.collect::<rusqlite::Result<_>>()?)
}

fn document_from_row(row: &rusqlite::Row<'_>) -> rusqlite::Result<Result<DocumentRecord>> {
    let blob: Vec<u8> = row.get(2)?;
    let modality: String = row.get(5)?;
    let record = (|| {
        Ok(DocumentRecord {
            doc_id: row.get(0)?,
            source_path: row.get(1)?,
            signature: Signature::from_slice(&blob)
                .ok_or_else(|| Error::IndexInconsistency("signature is not 32 bytes".into()))?,
            ingested_at: row.get(3)?,
            size_bytes: row.get(4)?,
            modality: modality
                .parse()
                .map_err(Error::IndexInconsistency)?,
        })
    })();
    Ok(record)
}

fn segment_from_row(row: &rusqlite::Row<'_>) -> rusqlite::Result<SegmentRecord> {
    Ok(SegmentRecord {
        segment_id: row.get(0)?,
        doc_id: row.get(1)?,
        ordinal: row.get(2)?,
        content: row.get(3)?,
        char_count: row.get(4)?,
    })
}

/// Deletes the document row, its segments and vectors, and records the
/// posting removals in `delta`.
fn remove_document_rows(writer: &mut RegionWriter<'_>, doc_id: DocId, delta: &mut IndexDelta) -> Result<()> {
    let segment_ids: Vec<SegmentId> = {
        let mut stmt = writer
            .conn()
            .prepare_cached("SELECT segment_id FROM segments WHERE doc_id = ?1 ORDER BY segment_id")?;
        let rows = stmt.query_map([doc_id], |r| r.get(0))?;
        rows.collect::<rusqlite::Result<_>>()?
    };
    for segment_id in segment_ids {
        let vector = load_vector(writer.conn(), segment_id)?.ok_or_else(|| {
            Error::IndexInconsistency(format!("segment {segment_id} has no vector"))
        })?;
        delta.removed.push((segment_id, vector.term_ids().collect()));
        writer.execute("DELETE FROM vectors WHERE segment_id = ?1", [segment_id])?;
    }
    writer.execute("DELETE FROM segments WHERE doc_id = ?1", [doc_id])?;
    writer.execute("DELETE FROM documents WHERE doc_id = ?1", [doc_id])?;
    Ok(())
}

fn verify_snapshot(conn: &Connection) -> Result<()> {
    let fail = |msg: String| Err(Error::IndexInconsistency(msg));

    let orphans = count(
        conn,
        "SELECT COUNT(*) FROM segments s LEFT JOIN documents d ON d.doc_id = s.doc_id WHERE d.doc_id IS NULL",
    )?;
    if orphans > 0 {
        return fail(format!("{orphans} segments reference missing documents"));
    }
    let gaps = count(
        conn,
        "SELECT COUNT(*) FROM (SELECT doc_id FROM segments GROUP BY doc_id
         HAVING MIN(ordinal) != 0 OR MAX(ordinal) + 1 != COUNT(*))",
    )?;
    if gaps > 0 {
        return fail(format!("{gaps} documents have non-contiguous ordinals"));
    }
    let bad_counts = count(
        conn,
        "SELECT COUNT(*) FROM segments WHERE char_count != length(content) OR length(content) = 0",
    )?;
    if bad_counts > 0 {
        return fail(format!("{bad_counts} segments have a wrong char_count"));
    }
    let vectorless = count(
        conn,
        "SELECT COUNT(*) FROM segments s LEFT JOIN vectors v ON v.segment_id = s.segment_id WHERE v.segment_id IS NULL",
    )?;
    let dangling_vectors = count(
        conn,
        "SELECT COUNT(*) FROM vectors v LEFT JOIN segments s ON s.segment_id = v.segment_id WHERE s.segment_id IS NULL",
    )?;
    if vectorless > 0 || dangling_vectors > 0 {
        return fail(format!(
            "{vectorless} segments without vectors, {dangling_vectors} vectors without segments"
        ));
    }

    let mut postings: BTreeMap<(TermId, SegmentId), u32> = BTreeMap::new();
    {
        let mut stmt = conn.prepare("SELECT term_id, segment_id, count FROM postings")?;
        let mut rows = stmt.query([])?;
        while let Some(row) = rows.next()? {
            postings.insert((row.get(0)?, row.get(1)?), row.get(2)?);
        }
    }
    let mut vector_df: HashMap<TermId, u64> = HashMap::new();
    let mut vector_entries = 0usize;
    {
        let mut stmt = conn.prepare("SELECT segment_id, data FROM vectors")?;
        let mut rows = stmt.query([])?;
        while let Some(row) = rows.next()? {
            let segment: SegmentId = row.get(0)?;
            let vector = SparseVector::decode(&row.get::<_, Vec<u8>>(1)?)?;
            for &(term, weight) in vector.entries() {
                vector_entries += 1;
                *vector_df.entry(term).or_default() += 1;
                match postings.get(&(term, segment)) {
                    Some(&f) if sublinear_tf(f).to_bits() == weight.to_bits() => {}
                    Some(&f) => {
                        return fail(format!(
                            "segment {segment} term {term}: weight {weight} != tf({f})"
                        ))
                    }
                    None => return fail(format!("segment {segment} term {term}: no posting")),
                }
            }
        }
    }
    if vector_entries != postings.len() {
        return fail(format!(
            "{} postings but {vector_entries} vector entries",
            postings.len()
        ));
    }

    let mut stmt = conn.prepare("SELECT term_id, df FROM vocab")?;
    let mut rows = stmt.query([])?;
    let mut terms = 0usize;
    while let Some(row) = rows.next()? {
        terms += 1;
        let term: TermId = row.get(0)?;
        let df: u64 = row.get(1)?;
        let actual = vector_df.get(&term).copied().unwrap_or(0);
        if df == 0 || df != actual {
            return fail(format!("term {term}: df {df}, vectors containing it {actual}"));
        }
    }
    if terms != vector_df.len() {
        return fail(format!(
            "vectors use {} terms, vocabulary has {terms}",
            vector_df.len()
        ));
    }
    Ok(())
}
