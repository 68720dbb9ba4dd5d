//! Inverted index maintenance (posting lists and document frequencies).

use std::collections::BTreeMap;

use rusqlite::{params, OptionalExtension};

use super::{TermId, TermRegistry};
use crate::container::{RegionWriter, SegmentId};
use crate::error::{Error, Result};

/// Posting changes for one transaction.
#[derive(Debug, Default)]
pub struct IndexDelta {
    /// New segments with their raw term counts.
    pub added: Vec<(SegmentId, BTreeMap<TermId, u32>)>,
    /// Removed segments with the term ids of their stored vectors.
    pub removed: Vec<(SegmentId, Vec<TermId>)>,
}

/// Applies posting inserts/removals and the matching df updates. Terms whose
/// df drops to zero are evicted from the vocabulary. Must run inside the
/// commit transaction; any inconsistency aborts it.
pub(crate) fn apply_index_delta(writer: &mut RegionWriter<'_>, delta: &IndexDelta) -> Result<()> {
    let mut df_change: BTreeMap<TermId, i64> = BTreeMap::new();

    for (segment, terms) in &delta.removed {
        for &term in terms {
            let n = writer.execute(
                "DELETE FROM postings WHERE term_id = ?1 AND segment_id = ?2",
                params![term, segment],
            )?;
            if n != 1 {
                return Err(Error::IndexInconsistency(format!(
                    "no posting for term {term} in segment {segment}"
                )));
            }
            *df_change.entry(term).or_default() -= 1;
        }
    }

    for (segment, counts) in &delta.added {
        for (&term, &count) in counts {
            writer.execute(
                "INSERT INTO postings (term_id, segment_id, count) VALUES (?1, ?2, ?3)",
                params![term, segment, count],
            )?;
            *df_change.entry(term).or_default() += 1;
        }
    }

    for (term, change) in df_change {
        if change == 0 {
            continue;
        }
        let current: i64 = writer
            .conn()
            .prepare_cached("SELECT df FROM vocab WHERE term_id = ?1")?
            .query_row([term], |r| r.get(0))
            .optional()?
            .ok_or_else(|| Error::IndexInconsistency(format!("term {term} not in vocabulary")))?;
        let updated = current + change;
        if updated < 0 {
            return Err(Error::IndexInconsistency(format!(
                "negative df for term {term}"
            )));
        }
        if updated == 0 {
            writer.execute("DELETE FROM vocab WHERE term_id = ?1", [term])?;
        } else {
            writer.execute(
                "UPDATE vocab SET df = ?1 WHERE term_id = ?2",
                params![updated, term],
            )?;
        }
    }

    writer.execute(
        "UPDATE meta SET value = CAST(value AS INTEGER) + 1 WHERE key = 'kf.generation'",
        [],
    )?;
    Ok(())
}

/// Vocabulary registry backed by the open commit transaction. New terms are
/// inserted with df 0 and receive their count from [`apply_index_delta`].
pub(crate) struct TxVocabulary<'w, 'a> {
    pub(crate) writer: &'w mut RegionWriter<'a>,
}

impl TermRegistry for TxVocabulary<'_, '_> {
    fn term_id(&mut self, term: &str) -> Result<TermId> {
        let existing: Option<i64> = self
            .writer
            .conn()
            .prepare_cached("SELECT term_id FROM vocab WHERE term = ?1")?
            .query_row([term], |r| r.get(0))
            .optional()?;
        let id = match existing {
            Some(id) => id,
            None => self
                .writer
                .insert("INSERT INTO vocab (term, df) VALUES (?1, 0)", [term])?,
        };
        TermId::try_from(id)
            .map_err(|_| Error::IndexInconsistency(format!("term id {id} exceeds u32 range")))
    }
}
