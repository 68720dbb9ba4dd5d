//! Tokenization, sublinear TF / IDF weighting and the sparse vector format.
//!
//! Stored vectors carry tf weights only (`1 + ln f`). IDF depends on the
//! corpus-wide segment count and document frequencies, so it is applied at
//! query time from the vocabulary counters.

mod postings;

use std::collections::{BTreeMap, HashMap};

pub use postings::IndexDelta;
pub(crate) use postings::{apply_index_delta, TxVocabulary};

use crate::error::{Error, Result};

pub type TermId = u32;

/// Per-character simple lowercase mapping.
///
/// Characters whose lowercase form expands to more than one code point are
/// kept unchanged, so the output always has the same number of chars as the
/// input. Snippet extraction relies on that.
pub fn fold_case(text: &str) -> String {
    text.chars().map(fold_char).collect()
}

/// Single-character form of [`fold_case`].
pub fn fold_char(c: char) -> char {
    if c.is_ascii() {
        return c.to_ascii_lowercase();
    }
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    tokens: Vec<String>,
}

impl TokenStream {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenStream {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenStream {
            tokens: iter.into_iter().map(Into::into).collect(),
        }
    }
}

/// Splits text into lowercase tokens: maximal runs of Unicode letters or
/// digits. Everything else, including `_`, `-` and `.`, separates tokens.
pub fn tokenize(text: &str) -> TokenStream {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.push(fold_char(c));
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenStream { tokens }
}

/// `1 + ln(f)`. Absent terms never get here, so a zero count is a bug.
pub fn sublinear_tf(raw_count: u32) -> f64 {
    assert!(raw_count >= 1, "sublinear_tf called with a zero count");
    1.0 + f64::from(raw_count).ln()
}

/// `ln(N / (1 + df)) + 1`, with N the number of stored segments.
pub fn idf(total_segments: u64, document_frequency: u64) -> f64 {
    assert!(
        document_frequency >= 1 && document_frequency <= total_segments,
        "idf contract violated: N={total_segments}, df={document_frequency}"
    );
    (total_segments as f64 / (1.0 + document_frequency as f64)).ln() + 1.0
}

/// Sorted `(term_id, weight)` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(TermId, f64)>,
}

impl SparseVector {
    /// Builds a vector from arbitrary pairs, sorting by term id.
    /// Duplicate ids or non-positive weights are rejected.
    pub fn new(mut entries: Vec<(TermId, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(t, _)| t);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Constraint("duplicate term id in sparse vector".into()));
        }
        if let Some(&(t, w)) = entries.iter().find(|&&(_, w)| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Constraint(format!(
                "non-positive weight {w} for term {t}"
            )));
        }
        Ok(SparseVector { entries })
    }

    /// tf-weighted vector from raw counts.
    pub fn from_counts(counts: &BTreeMap<TermId, u32>) -> Self {
        SparseVector {
            entries: counts
                .iter()
                .map(|(&t, &f)| (t, sublinear_tf(f)))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(TermId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn term_ids(&self) -> impl Iterator<Item = TermId> + '_ {
        self.entries.iter().map(|&(t, _)| t)
    }

    pub fn get(&self, term: TermId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&term, |&(t, _)| t)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1 * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Little-endian `u32` count, then `(u32 term_id, f64 weight)` pairs.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.entries.len() * 12);
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for &(t, w) in &self.entries {
            out.extend_from_slice(&t.to_le_bytes());
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let malformed = |what: &str| Error::IndexInconsistency(format!("vector blob: {what}"));
        let count_bytes: [u8; 4] = bytes
            .get(..4)
            .and_then(|b| b.try_into().ok())
            .ok_or_else(|| malformed("missing count prefix"))?;
        let count = u32::from_le_bytes(count_bytes) as usize;
        if bytes.len() != 4 + count * 12 {
            return Err(malformed("length does not match count"));
        }
        let mut entries = Vec::with_capacity(count);
        for chunk in bytes[4..].chunks_exact(12) {
            let term = TermId::from_le_bytes(chunk[..4].try_into().unwrap());
            let weight = f64::from_le_bytes(chunk[4..].try_into().unwrap());
            entries.push((term, weight));
        }
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(malformed("term ids not strictly ascending"));
        }
        Ok(SparseVector { entries })
    }
}

/// Assigns stable ids to terms, registering unseen ones.
pub trait TermRegistry {
    fn term_id(&mut self, term: &str) -> Result<TermId>;
}

/// Registry kept entirely in memory. Useful for tests and offline vectorizing.
#[derive(Debug, Default, Clone)]
pub struct MemoryVocabulary {
    ids: HashMap<String, TermId>,
    next: TermId,
}

impl MemoryVocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

impl TermRegistry for MemoryVocabulary {
    fn term_id(&mut self, term: &str) -> Result<TermId> {
        if let Some(&id) = self.ids.get(term) {
            return Ok(id);
        }
        self.next += 1;
        self.ids.insert(term.to_owned(), self.next);
        Ok(self.next)
    }
}

/// Raw term counts keyed by registered term id.
pub fn count_terms<R: TermRegistry + ?Sized>(
    tokens: &TokenStream,
    registry: &mut R,
) -> Result<BTreeMap<TermId, u32>> {
    let mut by_text: HashMap<&str, u32> = HashMap::new();
    for token in tokens.iter() {
        *by_text.entry(token).or_insert(0) += 1;
    }
    // Register in first-occurrence order so id assignment is deterministic.
    let mut counts = BTreeMap::new();
    for token in tokens.iter() {
        if let Some(f) = by_text.remove(token) {
            counts.insert(registry.term_id(token)?, f);
        }
    }
    Ok(counts)
}

pub fn build_document_vector<R: TermRegistry + ?Sized>(
    tokens: &TokenStream,
    registry: &mut R,
) -> Result<SparseVector> {
    Ok(SparseVector::from_counts(&count_terms(tokens, registry)?))
}

/// Corpus statistics needed to weight terms: segment count and per-term df.
#[derive(Debug, Clone, Default)]
pub struct IdfTable {
    pub total_segments: u64,
    pub document_frequency: HashMap<TermId, u64>,
}

impl IdfTable {
    pub fn idf(&self, term: TermId) -> Option<f64> {
        self.document_frequency
            .get(&term)
            .map(|&df| idf(self.total_segments, df))
    }
}

/// Euclidean norm of the tf·idf weighted vector. `None` for an empty vector,
/// which cannot take part in cosine ranking.
pub fn weighted_norm(vector: &SparseVector, idf_table: &IdfTable) -> Result<Option<f64>> {
    if vector.is_empty() {
        return Ok(None);
    }
    let mut sum = 0.0;
    for &(term, tf) in vector.entries() {
        let w = tf * idf_table
            .idf(term)
            .ok_or_else(|| Error::IndexInconsistency(format!("term {term} missing from vocabulary")))?;
        sum += w * w;
    }
    Ok(Some(sum.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(v: &[&str]) -> TokenStream {
        v.iter().copied().collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Hello, World!"), toks(&["hello", "world"]));
        assert_eq!(
            tokenize("UNIQUE_INVOICE_CODE_XYZ_999"),
            toks(&["unique", "invoice", "code", "xyz", "999"])
        );
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("a-b.c 7"), toks(&["a", "b", "c", "7"]));
        assert_eq!(tokenize("Ünïcode ΣΟΦΙΑ"), toks(&["ünïcode", "σοφια"]));
    }

    #[test]
    fn fold_case_preserves_char_count() {
        let s = "İstanbul ÀÉÎ ẞ";
        assert_eq!(fold_case(s).chars().count(), s.chars().count());
        assert_eq!(fold_case("INV-2024"), "inv-2024");
    }

    // Expected values computed with mpmath at 40 digits, rounded to f64.
    #[test]
    fn sublinear_tf_values() {
        assert_eq!(sublinear_tf(1), 1.0);
        assert!((sublinear_tf(10) - 3.302585092994046).abs() < 1e-12);
        assert!((sublinear_tf(2) - 1.6931471805599454).abs() < 1e-12);
    }

    #[test]
    #[should_panic]
    fn sublinear_tf_rejects_zero() {
        sublinear_tf(0);
    }

    #[test]
    fn idf_values() {
        assert!((idf(10, 9) - 1.0).abs() < 1e-12);
        assert!((idf(100, 9) - 3.302585092994046).abs() < 1e-12);
        assert!((idf(1, 1) - 0.3068528194400547).abs() < 1e-12);
    }

    #[test]
    #[should_panic]
    fn idf_rejects_df_above_n() {
        idf(3, 4);
    }

    #[test]
    fn document_vector_counts_terms() {
        let mut vocab = MemoryVocabulary::new();
        let v = build_document_vector(&toks(&["a", "b", "a"]), &mut vocab).unwrap();
        let a = vocab.lookup("a").unwrap();
        let b = vocab.lookup("b").unwrap();
        assert!((v.get(a).unwrap() - 1.6931471805599454).abs() < 1e-12);
        assert_eq!(v.get(b), Some(1.0));

        let single = build_document_vector(&toks(&["x"]), &mut vocab).unwrap();
        assert_eq!(single.entries(), &[(vocab.lookup("x").unwrap(), 1.0)]);

        let empty = build_document_vector(&TokenStream::default(), &mut vocab).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn weighted_norm_examples() {
        let table = IdfTable {
            total_segments: 10,
            document_frequency: [(1, 9), (2, 9)].into_iter().collect(),
        };
        let one = SparseVector::new(vec![(1, 1.0)]).unwrap();
        assert!((weighted_norm(&one, &table).unwrap().unwrap() - 1.0).abs() < 1e-12);
        let v = SparseVector::new(vec![(1, 3.0), (2, 4.0)]).unwrap();
        assert!((weighted_norm(&v, &table).unwrap().unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(weighted_norm(&SparseVector::default(), &table).unwrap(), None);
    }

    #[test]
    fn decode_rejects_bad_blobs() {
        assert!(SparseVector::decode(&[1, 0]).is_err());
        assert!(SparseVector::decode(&[1, 0, 0, 0]).is_err());
        let mut blob = SparseVector::new(vec![(1, 1.0), (2, 2.0)]).unwrap().encode();
        blob[4..8].copy_from_slice(&5u32.to_le_bytes());
        assert!(SparseVector::decode(&blob).is_err());
    }

    #[test]
    fn new_rejects_duplicates_and_bad_weights() {
        assert!(SparseVector::new(vec![(1, 1.0), (1, 2.0)]).is_err());
        assert!(SparseVector::new(vec![(1, 0.0)]).is_err());
        assert!(SparseVector::new(vec![(1, f64::NAN)]).is_err());
    }

    proptest! {
        #[test]
        fn vector_encoding_round_trips(pairs in proptest::collection::btree_map(any::<u32>(), 1e-6f64..1e6, 0..64)) {
            let v = SparseVector::new(pairs.into_iter().collect()).unwrap();
            prop_assert_eq!(SparseVector::decode(&v.encode()).unwrap(), v);
        }

        #[test]
        fn vector_is_bag_of_words(words in proptest::collection::vec("[a-e]{1,3}", 0..40), seed in any::<u64>()) {
            let mut shuffled = words.clone();
            // Deterministic permutation derived from the seed.
            let n = shuffled.len();
            if n > 1 {
                let mut s = seed;
                for i in (1..n).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    shuffled.swap(i, (s >> 33) as usize % (i + 1));
                }
            }
            let mut vocab = MemoryVocabulary::new();
            for w in &words { vocab.term_id(w).unwrap(); }
            let a = build_document_vector(&words.iter().map(String::as_str).collect(), &mut vocab).unwrap();
            let b = build_document_vector(&shuffled.iter().map(String::as_str).collect(), &mut vocab).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn tf_is_monotone(f1 in 1u32..100_000, delta in 1u32..1000) {
            prop_assert!(sublinear_tf(f1) < sublinear_tf(f1 + delta));
        }

        #[test]
        fn idf_positive_and_decreasing(n in 1u64..1_000_000, a in 1u64..1_000_000, b in 1u64..1_000_000) {
            let (d1, d2) = (a.min(n), b.min(n));
            prop_assert!(idf(n, d1) > 0.0);
            if d1 < d2 {
                prop_assert!(idf(n, d1) > idf(n, d2));
            }
        }

        #[test]
        fn self_cosine_is_one(weights in proptest::collection::vec(1.0f64..5.0, 1..30), dfs in proptest::collection::vec(1u64..50, 30)) {
            let v = SparseVector::new(weights.iter().enumerate().map(|(i, &w)| (i as u32, w)).collect()).unwrap();
            let table = IdfTable {
                total_segments: 50,
                document_frequency: (0..30u32).map(|i| (i, dfs[i as usize])).collect(),
            };
            let norm = weighted_norm(&v, &table).unwrap().unwrap();
            let weighted: Vec<f64> = v.entries().iter().map(|&(t, w)| w * table.idf(t).unwrap() / norm).collect();
            let cos: f64 = weighted.iter().map(|w| w * w).sum();
            prop_assert!((cos - 1.0).abs() < 1e-12);
        }
    }
}
