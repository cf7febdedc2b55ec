//! Co-occurrence extraction: mention streams to weighted edge lists.
//!
//! The sentence strategy counts each unordered character pair once per
//! sentence that mentions both. The window strategy counts mention-instance
//! pairs whose character offsets are within a fixed distance, never crossing
//! chapter borders.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::characters::MentionRecord;
use crate::corpus::TokenizedCorpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum CooccurrenceStrategy {
    Sentence {
        /// Count a pair once per sentence (false) or once per pair of
        /// mention instances (true).
        count_multiplicity: bool,
    },
    Window { window_chars: usize },
}

/// Weighted undirected edge list keyed by unordered character pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    /// `(u, v, weight)` with `u < v` lexicographically, sorted by `(u, v)`.
    pub entries: Vec<(String, String, u64)>,
    pub strategy: CooccurrenceStrategy,
}

impl EdgeList {
    fn from_counts(counts: BTreeMap<(String, String), u64>, strategy: CooccurrenceStrategy) -> Self {
        Self {
            entries: counts.into_iter().map(|((u, v), w)| (u, v, w)).collect(),
            strategy,
        }
    }

    pub fn weight(&self, a: &str, b: &str) -> u64 {
        let key = ordered(a, b);
        self.entries
            .iter()
            .find(|(u, v, _)| (u.as_str(), v.as_str()) == (key.0.as_str(), key.1.as_str()))
            .map_or(0, |(_, _, w)| *w)
    }

    pub fn total_weight(&self) -> u64 {
        self.entries.iter().map(|(_, _, w)| w).sum()
    }

    /// CSV rows `u,v,weight` with lexicographically ordered endpoints.
    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["u", "v", "weight"])?;
        for (u, v, weight) in &self.entries {
            w.write_record([u.as_str(), v.as_str(), &weight.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_csv<R: Read>(reader: R, strategy: CooccurrenceStrategy) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut counts = BTreeMap::new();
        for record in r.records() {
            let record = record?;
            let (u, v, w) = (
                record.get(0).unwrap_or_default(),
                record.get(1).unwrap_or_default(),
                record.get(2).unwrap_or_default(),
            );
            let weight: u64 = w.parse().map_err(|_| Error::MalformedInput {
                format: "edge CSV",
                detail: format!("bad weight '{w}'"),
            })?;
            if u == v {
                return Err(Error::SelfLoop(u.to_string()));
            }
            *counts.entry(ordered(u, v)).or_insert(0) += weight;
        }
        Ok(Self::from_counts(counts, strategy))
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Sentence-strategy co-occurrences.
///
/// Dialogue mentions are included; the dialogue exclusion applies only to
/// narrative charts.
pub fn sentence_cooccurrences(
    mentions: &[MentionRecord],
    _corpus: &TokenizedCorpus,
    count_multiplicity: bool,
) -> EdgeList {
    let mut by_sentence: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for m in mentions {
        by_sentence
            .entry(m.sentence_index)
            .or_default()
            .push(m.canonical_id.as_str());
    }
    let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
    for ids in by_sentence.values() {
        if count_multiplicity {
            for (i, a) in ids.iter().enumerate() {
                for b in &ids[i + 1..] {
                    if a != b {
                        *counts.entry(ordered(a, b)).or_insert(0) += 1;
                    }
                }
            }
        } else {
            let distinct: Vec<&str> = {
                let mut d: Vec<&str> = ids.to_vec();
                d.sort_unstable();
                d.dedup();
                d
            };
            for (i, a) in distinct.iter().enumerate() {
                for b in &distinct[i + 1..] {
                    *counts.entry(ordered(a, b)).or_insert(0) += 1;
                }
            }
        }
    }
    EdgeList::from_counts(
        counts,
        CooccurrenceStrategy::Sentence { count_multiplicity },
    )
}

/// Window-strategy co-occurrences over character offsets.
///
/// Two mention instances co-occur iff they sit in the same chapter and their
/// offsets differ by at most `window_chars`; each qualifying instance pair
/// contributes one to the unordered character-pair weight.
pub fn window_cooccurrences(
    mentions: &[MentionRecord],
    corpus: &TokenizedCorpus,
    window_chars: usize,
) -> EdgeList {
    let mut anchored: Vec<(usize, usize, &str)> = mentions
        .iter()
        .map(|m| {
            (
                m.chapter_index,
                corpus.tokens[m.token_range.start].char_offset,
                m.canonical_id.as_str(),
            )
        })
        .collect();
    anchored.sort_unstable();

    let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
    for (i, &(chapter, offset, id)) in anchored.iter().enumerate() {
        for &(chapter_b, offset_b, id_b) in &anchored[i + 1..] {
            if chapter_b != chapter || offset_b - offset > window_chars {
                break;
            }
            if id != id_b {
                *counts.entry(ordered(id, id_b)).or_insert(0) += 1;
            }
        }
    }
    EdgeList::from_counts(counts, CooccurrenceStrategy::Window { window_chars })
}
