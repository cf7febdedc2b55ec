//! Character reference resolution: alias tables, mention extraction,
//! mention-type statistics, and narrative-chart matrices.
//!
//! Coreference is intentionally limited to named references resolved through
//! a hand-curated alias table; pronouns and noun phrases are only counted,
//! never attributed to characters.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, SegmentationConfig, Span, TokenizedCorpus};
use crate::error::{Error, Result};

/// Maps alias token sequences to canonical character ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasTable {
    entries: BTreeMap<Vec<String>, String>,
    canonical_ids: BTreeSet<String>,
}

impl AliasTable {
    /// Compiles raw `(alias, canonical)` pairs, tokenizing aliases with the
    /// same tokenizer used for the corpus. Every canonical name is also
    /// registered as an alias of itself.
    pub fn compile(raw: &[(String, String)], config: &SegmentationConfig) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyAliasTable);
        }
        let mut entries: BTreeMap<Vec<String>, String> = BTreeMap::new();
        let mut canonical_ids = BTreeSet::new();
        let mut insert = |alias_tokens: Vec<String>, canonical: &str| -> Result<()> {
            if alias_tokens.is_empty() {
                return Err(Error::InvalidConfig("empty alias".into()));
            }
            match entries.get(&alias_tokens) {
                Some(existing) if existing != canonical => Err(Error::ConflictingAlias {
                    alias: alias_tokens.join(" "),
                    first: existing.clone(),
                    second: canonical.to_string(),
                }),
                _ => {
                    entries.insert(alias_tokens, canonical.to_string());
                    Ok(())
                }
            }
        };
        for (alias, canonical) in raw {
            let tokens: Vec<String> = tokenize(alias, 0, &config.token_exceptions)
                .into_iter()
                .map(|t| t.surface)
                .collect();
            insert(tokens, canonical)?;
            canonical_ids.insert(canonical.clone());
        }
        // Self-aliases come second so explicit conflicts surface first.
        for canonical in canonical_ids.clone() {
            let tokens: Vec<String> = tokenize(&canonical, 0, &config.token_exceptions)
                .into_iter()
                .map(|t| t.surface)
                .collect();
            insert(tokens, &canonical)?;
        }
        Ok(Self {
            entries,
            canonical_ids,
        })
    }

    pub fn lookup(&self, alias_tokens: &[String]) -> Option<&str> {
        self.entries.get(alias_tokens).map(String::as_str)
    }

    pub fn canonical_ids(&self) -> &BTreeSet<String> {
        &self.canonical_ids
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[String], &str)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Alias surfaces containing interior punctuation (hyphenated names);
    /// feed these to the tokenizer as exceptions before ingesting a corpus.
    pub fn token_exceptions(raw: &[(String, String)]) -> BTreeSet<String> {
        raw.iter()
            .flat_map(|(a, c)| [a.as_str(), c.as_str()])
            .filter(|s| {
                s.chars().any(|c| c.is_alphanumeric())
                    && s.chars().any(|c| !c.is_alphanumeric() && !c.is_whitespace())
            })
            .flat_map(str::split_whitespace)
            .filter(|w| w.chars().any(|c| !c.is_alphanumeric()))
            .map(str::to_string)
            .collect()
    }

    /// Reads `alias<TAB>canonical` lines; `#` starts a comment.
    pub fn read_tsv(path: &Path) -> Result<Vec<(String, String)>> {
        let data = std::fs::read_to_string(path)?;
        let mut raw = Vec::new();
        for (lineno, line) in data.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(2, '\t');
            match (parts.next(), parts.next()) {
                (Some(alias), Some(canonical)) if !alias.is_empty() && !canonical.is_empty() => {
                    raw.push((alias.to_string(), canonical.trim().to_string()));
                }
                _ => {
                    return Err(Error::MalformedInput {
                        format: "alias TSV",
                        detail: format!("line {} lacks two tab-separated fields", lineno + 1),
                    })
                }
            }
        }
        Ok(raw)
    }

    /// Reads a JSON array of `[alias, canonical]` pairs.
    pub fn read_json(path: &Path) -> Result<Vec<(String, String)>> {
        let data = std::fs::read(path)?;
        Ok(serde_json::from_slice(&data)?)
    }
}

/// One resolved named reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionRecord {
    pub canonical_id: String,
    pub token_range: Span,
    pub sentence_index: usize,
    pub chapter_index: usize,
    pub in_dialogue: bool,
}

impl MentionRecord {
    pub fn work(&self, corpus: &TokenizedCorpus) -> usize {
        corpus.chapters[self.chapter_index].work
    }
}

/// Longest-match-first, left-to-right scan for alias matches.
///
/// Matches never overlap and never cross sentence boundaries; output is
/// sorted by token position and independent of alias-table entry order.
pub fn extract_mentions(corpus: &TokenizedCorpus, aliases: &AliasTable) -> Vec<MentionRecord> {
    // Candidates bucketed by first token, longest first.
    let mut by_first: HashMap<&str, Vec<(&[String], &str)>> = HashMap::new();
    for (tokens, canonical) in aliases.entries() {
        by_first
            .entry(tokens[0].as_str())
            .or_default()
            .push((tokens, canonical));
    }
    for candidates in by_first.values_mut() {
        candidates.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(b.0)));
    }

    let mut mentions = Vec::new();
    for (sentence_index, sentence) in corpus.sentences.iter().enumerate() {
        let mut i = sentence.start;
        while i < sentence.end {
            let first = corpus.tokens[i].surface.as_str();
            let hit = by_first.get(first).and_then(|candidates| {
                candidates.iter().find(|(alias, _)| {
                    i + alias.len() <= sentence.end
                        && alias
                            .iter()
                            .zip(&corpus.tokens[i..i + alias.len()])
                            .all(|(a, t)| *a == t.surface)
                })
            });
            if let Some((alias, canonical)) = hit {
                let range = Span::new(i, i + alias.len());
                mentions.push(MentionRecord {
                    canonical_id: canonical.to_string(),
                    token_range: range,
                    sentence_index,
                    chapter_index: corpus.chapter_of(i),
                    in_dialogue: corpus.in_dialogue(range),
                });
                i += alias.len();
            } else {
                i += 1;
            }
        }
    }
    mentions
}

/// Per-work mention-type counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkStats {
    pub work_id: String,
    pub token_count: usize,
    pub explicit_named_mentions: usize,
    pub pronoun_token_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nominal_mention_count: Option<usize>,
    pub cooccurrence_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionStats {
    pub per_work: Vec<WorkStats>,
}

/// A closed-class English pronoun list, including the archaic forms common
/// in older prose.
pub fn default_pronoun_lexicon() -> BTreeSet<String> {
    [
        "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself",
        "they", "them", "their", "theirs", "themselves", "i", "me", "my", "mine", "myself", "we",
        "us", "our", "ours", "ourselves", "you", "your", "yours", "yourself", "yourselves",
        "thee", "thou", "thy", "thine", "ye",
    ]
    .into_iter()
    .map(str::to_string)
    .collect()
}

/// Counts tokens, named mentions, pronouns, optional nominal phrases, and
/// sentence-level co-occurrence events for every work.
pub fn count_mention_types(
    corpus: &TokenizedCorpus,
    aliases: &AliasTable,
    pronoun_lexicon: &BTreeSet<String>,
    nominal_lexicon: Option<&BTreeSet<Vec<String>>>,
) -> Result<MentionStats> {
    if pronoun_lexicon.is_empty() {
        return Err(Error::InvalidConfig("empty pronoun lexicon".into()));
    }
    let mentions = extract_mentions(corpus, aliases);
    let nworks = corpus.works.len();
    let mut token_count = vec![0usize; nworks];
    let mut named = vec![0usize; nworks];
    let mut pronouns = vec![0usize; nworks];
    let mut nominal = vec![0usize; nworks];
    let mut cooccur = vec![0usize; nworks];

    for token in &corpus.tokens {
        token_count[token.work] += 1;
        if pronoun_lexicon.contains(&token.surface.to_lowercase()) {
            pronouns[token.work] += 1;
        }
    }
    for m in &mentions {
        named[m.work(corpus)] += 1;
    }
    if let Some(lexicon) = nominal_lexicon {
        let lowered: Vec<Vec<String>> = lexicon
            .iter()
            .map(|seq| seq.iter().map(|s| s.to_lowercase()).collect())
            .collect();
        for sentence in &corpus.sentences {
            let work = corpus.tokens[sentence.start].work;
            for i in sentence.start..sentence.end {
                for seq in &lowered {
                    if i + seq.len() <= sentence.end
                        && seq
                            .iter()
                            .zip(&corpus.tokens[i..i + seq.len()])
                            .all(|(a, t)| *a == t.surface.to_lowercase())
                    {
                        nominal[work] += 1;
                        break;
                    }
                }
            }
        }
    }
    // Sentence-level co-occurrence events: one per unordered pair of
    // distinct characters mentioned in the same sentence.
    let mut per_sentence: BTreeMap<usize, BTreeSet<&str>> = BTreeMap::new();
    for m in &mentions {
        per_sentence
            .entry(m.sentence_index)
            .or_default()
            .insert(m.canonical_id.as_str());
    }
    for (sentence_index, chars) in &per_sentence {
        let work = corpus.tokens[corpus.sentences[*sentence_index].start].work;
        cooccur[work] += chars.len() * (chars.len().saturating_sub(1)) / 2;
    }

    Ok(MentionStats {
        per_work: (0..nworks)
            .map(|w| WorkStats {
                work_id: corpus.works[w].clone(),
                token_count: token_count[w],
                explicit_named_mentions: named[w],
                pronoun_token_count: pronouns[w],
                nominal_mention_count: nominal_lexicon.map(|_| nominal[w]),
                cooccurrence_count: cooccur[w],
            })
            .collect(),
    })
}

/// Character-by-chapter matrix of relative mention frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NarrativeChart {
    pub characters: Vec<String>,
    /// `(work_id, chapter_label)` per column, in corpus order.
    pub chapters: Vec<(String, String)>,
    /// Row per character, column per chapter.
    pub values: Vec<Vec<f64>>,
}

/// Builds the narrative chart for `key_characters`.
///
/// Mentions inside dialogue are excluded. Each nonzero column sums to one:
/// cells hold the fraction of a chapter's key-character mentions belonging
/// to each character.
pub fn narrative_chart(
    mentions: &[MentionRecord],
    key_characters: &[String],
    corpus: &TokenizedCorpus,
) -> Result<NarrativeChart> {
    if key_characters.is_empty() {
        return Err(Error::InvalidConfig("no key characters".into()));
    }
    let known: BTreeSet<&str> = mentions.iter().map(|m| m.canonical_id.as_str()).collect();
    for c in key_characters {
        if !known.contains(c.as_str()) {
            return Err(Error::UnknownCharacter(c.clone()));
        }
    }
    let row_of: BTreeMap<&str, usize> = key_characters
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let ncols = corpus.chapters.len();
    let mut counts = vec![vec![0usize; ncols]; key_characters.len()];
    for m in mentions {
        if m.in_dialogue {
            continue;
        }
        if let Some(&row) = row_of.get(m.canonical_id.as_str()) {
            counts[row][m.chapter_index] += 1;
        }
    }
    let mut values = vec![vec![0.0; ncols]; key_characters.len()];
    for col in 0..ncols {
        let total: usize = counts.iter().map(|row| row[col]).sum();
        if total > 0 {
            for (row, count) in counts.iter().enumerate() {
                values[row][col] = count[col] as f64 / total as f64;
            }
        }
    }
    Ok(NarrativeChart {
        characters: key_characters.to_vec(),
        chapters: corpus
            .chapters
            .iter()
            .map(|c| (corpus.works[c.work].clone(), c.label.clone()))
            .collect(),
        values,
    })
}

/// Writes mentions as CSV with one row per record.
pub fn mentions_to_csv<W: Write>(
    corpus: &TokenizedCorpus,
    mentions: &[MentionRecord],
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "canonical_id",
        "work_id",
        "chapter",
        "sentence",
        "token_start",
        "token_end",
        "in_dialogue",
    ])?;
    for m in mentions {
        w.write_record([
            m.canonical_id.as_str(),
            corpus.works[m.work(corpus)].as_str(),
            &m.chapter_index.to_string(),
            &m.sentence_index.to_string(),
            &m.token_range.start.to_string(),
            &m.token_range.end.to_string(),
            if m.in_dialogue { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads mentions back from the CSV written by [`mentions_to_csv`].
pub fn mentions_from_csv<R: std::io::Read>(reader: R) -> Result<Vec<MentionRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut mentions = Vec::new();
    for record in r.records() {
        let record = record?;
        let field = |i: usize| -> Result<&str> {
            record.get(i).ok_or_else(|| Error::MalformedInput {
                format: "mentions CSV",
                detail: format!("missing column {i}"),
            })
        };
        let parse = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::MalformedInput {
                format: "mentions CSV",
                detail: format!("bad number '{s}'"),
            })
        };
        mentions.push(MentionRecord {
            canonical_id: field(0)?.to_string(),
            chapter_index: parse(field(2)?)?,
            sentence_index: parse(field(3)?)?,
            token_range: Span::new(parse(field(4)?)?, parse(field(5)?)?),
            in_dialogue: field(6)? == "true",
        });
    }
    Ok(mentions)
}

/// Writes the chart as CSV: character rows, chapter columns.
pub fn chart_to_csv<W: Write>(chart: &NarrativeChart, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["character".to_string()];
    header.extend(
        chart
            .chapters
            .iter()
            .map(|(work, label)| format!("{work}:{label}")),
    );
    w.write_record(&header)?;
    for (row, character) in chart.characters.iter().enumerate() {
        let mut record = vec![character.clone()];
        record.extend(chart.values[row].iter().map(|v| format!("{v}")));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_corpus, RawDocument};

    fn pairs(raw: &[(&str, &str)]) -> Vec<(String, String)> {
        raw.iter()
            .map(|(a, c)| (a.to_string(), c.to_string()))
            .collect()
    }

    fn corpus_of(text: &str) -> TokenizedCorpus {
        load_corpus(
            &[RawDocument {
                work_id: "w".into(),
                title: "W".into(),
                text: text.into(),
                chapter_delimiter: None,
            }],
            &SegmentationConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn alias_lookup_resolves_to_canonical() {
        let table = AliasTable::compile(
            &pairs(&[("Sam", "Sam Gamgee"), ("Peregrin", "Pippin")]),
            &SegmentationConfig::default(),
        )
        .unwrap();
        assert_eq!(table.lookup(&["Sam".into()]), Some("Sam Gamgee"));
        assert_eq!(table.lookup(&["Peregrin".into()]), Some("Pippin"));
        // canonical names registered as aliases of themselves
        assert_eq!(
            table.lookup(&["Sam".into(), "Gamgee".into()]),
            Some("Sam Gamgee")
        );
        assert_eq!(table.lookup(&["Pippin".into()]), Some("Pippin"));
    }

    #[test]
    fn empty_table_is_an_error() {
        assert!(matches!(
            AliasTable::compile(&[], &SegmentationConfig::default()),
            Err(Error::EmptyAliasTable)
        ));
    }

    #[test]
    fn conflicting_alias_lists_both_targets() {
        let err = AliasTable::compile(
            &pairs(&[("Sam", "Sam Gamgee"), ("Sam", "Samwise")]),
            &SegmentationConfig::default(),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Sam Gamgee") && msg.contains("Samwise"), "{msg}");
    }

    #[test]
    fn extracts_two_simple_mentions() {
        let corpus = corpus_of("Sam saw Frodo");
        let table = AliasTable::compile(
            &pairs(&[("Sam", "Sam Gamgee"), ("Frodo", "Frodo")]),
            &SegmentationConfig::default(),
        )
        .unwrap();
        let mentions = extract_mentions(&corpus, &table);
        assert_eq!(mentions.len(), 2);
        assert_eq!(mentions[0].canonical_id, "Sam Gamgee");
        assert_eq!(mentions[1].canonical_id, "Frodo");
    }

    #[test]
    fn longest_match_wins() {
        let corpus = corpus_of("Bilbo Baggins smiled");
        let table = AliasTable::compile(
            &pairs(&[("Bilbo Baggins", "Bilbo"), ("Bilbo", "Bilbo")]),
            &SegmentationConfig::default(),
        )
        .unwrap();
        let mentions = extract_mentions(&corpus, &table);
        assert_eq!(mentions.len(), 1);
        assert_eq!(mentions[0].token_range, Span::new(0, 2));
    }

    #[test]
    fn dialogue_flag_propagates() {
        let corpus = corpus_of("\"Frodo!\" cried Sam.");
        let table = AliasTable::compile(
            &pairs(&[("Sam", "Sam Gamgee"), ("Frodo", "Frodo")]),
            &SegmentationConfig::default(),
        )
        .unwrap();
        let mentions = extract_mentions(&corpus, &table);
        assert_eq!(mentions.len(), 2);
        assert!(mentions[0].in_dialogue, "Frodo inside the quotes");
        assert!(!mentions[1].in_dialogue, "Sam outside the quotes");
    }

    #[test]
    fn entry_order_does_not_change_output() {
        let corpus = corpus_of("Bilbo Baggins met Sam and Bilbo waved");
        let forward = pairs(&[
            ("Bilbo Baggins", "Bilbo"),
            ("Bilbo", "Bilbo"),
            ("Sam", "Sam Gamgee"),
        ]);
        let mut reversed = forward.clone();
        reversed.reverse();
        let config = SegmentationConfig::default();
        let a = extract_mentions(&corpus, &AliasTable::compile(&forward, &config).unwrap());
        let b = extract_mentions(&corpus, &AliasTable::compile(&reversed, &config).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn mention_surfaces_join_to_registered_alias() {
        let corpus = corpus_of("Sam Gamgee met Bilbo Baggins. Sam laughed.");
        let table = AliasTable::compile(
            &pairs(&[("Sam", "Sam Gamgee"), ("Bilbo Baggins", "Bilbo")]),
            &SegmentationConfig::default(),
        )
        .unwrap();
        for m in extract_mentions(&corpus, &table) {
            let surface: Vec<String> = (m.token_range.start..m.token_range.end)
                .map(|i| corpus.tokens[i].surface.clone())
                .collect();
            assert!(table.lookup(&surface).is_some(), "unregistered {surface:?}");
        }
    }

    #[test]
    fn pronoun_count_is_case_insensitive() {
        let corpus = corpus_of("He saw her.");
        let table =
            AliasTable::compile(&pairs(&[("Frodo", "Frodo")]), &SegmentationConfig::default())
                .unwrap();
        let stats = count_mention_types(&corpus, &table, &default_pronoun_lexicon(), None).unwrap();
        assert_eq!(stats.per_work[0].pronoun_token_count, 2);
        assert_eq!(stats.per_work[0].nominal_mention_count, None);
    }

    #[test]
    fn nominal_lexicon_counts_without_attribution() {
        let corpus = corpus_of("The hobbit waved. A hobbit is small.");
        let table =
            AliasTable::compile(&pairs(&[("Frodo", "Frodo")]), &SegmentationConfig::default())
                .unwrap();
        let lexicon: BTreeSet<Vec<String>> =
            [vec!["the".to_string(), "hobbit".to_string()]].into_iter().collect();
        let stats =
            count_mention_types(&corpus, &table, &default_pronoun_lexicon(), Some(&lexicon))
                .unwrap();
        assert_eq!(stats.per_work[0].nominal_mention_count, Some(1));
    }

    #[test]
    fn chart_single_character_column_is_one() {
        let corpus = corpus_of("Aragorn rode. Aragorn fought. Aragorn won. Boromir blew a horn.");
        let table = AliasTable::compile(
            &pairs(&[("Aragorn", "Aragorn"), ("Boromir", "Boromir")]),
            &SegmentationConfig::default(),
        )
        .unwrap();
        let mentions = extract_mentions(&corpus, &table);
        let chart = narrative_chart(
            &mentions,
            &["Aragorn".to_string(), "Boromir".to_string()],
            &corpus,
        )
        .unwrap();
        assert_eq!(chart.values[0][0], 0.75);
        assert_eq!(chart.values[1][0], 0.25);
        let col_sum: f64 = chart.values.iter().map(|r| r[0]).sum();
        assert!((col_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dialogue_mentions_do_not_count_in_chart() {
        let corpus = corpus_of("\"Aragorn is near,\" said Boromir.");
        let table = AliasTable::compile(
            &pairs(&[("Aragorn", "Aragorn"), ("Boromir", "Boromir")]),
            &SegmentationConfig::default(),
        )
        .unwrap();
        let mentions = extract_mentions(&corpus, &table);
        let chart = narrative_chart(
            &mentions,
            &["Aragorn".to_string(), "Boromir".to_string()],
            &corpus,
        )
        .unwrap();
        assert_eq!(chart.values[0][0], 0.0, "dialogue-only mention excluded");
        assert_eq!(chart.values[1][0], 1.0);
    }

    #[test]
    fn unknown_key_character_is_an_error() {
        let corpus = corpus_of("Aragorn rode.");
        let table =
            AliasTable::compile(&pairs(&[("Aragorn", "Aragorn")]), &SegmentationConfig::default())
                .unwrap();
        let mentions = extract_mentions(&corpus, &table);
        let err =
            narrative_chart(&mentions, &["Sauron".to_string()], &corpus).unwrap_err();
        assert!(err.to_string().contains("Sauron"));
    }

    proptest::proptest! {
        // Nonzero chart columns sum to one for random mention placements.
        #[test]
        fn nonzero_chart_columns_sum_to_one(seed in 0u64..200) {
            let names = ["Ana", "Bo", "Cy"];
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(11);
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state
            };
            let mut text = String::from("Chapter One\n");
            for k in 0..(next() % 12 + 2) {
                if k == 6 {
                    text.push_str("Chapter Two\n");
                }
                for _ in 0..(next() % 4 + 1) {
                    let i = next() as usize % 4;
                    text.push_str(names.get(i).copied().unwrap_or("walked"));
                    text.push(' ');
                }
                // occasionally a dialogue sentence
                if next() % 3 == 0 {
                    text.push_str("\"");
                    text.push_str(names[next() as usize % 3]);
                    text.push_str("!\" ");
                }
                text.push_str(". ");
            }
            let corpus = crate::corpus::load_corpus(
                &[crate::corpus::RawDocument {
                    work_id: "w".into(),
                    title: "W".into(),
                    text,
                    chapter_delimiter: None,
                }],
                &SegmentationConfig::default(),
            )
            .unwrap();
            let table = AliasTable::compile(
                &names.iter().map(|n| (n.to_string(), n.to_string())).collect::<Vec<_>>(),
                &SegmentationConfig::default(),
            )
            .unwrap();
            let mentions = extract_mentions(&corpus, &table);
            let key: Vec<String> = names
                .iter()
                .map(|n| n.to_string())
                .filter(|n| mentions.iter().any(|m| &m.canonical_id == n))
                .collect();
            if key.is_empty() {
                return Ok(());
            }
            let chart = narrative_chart(&mentions, &key, &corpus).unwrap();
            for col in 0..chart.chapters.len() {
                let total: f64 = chart.values.iter().map(|row| row[col]).sum();
                proptest::prop_assert!(
                    total.abs() < 1e-12 || (total - 1.0).abs() < 1e-12,
                    "column {} sums to {}",
                    col,
                    total
                );
            }
        }
    }

    #[test]
    fn token_exceptions_extracted_from_hyphenated_aliases() {
        let raw = pairs(&[("Uruk-Hai", "Uruk-Hai"), ("Sam", "Sam Gamgee")]);
        let exceptions = AliasTable::token_exceptions(&raw);
        assert!(exceptions.contains("Uruk-Hai"));
        assert!(!exceptions.contains("Sam"));
    }
}
