//! Corpus ingestion: tokenization, sentence and chapter segmentation, and
//! dialogue-span detection.
//!
//! The splitter is deliberately rule-based. Sentences end on `.`, `!` or `?`
//! with an abbreviation exception list; a terminator inside a double-quoted
//! stretch ends the sentence only when the closing quote is followed by a
//! capitalized token, so `"Run!" said Frodo.` stays one sentence while
//! `"I am done." He left.` splits into two.

use std::collections::BTreeSet;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-open token-index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn contains(&self, idx: usize) -> bool {
        idx >= self.start && idx < self.end
    }

    pub fn contains_span(&self, other: Span) -> bool {
        other.start >= self.start && other.end <= self.end
    }
}

/// One input document, before tokenization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawDocument {
    pub work_id: String,
    pub title: String,
    pub text: String,
    /// Per-work chapter delimiter pattern; falls back to the config default.
    #[serde(default)]
    pub chapter_delimiter: Option<String>,
}

/// Tokenizer and segmentation settings shared by corpus and alias table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentationConfig {
    /// Regex locating chapter starts; use `(?m)` for line anchors.
    pub chapter_delimiter: String,
    /// Characters that open or close dialogue.
    pub quote_chars: BTreeSet<char>,
    /// Tokens before a `.` that do not end a sentence.
    pub abbreviations: BTreeSet<String>,
    /// Surfaces kept as single tokens even though they contain punctuation
    /// (hyphenated names like `Uruk-Hai`).
    pub token_exceptions: BTreeSet<String>,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            chapter_delimiter: r"(?m)^\s*Chapter\b[^\n]*".to_string(),
            quote_chars: ['"', '\u{201C}', '\u{201D}'].into_iter().collect(),
            abbreviations: [
                "Mr", "Mrs", "Ms", "Dr", "Prof", "St", "Mt", "Jr", "Sr", "Messrs", "Capt", "Col",
                "Gen", "Lt", "Sgt", "Rev", "Hon", "vs", "cf", "etc",
            ]
            .into_iter()
            .map(str::to_string)
            .collect(),
            token_exceptions: BTreeSet::new(),
        }
    }
}

/// One token with its character offset within its work.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub char_offset: usize,
    /// Index into [`TokenizedCorpus::works`].
    pub work: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chapter {
    pub work: usize,
    pub range: Span,
    pub label: String,
}

/// The ingested corpus: tokens plus sentence, chapter, and dialogue structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenizedCorpus {
    pub works: Vec<String>,
    pub titles: Vec<String>,
    pub tokens: Vec<Token>,
    pub sentences: Vec<Span>,
    pub chapters: Vec<Chapter>,
    pub dialogue_spans: Vec<Span>,
}

impl TokenizedCorpus {
    /// Index of the sentence containing token `idx`.
    pub fn sentence_of(&self, idx: usize) -> usize {
        match self.sentences.binary_search_by(|s| {
            if s.contains(idx) {
                std::cmp::Ordering::Equal
            } else if s.end <= idx {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        }) {
            Ok(i) => i,
            Err(_) => unreachable!("sentences cover every token"),
        }
    }

    /// Index of the chapter containing token `idx`.
    pub fn chapter_of(&self, idx: usize) -> usize {
        match self.chapters.binary_search_by(|c| {
            if c.range.contains(idx) {
                std::cmp::Ordering::Equal
            } else if c.range.end <= idx {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        }) {
            Ok(i) => i,
            Err(_) => unreachable!("chapters cover every token"),
        }
    }

    /// True if the token range sits inside a dialogue span.
    pub fn in_dialogue(&self, range: Span) -> bool {
        self.dialogue_spans.iter().any(|d| d.contains_span(range))
    }

    pub fn work_index(&self, work_id: &str) -> Option<usize> {
        self.works.iter().position(|w| w == work_id)
    }

    /// Checks the structural invariants; used by tests and after import.
    pub fn validate(&self) -> Result<()> {
        let fail = |detail: String| Error::MalformedInput {
            format: "corpus",
            detail,
        };
        let n = self.tokens.len();
        let mut covered = 0usize;
        for s in &self.sentences {
            if s.start != covered || s.is_empty() {
                return Err(fail(format!("sentence gap or empty span at {}", s.start)));
            }
            covered = s.end;
        }
        if covered != n {
            return Err(fail(format!("sentences cover {covered} of {n} tokens")));
        }
        covered = 0;
        for c in &self.chapters {
            if c.range.start != covered || c.range.is_empty() {
                return Err(fail(format!("chapter gap at {}", c.range.start)));
            }
            covered = c.range.end;
        }
        if covered != n {
            return Err(fail(format!("chapters cover {covered} of {n} tokens")));
        }
        for s in &self.sentences {
            let ch = self.chapter_of(s.start);
            if !self.chapters[ch].range.contains_span(*s) {
                return Err(fail(format!("sentence at {} crosses a chapter", s.start)));
            }
        }
        let mut prev_end = 0usize;
        for d in &self.dialogue_spans {
            if d.start < prev_end || d.is_empty() {
                return Err(fail(format!("dialogue spans overlap at {}", d.start)));
            }
            let ch = self.chapter_of(d.start);
            if !self.chapters[ch].range.contains_span(*d) {
                return Err(fail(format!("dialogue span at {} crosses a chapter", d.start)));
            }
            prev_end = d.end;
        }
        for w in 0..self.works.len() {
            let mut last: Option<usize> = None;
            for t in self.tokens.iter().filter(|t| t.work == w) {
                if let Some(prev) = last {
                    if t.char_offset <= prev {
                        return Err(fail(format!(
                            "char offsets not increasing in work {}",
                            self.works[w]
                        )));
                    }
                }
                last = Some(t.char_offset);
            }
        }
        Ok(())
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Splits text into word and single-character punctuation tokens.
///
/// `exceptions` are matched first (longest wins) so hyphenated names survive
/// as single tokens. Offsets are in characters.
pub fn tokenize(text: &str, work: usize, exceptions: &BTreeSet<String>) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    // Longest-first so "Uruk-Hai archer" style overlaps resolve greedily.
    let mut exc: Vec<Vec<char>> = exceptions.iter().map(|e| e.chars().collect()).collect();
    exc.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let at_boundary = i == 0 || !is_word_char(chars[i - 1]);
        if at_boundary {
            if let Some(hit) = exc.iter().find(|e| {
                chars[i..].starts_with(e) && {
                    let after = i + e.len();
                    after >= chars.len() || !is_word_char(chars[after])
                }
            }) {
                tokens.push(Token {
                    surface: hit.iter().collect(),
                    char_offset: i,
                    work,
                });
                i += hit.len();
                continue;
            }
        }
        if is_word_char(c) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            tokens.push(Token {
                surface: chars[start..i].iter().collect(),
                char_offset: start,
                work,
            });
        } else {
            tokens.push(Token {
                surface: c.to_string(),
                char_offset: i,
                work,
            });
            i += 1;
        }
    }
    tokens
}

struct DocumentSegments {
    tokens: Vec<Token>,
    // Chapter boundaries as (token index, label), relative to this document.
    chapters: Vec<(Span, String)>,
}

fn segment_document(doc: &RawDocument, work: usize, config: &SegmentationConfig) -> Result<DocumentSegments> {
    if doc.text.trim().is_empty() {
        return Err(Error::EmptyDocument {
            work_id: doc.work_id.clone(),
        });
    }
    let tokens = tokenize(&doc.text, work, &config.token_exceptions);
    if tokens.is_empty() {
        return Err(Error::EmptyDocument {
            work_id: doc.work_id.clone(),
        });
    }

    let pattern = doc
        .chapter_delimiter
        .as_deref()
        .unwrap_or(&config.chapter_delimiter);
    let re = Regex::new(pattern)
        .map_err(|e| Error::InvalidConfig(format!("chapter delimiter: {e}")))?;

    // Regex works in bytes; convert match starts to char offsets in one pass.
    let mut marks: Vec<(usize, String)> = Vec::new();
    {
        let mut byte_to_char: Vec<(usize, usize)> = Vec::new();
        for (ci, (bi, _)) in doc.text.char_indices().enumerate() {
            byte_to_char.push((bi, ci));
        }
        for m in re.find_iter(&doc.text) {
            let ci = byte_to_char
                .binary_search_by_key(&m.start(), |&(b, _)| b)
                .map(|k| byte_to_char[k].1)
                .unwrap_or(0);
            let label = m.as_str().split_whitespace().collect::<Vec<_>>().join(" ");
            marks.push((ci, label));
        }
    }

    let mut chapters = Vec::new();
    if marks.is_empty() {
        chapters.push((Span::new(0, tokens.len()), doc.title.clone()));
    } else {
        let token_at = |char_off: usize| tokens.partition_point(|t| t.char_offset < char_off);
        let first = token_at(marks[0].0);
        if first > 0 {
            chapters.push((Span::new(0, first), doc.title.clone()));
        }
        for (k, (off, label)) in marks.iter().enumerate() {
            let start = token_at(*off);
            let end = marks
                .get(k + 1)
                .map(|(next, _)| token_at(*next))
                .unwrap_or(tokens.len());
            if start < end {
                chapters.push((Span::new(start, end), label.clone()));
            }
        }
    }
    Ok(DocumentSegments { tokens, chapters })
}

fn is_terminator(surface: &str) -> bool {
    matches!(surface, "." | "!" | "?")
}

fn is_abbreviation(surface: &str, config: &SegmentationConfig) -> bool {
    if config.abbreviations.contains(surface) {
        return true;
    }
    // Single-letter initials like "J. R. R.", excluding the words I and A.
    let mut cs = surface.chars();
    matches!((cs.next(), cs.next()), (Some(c), None) if c.is_uppercase())
        && surface != "I"
        && surface != "A"
}

fn starts_uppercase(surface: &str) -> bool {
    surface.chars().next().is_some_and(|c| c.is_uppercase())
}

/// Sentence boundaries within one chapter, honoring quotes and abbreviations.
fn split_sentences(tokens: &[Token], chapter: Span, config: &SegmentationConfig) -> Vec<Span> {
    let mut sentences = Vec::new();
    let mut start = chapter.start;
    let mut in_quote = false;
    let mut i = chapter.start;
    while i < chapter.end {
        let surf = tokens[i].surface.as_str();
        if surf.chars().count() == 1 && config.quote_chars.contains(&surf.chars().next().unwrap())
        {
            in_quote = !in_quote;
            i += 1;
            continue;
        }
        if is_terminator(surf) {
            if surf == "."
                && i > chapter.start
                && is_abbreviation(&tokens[i - 1].surface, config)
            {
                i += 1;
                continue;
            }
            if !in_quote {
                // Swallow runs like "..." or "?!".
                let mut end = i + 1;
                while end < chapter.end && is_terminator(&tokens[end].surface) {
                    end += 1;
                }
                sentences.push(Span::new(start, end));
                start = end;
                i = end;
                continue;
            }
            // Inside a quote: split only on a closing quote followed by a
            // capitalized token (or chapter end).
            let next_is_quote = i + 1 < chapter.end
                && tokens[i + 1].surface.chars().count() == 1
                && config
                    .quote_chars
                    .contains(&tokens[i + 1].surface.chars().next().unwrap());
            if next_is_quote {
                let after = i + 2;
                if after >= chapter.end || starts_uppercase(&tokens[after].surface) {
                    sentences.push(Span::new(start, after));
                    start = after;
                    in_quote = false;
                    i = after;
                    continue;
                }
            }
        }
        i += 1;
    }
    if start < chapter.end {
        sentences.push(Span::new(start, chapter.end));
    }
    sentences
}

/// Dialogue spans for one chapter: interiors of balanced quote pairs, with an
/// unbalanced trailing quote closed at the chapter boundary.
fn chapter_dialogue(tokens: &[Token], chapter: Span, quote_chars: &BTreeSet<char>) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for i in chapter.start..chapter.end {
        let surf = &tokens[i].surface;
        let mut cs = surf.chars();
        let (first, rest) = (cs.next(), cs.next());
        if rest.is_none() && first.is_some_and(|c| quote_chars.contains(&c)) {
            match open.take() {
                None => open = Some(i + 1),
                Some(s) => {
                    if s < i {
                        spans.push(Span::new(s, i));
                    }
                }
            }
        }
    }
    if let Some(s) = open {
        if s < chapter.end {
            spans.push(Span::new(s, chapter.end));
        }
    }
    spans
}

/// Detects dialogue spans on an already-built corpus.
pub fn detect_dialogue_spans(corpus: &TokenizedCorpus, quote_chars: &BTreeSet<char>) -> Vec<Span> {
    let mut spans = Vec::new();
    for chapter in &corpus.chapters {
        spans.extend(chapter_dialogue(&corpus.tokens, chapter.range, quote_chars));
    }
    spans
}

/// Ingests raw documents into a [`TokenizedCorpus`].
///
/// Documents are processed independently and merged in input order, so the
/// result is deterministic for identical input.
pub fn load_corpus(documents: &[RawDocument], config: &SegmentationConfig) -> Result<TokenizedCorpus> {
    if documents.is_empty() {
        return Err(Error::NoDocuments);
    }
    let mut seen = BTreeSet::new();
    for d in documents {
        if d.work_id.is_empty() {
            return Err(Error::InvalidConfig("empty work_id".into()));
        }
        if !seen.insert(&d.work_id) {
            return Err(Error::InvalidConfig(format!(
                "duplicate work_id '{}'",
                d.work_id
            )));
        }
    }

    let mut corpus = TokenizedCorpus {
        works: documents.iter().map(|d| d.work_id.clone()).collect(),
        titles: documents.iter().map(|d| d.title.clone()).collect(),
        tokens: Vec::new(),
        sentences: Vec::new(),
        chapters: Vec::new(),
        dialogue_spans: Vec::new(),
    };

    for (work, doc) in documents.iter().enumerate() {
        let segments = segment_document(doc, work, config)?;
        let base = corpus.tokens.len();
        for (range, label) in &segments.chapters {
            let shifted = Span::new(base + range.start, base + range.end);
            corpus
                .sentences
                .extend(split_sentences(&segments.tokens, *range, config).into_iter().map(
                    |s| Span::new(base + s.start, base + s.end),
                ));
            corpus
                .dialogue_spans
                .extend(
                    chapter_dialogue(&segments.tokens, *range, &config.quote_chars)
                        .into_iter()
                        .map(|s| Span::new(base + s.start, base + s.end)),
                );
            corpus.chapters.push(Chapter {
                work,
                range: shifted,
                label: label.clone(),
            });
        }
        corpus.tokens.extend(segments.tokens);
    }
    debug_assert!(corpus.validate().is_ok());
    Ok(corpus)
}

/// One entry of the corpus manifest file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub work_id: String,
    pub title: String,
    pub path: String,
    #[serde(default)]
    pub chapter_delimiter: Option<String>,
}

/// Reads a JSON manifest and the text files it points to.
///
/// Paths are resolved relative to the manifest's directory.
pub fn load_manifest(manifest_path: &Path) -> Result<Vec<RawDocument>> {
    let data = std::fs::read(manifest_path)?;
    let entries: Vec<ManifestEntry> = serde_json::from_slice(&data)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut docs = Vec::new();
    for entry in entries {
        let path = base.join(&entry.path);
        let bytes = std::fs::read(&path).map_err(|e| {
            Error::MissingArtifact {
                path: format!("{} ({e})", path.display()),
                stage: "ingest".into(),
            }
        })?;
        let text = String::from_utf8(bytes).map_err(|e| Error::InvalidUtf8 {
            work_id: entry.work_id.clone(),
            offset: e.utf8_error().valid_up_to(),
        })?;
        docs.push(RawDocument {
            work_id: entry.work_id,
            title: entry.title,
            text,
            chapter_delimiter: entry.chapter_delimiter,
        });
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> RawDocument {
        RawDocument {
            work_id: "w1".into(),
            title: "Test Work".into(),
            text: text.into(),
            chapter_delimiter: None,
        }
    }

    fn load(text: &str) -> TokenizedCorpus {
        load_corpus(&[doc(text)], &SegmentationConfig::default()).unwrap()
    }

    #[test]
    fn four_tokens_one_sentence() {
        let corpus = load("Frodo saw Sam.");
        let surfaces: Vec<_> = corpus.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, ["Frodo", "saw", "Sam", "."]);
        assert_eq!(corpus.sentences.len(), 1);
    }

    #[test]
    fn abbreviation_does_not_split() {
        let corpus = load("Mr. Baggins arrived. He left.");
        assert_eq!(corpus.sentences.len(), 2);
        let first: Vec<_> = (corpus.sentences[0].start..corpus.sentences[0].end)
            .map(|i| corpus.tokens[i].surface.as_str())
            .collect();
        assert_eq!(first, ["Mr", ".", "Baggins", "arrived", "."]);
    }

    #[test]
    fn initials_do_not_split_but_pronoun_i_does() {
        let corpus = load("J. R. R. wrote it. So did I. Then all was quiet.");
        assert_eq!(corpus.sentences.len(), 3);
    }

    #[test]
    fn chapter_delimiter_produces_ranges_covering_all_tokens() {
        let text = "Chapter One\nFrodo walked.\nChapter Two\nSam sang.\nChapter Three\nPippin ate.";
        let corpus = load(text);
        assert_eq!(corpus.chapters.len(), 3);
        assert_eq!(corpus.chapters[0].range.start, 0);
        assert_eq!(corpus.chapters[2].range.end, corpus.tokens.len());
        assert_eq!(corpus.chapters[1].label, "Chapter Two");
        corpus.validate().unwrap();
    }

    #[test]
    fn no_delimiter_match_gives_single_chapter() {
        let corpus = load("Nothing here matches. At all.");
        assert_eq!(corpus.chapters.len(), 1);
        assert_eq!(corpus.chapters[0].label, "Test Work");
    }

    #[test]
    fn dialogue_span_covers_quote_interior() {
        let corpus = load("\"Run!\" said Frodo.");
        assert_eq!(corpus.dialogue_spans.len(), 1);
        let span = corpus.dialogue_spans[0];
        let inside: Vec<_> = (span.start..span.end)
            .map(|i| corpus.tokens[i].surface.as_str())
            .collect();
        assert_eq!(inside, ["Run", "!"]);
        // Attribution after the quote stays in the same sentence.
        assert_eq!(corpus.sentences.len(), 1);
    }

    #[test]
    fn no_quotes_means_no_dialogue() {
        let corpus = load("Frodo walked on.");
        assert!(corpus.dialogue_spans.is_empty());
    }

    #[test]
    fn unbalanced_quote_closes_at_chapter_end() {
        let text = "Chapter One\nHe said \"never give up\nChapter Two\nAll was calm.";
        let corpus = load(text);
        assert_eq!(corpus.dialogue_spans.len(), 1);
        let span = corpus.dialogue_spans[0];
        assert_eq!(span.end, corpus.chapters[0].range.end);
        corpus.validate().unwrap();
    }

    #[test]
    fn quote_then_capital_splits_sentences() {
        let corpus = load("\"I am done.\" He left.");
        assert_eq!(corpus.sentences.len(), 2);
    }

    #[test]
    fn hyphenated_exception_stays_single_token() {
        let mut config = SegmentationConfig::default();
        config.token_exceptions.insert("Uruk-Hai".into());
        let corpus = load_corpus(&[doc("The Uruk-Hai marched.")], &config).unwrap();
        let surfaces: Vec<_> = corpus.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, ["The", "Uruk-Hai", "marched", "."]);
    }

    #[test]
    fn hyphen_splits_without_exception() {
        let corpus = load("The Uruk-Hai marched.");
        let surfaces: Vec<_> = corpus.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, ["The", "Uruk", "-", "Hai", "marched", "."]);
    }

    #[test]
    fn empty_document_is_an_error() {
        let err = load_corpus(&[doc("   ")], &SegmentationConfig::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyDocument { .. }));
    }

    #[test]
    fn duplicate_work_id_is_an_error() {
        let docs = vec![doc("One."), doc("Two.")];
        assert!(load_corpus(&docs, &SegmentationConfig::default()).is_err());
    }

    #[test]
    fn reload_is_byte_identical() {
        let docs = vec![doc("Chapter One\n\"Go,\" said Sam. Frodo went.")];
        let config = SegmentationConfig::default();
        let a = serde_json::to_vec(&load_corpus(&docs, &config).unwrap()).unwrap();
        let b = serde_json::to_vec(&load_corpus(&docs, &config).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_utf8_names_byte_offset() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("bad.txt"), [b'o', b'k', 0xFF, 0xFE, b'x']).unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            r#"[{"work_id": "bad", "title": "Bad", "path": "bad.txt"}]"#,
        )
        .unwrap();
        let err = load_manifest(&dir.path().join("manifest.json")).unwrap_err();
        match err {
            Error::InvalidUtf8 { work_id, offset } => {
                assert_eq!(work_id, "bad");
                assert_eq!(offset, 2);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    proptest::proptest! {
        // Partition invariants hold for arbitrary printable text.
        #[test]
        fn random_text_satisfies_invariants(text in "[ -~\\n\u{201C}\u{201D}]{1,300}") {
            if text.trim().is_empty() {
                return Ok(());
            }
            let corpus = load_corpus(
                &[RawDocument {
                    work_id: "w".into(),
                    title: "W".into(),
                    text,
                    chapter_delimiter: None,
                }],
                &SegmentationConfig::default(),
            )
            .unwrap();
            corpus.validate().unwrap();
        }
    }

    #[test]
    fn multi_work_offsets_reset_per_work() {
        let docs = vec![
            RawDocument {
                work_id: "a".into(),
                title: "A".into(),
                text: "First text here.".into(),
                chapter_delimiter: None,
            },
            RawDocument {
                work_id: "b".into(),
                title: "B".into(),
                text: "Second text here.".into(),
                chapter_delimiter: None,
            },
        ];
        let corpus = load_corpus(&docs, &SegmentationConfig::default()).unwrap();
        corpus.validate().unwrap();
        assert_eq!(corpus.works, ["a", "b"]);
        let b_first = corpus.tokens.iter().find(|t| t.work == 1).unwrap();
        assert_eq!(b_first.char_offset, 0);
    }
}
