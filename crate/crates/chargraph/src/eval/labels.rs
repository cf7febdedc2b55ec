//! Automatic class labels from per-work mention counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::characters::MentionRecord;
use crate::corpus::TokenizedCorpus;
use crate::error::{Error, Result};
use crate::graph::CharacterGraph;

/// Character class labels: class = the work (or work group) where the
/// character's share of total mentions is highest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelAssignment {
    /// Class names in configured order; ties resolve toward earlier entries.
    pub classes: Vec<String>,
    pub labels: BTreeMap<String, usize>,
    /// Per-character mention counts per class, for inspection.
    pub counts: BTreeMap<String, Vec<u64>>,
}

/// Derives labels as argmax over `count(c, class) / total_mentions(class)`.
///
/// `work_groups` optionally merges works into one class (volume -> novel);
/// unmapped works form their own class. Class order follows corpus work
/// order of first appearance.
pub fn derive_labels(
    mentions: &[MentionRecord],
    corpus: &TokenizedCorpus,
    work_groups: Option<&BTreeMap<String, String>>,
) -> Result<LabelAssignment> {
    let class_of_work: Vec<String> = corpus
        .works
        .iter()
        .map(|w| {
            work_groups
                .and_then(|g| g.get(w).cloned())
                .unwrap_or_else(|| w.clone())
        })
        .collect();
    let mut classes: Vec<String> = Vec::new();
    for c in &class_of_work {
        if !classes.contains(c) {
            classes.push(c.clone());
        }
    }
    let class_index: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut counts: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    let mut totals = vec![0u64; classes.len()];
    for m in mentions {
        let class = class_index[class_of_work[m.work(corpus)].as_str()];
        counts
            .entry(m.canonical_id.clone())
            .or_insert_with(|| vec![0; classes.len()])[class] += 1;
        totals[class] += 1;
    }

    let mut labels = BTreeMap::new();
    for (character, per_class) in &counts {
        let mut best = 0usize;
        let mut best_fraction = -1.0f64;
        for (class, &count) in per_class.iter().enumerate() {
            if totals[class] == 0 {
                continue;
            }
            let fraction = count as f64 / totals[class] as f64;
            if fraction > best_fraction {
                best_fraction = fraction;
                best = class;
            }
        }
        labels.insert(character.clone(), best);
    }
    Ok(LabelAssignment {
        classes,
        labels,
        counts,
    })
}

impl LabelAssignment {
    /// Labels aligned to graph node order; a node without mentions is an
    /// error.
    pub fn for_graph(&self, g: &CharacterGraph) -> Result<Vec<usize>> {
        g.nodes()
            .iter()
            .map(|id| {
                self.labels
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::ZeroMentions(id.clone()))
            })
            .collect()
    }

    /// Class sizes in class order.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.classes.len()];
        for &label in self.labels.values() {
            sizes[label] += 1;
        }
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{extract_mentions, AliasTable};
    use crate::corpus::{load_corpus, RawDocument, SegmentationConfig};

    fn setup(texts: &[(&str, &str)], names: &[&str]) -> (TokenizedCorpus, Vec<MentionRecord>) {
        let docs: Vec<RawDocument> = texts
            .iter()
            .map(|(id, text)| RawDocument {
                work_id: id.to_string(),
                title: id.to_string(),
                text: text.to_string(),
                chapter_delimiter: None,
            })
            .collect();
        let corpus = load_corpus(&docs, &SegmentationConfig::default()).unwrap();
        let raw: Vec<(String, String)> = names
            .iter()
            .map(|n| (n.to_string(), n.to_string()))
            .collect();
        let table = AliasTable::compile(&raw, &SegmentationConfig::default()).unwrap();
        let mentions = extract_mentions(&corpus, &table);
        (corpus, mentions)
    }

    #[test]
    fn argmax_fraction_assigns_label() {
        // Ana: 10 mentions in work a, 3 in work b -> a.
        let a_text = "Ana ".repeat(10) + ". Bo Bo Bo.";
        let b_text = "Ana Ana Ana. Bo Bo Bo Bo.";
        let (corpus, mentions) = setup(&[("a", &a_text), ("b", &b_text)], &["Ana", "Bo"]);
        let assignment = derive_labels(&mentions, &corpus, None).unwrap();
        assert_eq!(assignment.classes, ["a", "b"]);
        assert_eq!(assignment.labels["Ana"], 0);
        assert_eq!(assignment.labels["Bo"], 1);
    }

    #[test]
    fn tie_breaks_toward_earlier_work() {
        // Cy has the same mention fraction in both works.
        let (corpus, mentions) = setup(&[("a", "Cy met Cy."), ("b", "Cy met Cy.")], &["Cy"]);
        let assignment = derive_labels(&mentions, &corpus, None).unwrap();
        assert_eq!(assignment.labels["Cy"], 0);
    }

    #[test]
    fn work_groups_merge_into_one_class() {
        let (corpus, mentions) = setup(
            &[("vol1", "Ana walks."), ("vol2", "Ana rests."), ("other", "Bo.")],
            &["Ana", "Bo"],
        );
        let groups: BTreeMap<String, String> = [
            ("vol1".to_string(), "novel".to_string()),
            ("vol2".to_string(), "novel".to_string()),
        ]
        .into();
        let assignment = derive_labels(&mentions, &corpus, Some(&groups)).unwrap();
        assert_eq!(assignment.classes, ["novel", "other"]);
        assert_eq!(assignment.labels["Ana"], 0);
        assert_eq!(assignment.labels["Bo"], 1);
    }

    #[test]
    fn graph_node_without_mentions_is_an_error() {
        let (corpus, mentions) = setup(&[("a", "Ana met Bo.")], &["Ana", "Bo"]);
        let assignment = derive_labels(&mentions, &corpus, None).unwrap();
        let g = CharacterGraph::from_weighted_edges([
            ("Ana".to_string(), "Bo".to_string(), 1),
            ("Ana".to_string(), "Ghost".to_string(), 1),
        ])
        .unwrap();
        assert!(matches!(
            assignment.for_graph(&g),
            Err(Error::ZeroMentions(id)) if id == "Ghost"
        ));
    }
}
