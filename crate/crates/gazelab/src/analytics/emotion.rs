//! Emotion-keyword distributions over free-text thoughts.
//!
//! Matching is case-insensitive and whole-word: text is split into
//! alphanumeric runs, and each occurrence of a lexicon keyword counts once
//! per emotion that lists it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Emotion name → set of lowercase keywords.
pub type Lexicon = BTreeMap<String, Vec<String>>;

/// Count matrix: phrase → emotion → occurrences.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EmotionCounts {
    pub counts: BTreeMap<String, BTreeMap<String, u32>>,
}

impl EmotionCounts {
    pub fn get(&self, phrase_id: &str, emotion: &str) -> u32 {
        self.counts
            .get(phrase_id)
            .and_then(|row| row.get(emotion))
            .copied()
            .unwrap_or(0)
    }

    /// Total occurrences per emotion across all phrases.
    pub fn totals(&self) -> BTreeMap<String, u32> {
        let mut totals = BTreeMap::new();
        for row in self.counts.values() {
            for (emotion, count) in row {
                *totals.entry(emotion.clone()).or_insert(0) += count;
            }
        }
        totals
    }
}

/// A small default lexicon covering the emotion families the free-text
/// prompts tend to elicit. Callers with a calibrated lexicon should pass
/// their own.
pub fn default_lexicon() -> Lexicon {
    let entries: [(&str, &[&str]); 4] = [
        ("anger", &["rage", "fury", "furious", "angry"]),
        ("disgust", &["horrible", "disgusting", "revolting"]),
        ("love", &["love", "desire", "adore", "longing"]),
        ("admiration", &["beauty", "beautiful", "elegant"]),
    ];
    entries
        .iter()
        .map(|(emotion, words)| {
            (
                emotion.to_string(),
                words.iter().map(|w| w.to_string()).collect(),
            )
        })
        .collect()
}

/// Counts keyword occurrences per phrase per emotion. Every phrase id in the
/// input appears in the output, even with an all-zero row; every emotion in
/// the lexicon appears in every row.
pub fn emotion_keyword_distribution(
    thoughts: &[(String, String)],
    lexicon: &Lexicon,
) -> EmotionCounts {
    let mut counts = EmotionCounts::default();
    for (phrase_id, text) in thoughts {
        let words: Vec<String> = text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .collect();
        let row = counts.counts.entry(phrase_id.clone()).or_default();
        for (emotion, keywords) in lexicon {
            let hits = words
                .iter()
                .filter(|w| keywords.iter().any(|k| k == *w))
                .count() as u32;
            *row.entry(emotion.clone()).or_insert(0) += hits;
        }
    }
    counts
}
