//! POS-blind rule-based lemmatizer.
//!
//! Lookup order: irregular-form exception table, then the base-word lexicon
//! (known lemmas map to themselves), then noun suffix rules followed by verb
//! suffix rules. A rule candidate is accepted only when it is a lexicon
//! word. Unknown tokens pass through unchanged.
//!
//! The exception table never maps to another exception key, and every
//! exception target is a lexicon word, so the output is always a fixed
//! point: `lemmatize(lemmatize(t)) == lemmatize(t)`.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

const NOUN_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ses", "s"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
];

const VERB_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ies", "y"),
    ("ied", "y"),
    ("es", "e"),
    ("es", ""),
    ("ed", "e"),
    ("ed", ""),
    ("ing", "e"),
    ("ing", ""),
];

#[derive(Debug, Clone)]
pub struct Lemmatizer {
    exceptions: HashMap<String, String>,
    lexicon: HashSet<String>,
}

impl Lemmatizer {
    /// Builds a lemmatizer from the text of an exception table
    /// (`form lemma` per line) and a lexicon (one word per line).
    pub fn from_data(exceptions: &str, lexicon: &str) -> Result<Self> {
        let lexicon: HashSet<String> = data_lines(lexicon).map(str::to_owned).collect();
        let mut table = HashMap::new();
        for (i, line) in data_lines(exceptions).enumerate() {
            let mut parts = line.split_whitespace();
            let (Some(form), Some(lemma), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Corrupt {
                    kind: "lemma exception table",
                    message: format!("entry {}: expected `form lemma`, got {line:?}", i + 1),
                });
            };
            table.insert(form.to_owned(), lemma.to_owned());
        }
        for (form, lemma) in &table {
            if table.contains_key(lemma) || !lexicon.contains(lemma) {
                return Err(Error::Corrupt {
                    kind: "lemma exception table",
                    message: format!("{form} -> {lemma}: target must be a lexicon word and not itself an exception"),
                });
            }
        }
        Ok(Lemmatizer {
            exceptions: table,
            lexicon,
        })
    }

    pub fn lexicon_len(&self) -> usize {
        self.lexicon.len()
    }

    pub fn exceptions_len(&self) -> usize {
        self.exceptions.len()
    }

    pub fn is_known(&self, word: &str) -> bool {
        self.lexicon.contains(word)
    }

    /// Lexicon words in sorted order; used for sampling in tests and tools.
    pub fn lexicon_words(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.lexicon.iter().map(String::as_str).collect();
        words.sort_unstable();
        words
    }

    pub fn exception_forms(&self) -> impl Iterator<Item = (&str, &str)> {
        self.exceptions.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn lemmatize(&self, token: &str) -> String {
        if let Some(lemma) = self.exceptions.get(token) {
            return lemma.clone();
        }
        if self.lexicon.contains(token) {
            return token.to_owned();
        }
        for candidate in candidates(token) {
            if self.lexicon.contains(&candidate) {
                return self.exceptions.get(&candidate).cloned().unwrap_or(candidate);
            }
        }
        token.to_owned()
    }
}

fn candidates(token: &str) -> impl Iterator<Item = String> + '_ {
    let strip = move |&(suffix, with): &(&str, &str)| {
        token
            .strip_suffix(suffix)
            .filter(|stem| !stem.is_empty())
            .map(|stem| format!("{stem}{with}"))
    };
    let undouble = ["ed", "ing"].into_iter().filter_map(move |suffix| {
        let stem = token.strip_suffix(suffix)?;
        let bytes = stem.as_bytes();
        let n = bytes.len();
        (n >= 3 && bytes[n - 1] == bytes[n - 2] && !b"aeiou".contains(&bytes[n - 1]))
            .then(|| stem[..n - 1].to_owned())
    });
    NOUN_RULES
        .iter()
        .filter_map(strip)
        .chain(VERB_RULES.iter().filter_map(strip))
        .chain(undouble)
}

/// Non-empty, non-comment lines of a bundled data file.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}
