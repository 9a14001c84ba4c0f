use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedText {
    pub tokens: Vec<String>,
}

impl TokenizedText {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for TokenizedText {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenizedText {
            tokens: iter.into_iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }
}

/// Lowercases, splits on whitespace and strips punctuation from both ends
/// of every token; tokens left empty are dropped.
pub fn tokenize(text: &str) -> TokenizedText {
    text.split_whitespace()
        .map(|t| {
            t.trim_matches(|c: char| c.is_ascii_punctuation())
                .to_lowercase()
        })
        .filter(|t| !t.is_empty())
        .collect()
}
