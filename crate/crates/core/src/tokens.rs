//! Token counting used for the length filters and length statistics.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenMode {
    /// Space-separated lexemes of the canonical printing.
    #[default]
    Whitespace,
    /// Byte length.
    Char,
    /// Greedy longest match against a vocabulary file.
    Vocab,
}

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("cannot read vocabulary {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("vocabulary {0} has no entries")]
    Empty(String),
}

/// Subword vocabulary: one entry per line. A leading `▁` stands for a space,
/// the sentencepiece convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocab {
    entries: HashSet<String>,
    max_len: usize,
}

impl Vocab {
    pub fn load(path: &Path) -> Result<Self, VocabError> {
        let text = std::fs::read_to_string(path).map_err(|source| VocabError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_lines(text.lines()).ok_or_else(|| VocabError::Empty(path.display().to_string()))
    }

    pub fn from_lines<'a>(lines: impl IntoIterator<Item = &'a str>) -> Option<Self> {
        let entries: HashSet<String> = lines
            .into_iter()
            // sentencepiece vocab exports carry a score column
            .map(|l| l.split('\t').next().unwrap_or(""))
            .filter(|l| !l.is_empty())
            .map(|l| l.replace('\u{2581}', " "))
            .collect();
        let max_len = entries.iter().map(|e| e.len()).max()?;
        Some(Vocab { entries, max_len })
    }

    /// Greedy longest-prefix segmentation; an unmatched character costs one token.
    pub fn count(&self, s: &str) -> usize {
        let mut count = 0;
        let mut rest = s;
        while !rest.is_empty() {
            let mut take = 0;
            let mut end = rest.len().min(self.max_len);
            while end > 0 {
                if rest.is_char_boundary(end) && self.entries.contains(&rest[..end]) {
                    take = end;
                    break;
                }
                end -= 1;
            }
            if take == 0 {
                take = rest.chars().next().map_or(1, char::len_utf8);
            }
            rest = &rest[take..];
            count += 1;
        }
        count
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum TokenCounter {
    #[default]
    Whitespace,
    Char,
    Vocab(Vocab),
}

impl TokenCounter {
    pub fn from_mode(mode: TokenMode, vocab_path: Option<&Path>) -> Result<Self, VocabError> {
        Ok(match mode {
            TokenMode::Whitespace => TokenCounter::Whitespace,
            TokenMode::Char => TokenCounter::Char,
            TokenMode::Vocab => {
                let path = vocab_path.ok_or_else(|| VocabError::Empty("<none>".into()))?;
                TokenCounter::Vocab(Vocab::load(path)?)
            }
        })
    }

    pub fn count(&self, s: &str) -> usize {
        match self {
            TokenCounter::Whitespace => s.split_whitespace().count(),
            TokenCounter::Char => s.len(),
            TokenCounter::Vocab(v) => v.count(s),
        }
    }
}
