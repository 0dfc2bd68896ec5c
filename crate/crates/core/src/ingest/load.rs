//! Loaders for target-platform text files.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::text::{normalize_with_origin, CleanSentence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommentLabel {
    Informative,
    NonInformative,
}

impl CommentLabel {
    /// `+1` for informative, `-1` otherwise.
    pub fn sign(self) -> i8 {
        match self {
            CommentLabel::Informative => 1,
            CommentLabel::NonInformative => -1,
        }
    }

    pub fn is_positive(self) -> bool {
        self == CommentLabel::Informative
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn lines(path: &Path) -> Result<Vec<String>> {
    open(path)?
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}

fn is_url(word: &str) -> bool {
    let lower = word.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Drops URL words, then normalizes.
pub fn clean_tweet(line: &str, origin_id: String) -> CleanSentence {
    let without_urls: Vec<&str> = line.split_whitespace().filter(|w| !is_url(w)).collect();
    normalize_with_origin(&without_urls.join(" "), origin_id)
}

/// One tweet per line. `origin_id` is the 1-based line number; blank lines yield empty sentences
/// so that ids stay aligned with the file.
pub fn load_tweets(path: impl AsRef<Path>) -> Result<Vec<CleanSentence>> {
    Ok(lines(path.as_ref())?
        .iter()
        .enumerate()
        .map(|(i, line)| clean_tweet(line, (i + 1).to_string()))
        .collect())
}

/// One already-split sentence per line (the output of corpus ingestion). Lines with no tokens
/// are dropped; `origin_id` is the 1-based line number.
pub fn load_sentences(path: impl AsRef<Path>) -> Result<Vec<CleanSentence>> {
    Ok(lines(path.as_ref())?
        .iter()
        .enumerate()
        .map(|(i, line)| normalize_with_origin(line, (i + 1).to_string()))
        .filter(|s| !s.is_empty())
        .collect())
}

/// Parses a `label<TAB>text` file with labels `1` (informative) and `0`. Empty lines are
/// skipped.
pub fn load_labeled_comments(path: impl AsRef<Path>) -> Result<Vec<(CleanSentence, CommentLabel)>> {
    parse_labeled_comments(&lines(path.as_ref())?)
}

pub(crate) fn parse_labeled_comments<S: AsRef<str>>(
    lines: &[S],
) -> Result<Vec<(CleanSentence, CommentLabel)>> {
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        let line = line.as_ref();
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (label, text) = line.split_once('\t').ok_or_else(|| Error::Format {
            line: lineno,
            message: "expected label<TAB>text".into(),
        })?;
        let label = parse_binary_label(label).ok_or_else(|| Error::Format {
            line: lineno,
            message: format!("bad label {label:?}, expected 1 or 0"),
        })?;
        let label = if label {
            CommentLabel::Informative
        } else {
            CommentLabel::NonInformative
        };
        out.push((normalize_with_origin(text, lineno.to_string()), label));
    }
    Ok(out)
}

pub(crate) fn parse_binary_label(s: &str) -> Option<bool> {
    match s.trim() {
        "1" => Some(true),
        "0" => Some(false),
        _ => None,
    }
}

/// Reads one `1`/`0` label per line (rater files, tweet relevance labels).
pub fn load_binary_labels(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    lines(path.as_ref())?
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_binary_label(l).ok_or_else(|| Error::Format {
                line: i + 1,
                message: format!("bad label {l:?}, expected 1 or 0"),
            })
        })
        .collect()
}
