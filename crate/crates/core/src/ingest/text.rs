//! Text cleaning: HTML stripping, sentence splitting and token normalization.

use serde::{Deserialize, Serialize};

/// A cleaned, tokenized sentence.
///
/// `text` is lowercase, holds only letters, digits and single spaces, and never contains a
/// digit-only word; `tokens` is exactly `text.split(' ')` (empty for empty text).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanSentence {
    pub text: String,
    pub tokens: Vec<String>,
    pub char_len: usize,
    pub origin_id: String,
}

impl CleanSentence {
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Removes every `<...>` span, decodes the remaining HTML entities and collapses whitespace.
///
/// An unclosed `<` swallows the rest of the input.
pub fn strip_html(text: &str) -> String {
    let mut kept = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        kept.push_str(&rest[..open]);
        // tags separate words: "<p>a</p><p>b</p>" must not fuse into "ab"
        kept.push(' ');
        match rest[open..].find('>') {
            Some(close) => rest = &rest[open + close + 1..],
            None => {
                log::debug!("unclosed '<' at byte {open}; dropping remainder");
                rest = "";
            }
        }
    }
    kept.push_str(rest);
    let decoded = html_escape::decode_html_entities(&kept);
    collapse_whitespace(&decoded)
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Words that end with a period without ending the sentence (compared without the trailing
/// period, lowercase).
pub const ABBREVIATIONS: &[&str] = &[
    "e.g", "i.e", "etc", "vs", "cf", "approx", "fig", "eq", "no", "mr", "mrs", "ms", "dr",
    "prof", "jr", "sr", "st",
];

fn is_abbreviation(word: &str) -> bool {
    let word = word.trim_end_matches('.');
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// Rule-based sentence splitter.
///
/// A sentence ends after a run of `.`, `!` or `?` that is followed by whitespace and then an
/// uppercase letter or a digit, or by the end of the text. A period closing a known
/// abbreviation never ends a sentence. Outputs are trimmed; dropping whitespace from the
/// concatenated outputs gives the input with whitespace dropped.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !matches!(c, '.' | '!' | '?') {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < chars.len() && matches!(chars[j + 1].1, '.' | '!' | '?') {
            j += 1;
        }
        let end = chars.get(j + 1).map_or(text.len(), |&(b, _)| b);
        let boundary = if j + 1 == chars.len() {
            true
        } else if chars[j + 1].1.is_whitespace() {
            let next = chars[j + 1..].iter().find(|(_, ch)| !ch.is_whitespace());
            match next {
                None => true,
                Some(&(_, ch)) => ch.is_uppercase() || ch.is_numeric(),
            }
        } else {
            false
        };
        let boundary = boundary && !(c == '.' && i == j && {
            let word_start = text[..chars[i].0]
                .rfind(char::is_whitespace)
                .map_or(0, |p| p + 1);
            is_abbreviation(&text[word_start..end])
        });
        if boundary {
            let piece = text[start..end].trim();
            if !piece.is_empty() {
                out.push(piece.to_string());
            }
            start = end;
        }
        i = j + 1;
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
    out
}

/// Lowercases, turns every non-letter/non-digit character into a space, and drops digit-only
/// words. `char_len` counts the characters of the resulting text.
pub fn normalize(sentence: &str) -> CleanSentence {
    normalize_with_origin(sentence, String::new())
}

pub fn normalize_with_origin(sentence: &str, origin_id: String) -> CleanSentence {
    let mut mapped = String::with_capacity(sentence.len());
    for c in sentence.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() && !c.is_uppercase() {
            mapped.push(c);
        } else {
            mapped.push(' ');
        }
    }
    let tokens: Vec<String> = mapped
        .split_whitespace()
        .filter(|t| !t.chars().all(char::is_numeric))
        .map(str::to_string)
        .collect();
    let text = tokens.join(" ");
    CleanSentence {
        char_len: text.chars().count(),
        text,
        tokens,
        origin_id,
    }
}

/// Full preprocessing of one dump document body: strip HTML, split, normalize.
/// Sentences with no tokens are dropped.
pub fn preprocess_document(body: &str, origin_id: &str) -> Vec<CleanSentence> {
    split_sentences(&strip_html(body))
        .iter()
        .map(|s| normalize_with_origin(s, origin_id.to_string()))
        .filter(|s| !s.is_empty())
        .collect()
}

/// True iff `token` obeys the token grammar: non-empty, lowercase alphanumeric, not all digits.
pub fn is_valid_token(token: &str) -> bool {
    !token.is_empty()
        && token.chars().all(|c| c.is_alphanumeric() && !c.is_uppercase())
        && !token.chars().all(char::is_numeric)
}
