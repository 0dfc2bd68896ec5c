//! Corpus ingestion: dump parsing and text preprocessing.

mod dump;
mod load;
mod text;

pub use dump::{parse_dump, DocumentKind, DumpKind, DumpReader, DumpStats, RawDocument, Source};
pub use load::{
    clean_tweet, load_binary_labels, load_labeled_comments, load_sentences, load_tweets,
    CommentLabel,
};
pub use text::{
    is_valid_token, normalize, normalize_with_origin, preprocess_document, split_sentences,
    strip_html, CleanSentence, ABBREVIATIONS,
};
