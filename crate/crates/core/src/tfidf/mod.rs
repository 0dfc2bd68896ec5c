//! tf-idf baseline: stopword removal, Porter stemming, smooth-idf weighting and sparse cosine
//! ranking.

mod model;
mod porter;
mod stopwords;

pub use model::{analyze, rank_tfidf, smooth_idf, SparseVector, TfidfModel};
pub use porter::porter_stem;
pub use stopwords::{is_stopword, remove_stopwords, stopwords};
