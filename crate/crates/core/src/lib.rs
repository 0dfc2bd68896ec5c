//! Word embeddings learned on software Q&A text, transferred to relevance ranking of short
//! texts and to comment classification.
//!
//! The numeric core is generic over [`Real`] (`f32`, `f64`); counting metrics are generic over
//! [`Field`] so they can also run in exact rational arithmetic. The aliases at the crate root
//! fix the scalar to `f64` (or `f32` where suffixed).

pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod ranking;
pub mod scalar;
pub mod svm;
pub mod tfidf;
pub mod vectorize;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

pub type EmbeddingModel = embedding::EmbeddingModel<f64>;
pub type EmbeddingModelF32 = embedding::EmbeddingModel<f32>;
pub type SgnsWeights = embedding::SgnsWeights<f64>;
pub type Trainer = embedding::Trainer<f64>;
pub type SentenceVector = vectorize::SentenceVector<f64>;
pub type SentenceVectorF32 = vectorize::SentenceVector<f32>;
pub type RankedList = ranking::RankedList<f64>;
pub type KernelSpec = svm::KernelSpec<f64>;
pub type SvmConfig = svm::SvmConfig<f64>;
pub type SvmModel = svm::SvmModel<f64>;
pub type SvmModelF32 = svm::SvmModel<f32>;
pub type CvConfig = svm::CvConfig<f64>;
