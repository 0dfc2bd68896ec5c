//! Skip-gram word embeddings: vocabulary, negative sampling, training and the word2vec text
//! format.

mod format;
mod matrix;
mod model;
mod sampling;
mod sgns;
mod train;
mod vocab;

pub use format::{load_model, read_model, save_model, write_model};
pub use matrix::Matrix;
pub use model::EmbeddingModel;
pub use sampling::{NegativeSamplingTable, MAX_COLLISION_DRAWS, UNIGRAM_POWER};
pub use sgns::{log_sigmoid, sgns_gradient, sgns_pair_loss, sgns_step, sigmoid, SgnsGradient, SgnsWeights};
pub use train::{train, Trainer, TrainingConfig, DEFAULT_SUBSAMPLE_THRESHOLD, MIN_LR_FRACTION};
pub use vocab::Vocabulary;
