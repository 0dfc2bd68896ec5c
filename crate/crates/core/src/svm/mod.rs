//! Binary SVM trained by SMO, with normalized-tf baseline features and k-fold cross-validation.

mod cv;
mod features;
mod kernel;
mod model;
mod smo;

pub use cv::{cross_validate, CvConfig, CvReport, FoldAssignment, FoldResult, Features, MAX_PARTITION_ATTEMPTS};
pub use features::{normalized_tf_features, NtfVocabulary, NTF_MIN_DOCUMENT_FREQUENCY};
pub use kernel::KernelSpec;
pub use model::{Prediction, SvmModel};
pub use smo::{dual_objective, solve_smo, solve_smo_weighted, train_smo, SmoSolution, SvmConfig};
