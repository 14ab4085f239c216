//! Kernel hashing toolkit: the pGMM kernel, generalized consistent weighted
//! sampling (GCWS), b-bit one-hot encoding, count-sketch compression,
//! normalized random Fourier features, a small sparse-input neural trainer,
//! and Monte Carlo validators for the hashing guarantees.

pub mod dump;
pub mod error;
pub mod gcws;
pub mod kernel;
pub mod learn;
pub mod libsvm;
pub mod nrff;
pub mod preprocess;
pub mod rng;
pub mod sketch;
pub mod synth;
pub mod validate;
pub mod vector;

pub use error::{Error, Result};
pub use gcws::{gcws_hash, GcwsConfig, HashSample, HashedVector};
pub use kernel::{cosine, gmm_kernel, pgmm_kernel, rbf_kernel};
pub use learn::{FeatureSet, Model, NetConfig, Preproc, Row, TrainHistory};
pub use libsvm::Dataset;
pub use nrff::{rff_features, RffConfig, RffFeatures};
pub use sketch::{count_sketch, one_hot, CountSketchConfig, EncodedFeatures, SketchedFeatures};
pub use validate::{run_suite, McReport, Suite, SuiteConfig};
pub use vector::{sign_split, SparseVector, TransformedVector};
