//! Softmax regression and small ReLU networks over sparse or one-hot inputs.

pub mod checkpoint;
pub mod features;
pub mod history;
pub mod last_layer;
pub mod net;
pub mod pipeline;
pub mod train;

pub use features::{FeatureSet, LabelMap, Row};
pub use history::{HistoryPoint, TrainHistory};
pub use last_layer::{last_layer_curve, last_layer_gcws};
pub use net::{sparse_binary_forward, Layer, Model, NetConfig};
pub use pipeline::{pipeline, Preproc};
pub use train::{train, train_with_hook, Labelled};
