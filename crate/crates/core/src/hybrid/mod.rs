//! The hybrid classifier: standardizer → 4-qubit circuit → dense softmax head,
//! trained end to end with one Adam state over all parameters.

mod model;
mod persist;
mod train;

pub use model::{
    hybrid_forward, loss_and_gradients, loss_and_gradients_with, mean_loss, predict, BatchGradients, HybridModel,
    Parallelism,
};
pub use persist::{load_model, model_from_json, model_to_json, save_model, MODEL_FORMAT_VERSION};
pub use train::{
    evaluate_model, fit, predict_probabilities, stratified_split, EpochStats, LabeledDataset, TrainReport,
    TrainingConfig,
};
