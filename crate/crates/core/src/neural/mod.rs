//! Dense classification head (ReLU hidden layers, softmax output),
//! categorical cross-entropy and the Adam optimizer.

mod adam;
mod network;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use network::{
    backward_network, cross_entropy, forward_network, init_network, softmax, Activation, DenseLayer, ForwardCache,
    LayerGradient, Network, NetworkGradients, NetworkSpec,
};
