//! EEG emotion classification with a hybrid quantum-classical model.
//!
//! The crate is organised the way the pipeline runs:
//!
//! - [`dsp`]: Butterworth bandpass design, zero-phase filtering, Welch and
//!   FFT spectra, delta/theta/alpha/beta band powers and the standardizer.
//! - [`qcircuit`]: an exact statevector simulator for the 4-qubit circuit,
//!   the feature encoding, the layered variational ansatz and parameter-shift
//!   gradients.
//! - [`neural`]: the dense ReLU/softmax head, cross-entropy and Adam.
//! - [`hybrid`]: the composed model, joint training loop and model files.
//! - [`eval`]: confusion matrix, precision/recall/F1, ROC/AUC and MAE.
//! - [`io`]: CSV formats, the synthetic EEG generator and pipeline config.
//! - [`cli`]: the `qeeg` command-line driver.
//!
//! Runnable walkthroughs for each stage live in `examples/`.

pub mod cli;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod hybrid;
pub mod io;
pub mod neural;
pub mod qcircuit;

pub use error::{Error, Result};
