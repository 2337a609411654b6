//! Variational quantum classifier toolkit.
//!
//! The pipeline encodes PCA-compressed, min-max scaled event features as
//! qubit phases, applies a trainable RY/RZ + CZ circuit, reads the parity of
//! half of the register and trains the angles with SPSA. Readout noise,
//! calibration-matrix mitigation and ROC/AUC evaluation complete the loop.
//!
//! Module map:
//! - [`sim`]: dense statevector simulator and shot sampling
//! - [`circuits`]: feature map, variational ansatz, half-measurement prep
//! - [`classifier`]: discriminant, loss and training
//! - [`optimizer`]: SPSA minimization with Spall gain schedules
//! - [`preprocess`]: PCA and min-max scaling onto ±π
//! - [`noise`]: readout noise and mitigation
//! - [`eval`]: ROC, AUC, bootstrap
//! - [`data`]: event tables and the synthetic generator
//! - [`run`]: configuration, run artifacts and the batch protocol behind the `vqc` binary

pub mod circuits;
pub mod classifier;
pub mod data;
pub mod error;
pub mod eval;
pub mod noise;
pub mod optimizer;
pub mod preprocess;
pub mod run;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
