//! Secret-key-rate modelling and modulation-variance optimisation for
//! Gaussian-modulated continuous-variable QKD with a fixed error-correcting
//! code.

pub mod cli;
pub mod error;
pub mod fer;
pub mod model;
pub mod numeric;
pub mod optimize;
pub mod recon;

pub use error::{Error, Result};
