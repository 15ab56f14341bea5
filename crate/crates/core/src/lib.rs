//! Graph-signal sampling and reconstruction with sampling-set-adaptive graph
//! Fourier transforms that have the spectral folding property.

pub mod error;
pub mod gft;
pub mod linalg;
pub mod reconstruct;
pub mod rng;
pub mod sampling;
pub mod experiment;
pub mod io;
pub mod verify;

pub use error::{Error, Result};
