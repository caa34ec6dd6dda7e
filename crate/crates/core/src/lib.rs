//! Computationally rational foveated game agent.
//!
//! The crate bundles pausable micro-games ([`env`]), foveated perception with a
//! persistence-of-vision memory ([`fovea`]), EMMA oculomotor timing ([`emma`]),
//! the dual-head Q-learning agent ([`agent`]), episode logs ([`log`]) and the
//! evaluation analytics ([`saliency`]).

pub mod agent;
pub mod emma;
pub mod env;
pub mod error;
pub mod fovea;
pub mod frame;
pub mod log;
pub mod saliency;

pub use error::{Error, Result};
