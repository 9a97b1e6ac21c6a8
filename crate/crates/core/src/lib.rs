//! Entanglement between a measured two-level system and its meter when the
//! meter is damped by a squeezed reservoir.

pub mod error;
pub mod fock;
pub mod linalg;
pub mod measures;
pub mod model;
pub mod state;

pub use error::{Error, Result};
