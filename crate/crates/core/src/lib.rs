//! Device-independent discrimination of quantum states.
//!
//! The referee sees only classical input/output statistics. A certification
//! round self-tests the measurement devices; a discrimination round then uses
//! them as Pauli measurements on the unknown state.

pub mod certify;
pub mod correlations;
pub mod discriminate;
pub mod error;
pub mod guessing;
pub mod netsim;
pub mod qcore;

pub use error::{Error, Result};
