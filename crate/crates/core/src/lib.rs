//! Measurement-free fault-tolerant error correction on the 9-qubit
//! Bacon-Shor code: circuits, exact fault counting, a state-vector oracle
//! and threshold arithmetic.

pub mod analytics;
pub mod circuit;
pub mod code;
pub mod error;
pub mod fault;
pub mod gadgets;
pub mod oracle;
pub mod pauli;
pub mod report;
pub mod timing;

pub use error::Error;
