//! Synthesis and execution of controllers for LTL specifications over linear
//! integer or real arithmetic.
//!
//! The pipeline: [`frontend`] parses a specification and extracts its
//! literals, [`booleanize`] discovers the environment partitions and their
//! reaction sets with an SMT solver ([`smt`]), [`synth`] solves the resulting
//! Boolean safety game and extracts a Mealy controller, and [`runtime`] drives
//! that controller on concrete inputs, producing concrete outputs through SMT
//! model extraction. [`oracle`] holds brute-force reference implementations
//! over bounded windows.

pub mod booleanize;
pub mod error;
pub mod frontend;
pub mod oracle;
pub mod runtime;
pub mod smt;
pub mod synth;
pub mod theory;

pub use error::{Error, Result};
