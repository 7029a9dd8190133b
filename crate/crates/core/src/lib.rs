//! Shortest-dependency-path relation extraction for clinical text.
//!
//! The pipeline has three stages:
//!
//! 1. [`parser`]: a greedy arc-standard dependency parser ([`transition`])
//!    trained from gold CoNLL-U trees ([`treebank`]).
//! 2. [`sdp`]: the shortest path between two concepts in the undirected
//!    dependency tree, turned into aligned word / concept / label / tag
//!    sequences.
//! 3. [`relex`]: an LSTM over the four embedded channels that assigns one
//!    of nine relation labels to each concept pair.
//!
//! [`corpus`] reads i2b2-2010 style annotations and builds candidate pairs;
//! [`harness`] ties the stages together with cross-validation, metrics,
//! a paired t-test and a synthetic corpus generator.

pub mod concept;
pub mod corpus;
pub mod error;
pub mod harness;
pub mod nn;
pub mod parser;
pub mod persist;
pub mod relex;
pub mod sdp;
pub mod transition;
pub mod treebank;
pub mod vocab;

pub use error::{Error, Result};
