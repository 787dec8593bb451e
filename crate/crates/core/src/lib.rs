//! Word vectors from co-occurrence statistics and from random hyperbolic
//! graphs.
//!
//! The crate covers both directions of the pipeline:
//!
//! * text → co-occurrence counts → PMI / shifted PMI / σSPMI → truncated SVD
//!   → word embeddings ([`corpus`], [`pmi`], [`spectral`]);
//! * hyperbolic disk → random hyperbolic graph → connection-probability
//!   operator `σ(R − x)` → node embeddings ([`hyperbolic`], [`spectral`]);
//!
//! and joins them by aligning node embeddings to word embeddings under an
//! unknown orthogonal map and permutation ([`alignment`]). A skip-gram
//! baseline ([`sgns`]) and the similarity / POS-tagging evaluation
//! ([`eval`]) complete the comparison; [`pipeline`] wires the stages to
//! files for the `rhgvec` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alignment;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod histogram;
pub mod hyperbolic;
pub mod math;
pub mod pipeline;
pub mod pmi;
pub mod rng;
pub mod sgns;
pub mod spectral;

pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};
