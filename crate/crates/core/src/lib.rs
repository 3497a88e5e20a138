//! Evaluation, format conversion and corpus analysis for multilingual
//! coreference data stored as CoNLL-U with CorefUD entity annotations.
//!
//! The crate is `no_std` (it needs `alloc`). File IO, JSON encoding and the
//! command-line front end live in the `corefud-cli` companion crate.
//!
//! Layout:
//! - [`model`]: CoNLL-U object model, parser, serializer, mention heads.
//! - [`matching`]: gold/predicted mention alignment, including zeros.
//! - [`metrics`]: MUC, B³, CEAF-e, BLANC, LEA, CoNLL, MOR, MD-h, zero score.
//! - [`formats`]: plaintext and JSON interchange, output cleaner,
//!   reconstruction back onto CoNLL-U.
//! - [`analysis`]: corpus statistics, UPOS-factorized scores, long-range
//!   curves and split sampling.
#![no_std]
#![allow(clippy::type_complexity)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod analysis;
pub mod formats;
pub mod matching;
pub mod metrics;
pub mod model;

pub use matching::{MatchRegime, MentionAlignment, ZeroWeight};
pub use metrics::{MetricId, ScoreConfig, ScoreReport, SingletonMode, PRF};
pub use model::{Corpus, Document, Entity, Mention, Node, NodeId, Sentence};
