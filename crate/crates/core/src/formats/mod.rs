//! Plaintext and JSON interchange formats, the output cleaner and the
//! reverse conversion onto CoNLL-U.
//!
//! A document is linearized into one token sequence: regular words in order,
//! each followed by the empty nodes whose parent it is. Empty nodes without a
//! regular parent in the same sentence stay at their own position. Mentions
//! become inclusive token ranges over that sequence.

mod cleaner;
mod json;
mod plaintext;
mod reconstruct;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use unicode_normalization::UnicodeNormalization;

use crate::matching::TokenMismatch;
use crate::model::{Document, NodeId, Parent};

pub use cleaner::{align_tokens, clean_output, edit_distance, Cleaned, CleanerConfig, EditOp};
pub use json::{from_json, to_json, JsonDoc};
pub use plaintext::{
    from_plaintext, to_plaintext, AnnotationItem, AnnotationKind, PlainDoc, PlainError, PlainErrorKind, PlainMention,
    PlainToken,
};
pub use reconstruct::{reconstruct_conllu, strip_annotations};

/// Prefix marking an empty node in both interchange formats.
pub const EMPTY_PREFIX: &str = "##";
/// Spaces inside forms are rendered as no-break spaces so tokens stay
/// space-separated.
pub const NBSP: char = '\u{a0}';

/// A conversion result together with non-fatal notes.
#[derive(Clone, Debug, PartialEq)]
pub struct Converted<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FormatError {
    Plain(PlainError),
    OffsetOutOfBounds { cluster: usize, mention: usize, start: usize, end: usize, len: usize },
    TextMismatch { cluster: usize, mention: usize, expected: String, found: String },
    ClusterShape { detail: String },
    Mismatch(TokenMismatch),
    Refused { doc_id: String, limit: usize, reference_len: usize },
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Plain(e) => e.fmt(f),
            FormatError::OffsetOutOfBounds { cluster, mention, start, end, len } => write!(
                f,
                "cluster {cluster}, mention {mention}: offsets [{start}, {end}] outside a document of {len} tokens"
            ),
            FormatError::TextMismatch { cluster, mention, expected, found } => {
                write!(f, "cluster {cluster}, mention {mention}: text {found:?} does not match tokens {expected:?}")
            }
            FormatError::ClusterShape { detail } => f.write_str(detail),
            FormatError::Mismatch(e) => e.fmt(f),
            FormatError::Refused { doc_id, limit, reference_len } => write!(
                f,
                "document {doc_id}: more than {limit} token edits needed to match the {reference_len}-token \
                 reference; the output probably belongs to another document"
            ),
        }
    }
}

impl core::error::Error for FormatError {}

impl From<PlainError> for FormatError {
    fn from(e: PlainError) -> Self {
        FormatError::Plain(e)
    }
}

impl From<TokenMismatch> for FormatError {
    fn from(e: TokenMismatch) -> Self {
        FormatError::Mismatch(e)
    }
}

/// Comparison key for surface tokens: NFC, spaces folded into NBSP.
pub fn token_key(s: &str) -> String {
    s.nfc().map(|c| if c == ' ' { NBSP } else { c }).collect()
}

pub(crate) fn surface_of(form: &str) -> String {
    form.replace(' ', "\u{a0}")
}

/// Node ids of a document in interchange-token order.
pub fn linearize(doc: &Document) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(doc.word_count() + doc.empty_count());
    for (s, sentence) in doc.sentences.iter().enumerate() {
        // (word after which the empty node goes, its id)
        let mut empties: Vec<(u32, NodeId)> = sentence
            .nodes
            .iter()
            .filter(|n| n.is_empty())
            .map(|n| {
                let anchor = match n.parent() {
                    Some(Parent::Node(p)) if !p.is_empty() && sentence.node(p.major, 0).is_some() => p.major,
                    _ => n.id.major,
                };
                (anchor, NodeId::new(s, n.id.major, n.id.minor))
            })
            .collect();
        empties.sort();
        let mut pending = empties.into_iter().peekable();
        while let Some(&(anchor, id)) = pending.peek() {
            if anchor != 0 {
                break;
            }
            out.push(id);
            pending.next();
        }
        for word in sentence.words() {
            out.push(NodeId::new(s, word.id.major, 0));
            while let Some(&(anchor, id)) = pending.peek() {
                if anchor != word.id.major {
                    break;
                }
                out.push(id);
                pending.next();
            }
        }
        out.extend(pending.map(|(_, id)| id));
    }
    out
}
