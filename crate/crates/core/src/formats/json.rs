use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::plaintext::{PlainDoc, PlainMention, PlainToken};
use super::{reconstruct_conllu, to_plaintext, Converted, FormatError, EMPTY_PREFIX};
use crate::model::Document;

/// One document of the JSON interchange format. Offsets are 0-based and
/// inclusive; empty nodes appear as `##`-prefixed tokens.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonDoc {
    pub doc_id: String,
    pub tokens: Vec<String>,
    pub clusters_token_offsets: Vec<Vec<[usize; 2]>>,
    pub clusters_text_mentions: Vec<Vec<String>>,
}

fn mention_text(tokens: &[String], start: usize, end: usize) -> String {
    tokens[start..=end].join(" ")
}

pub fn to_json(doc: &Document) -> Converted<JsonDoc> {
    let Converted { value: plain, warnings } = to_plaintext(doc);
    let tokens: Vec<String> = plain.tokens.iter().map(PlainToken::rendered_surface).collect();
    let clusters = plain.clusters().expect("generated brackets balance");
    let clusters_token_offsets: Vec<Vec<[usize; 2]>> =
        clusters.iter().map(|(_, spans)| spans.iter().map(|&(s, e)| [s, e]).collect()).collect();
    let clusters_text_mentions = clusters_token_offsets
        .iter()
        .map(|spans| spans.iter().map(|&[s, e]| mention_text(&tokens, s, e)).collect())
        .collect();
    Converted { value: JsonDoc { doc_id: doc.doc_id.clone(), tokens, clusters_token_offsets, clusters_text_mentions }, warnings }
}

impl JsonDoc {
    /// Checks offsets and mention texts and returns the equivalent plaintext
    /// document.
    pub fn to_plain(&self) -> Result<PlainDoc, FormatError> {
        if self.clusters_text_mentions.len() != self.clusters_token_offsets.len() {
            return Err(FormatError::ClusterShape {
                detail: alloc::format!(
                    "{} offset clusters but {} text clusters",
                    self.clusters_token_offsets.len(),
                    self.clusters_text_mentions.len()
                ),
            });
        }
        let mut mentions = Vec::new();
        for (c, (spans, texts)) in self.clusters_token_offsets.iter().zip(&self.clusters_text_mentions).enumerate() {
            if spans.len() != texts.len() {
                return Err(FormatError::ClusterShape {
                    detail: alloc::format!("cluster {c}: {} offsets but {} texts", spans.len(), texts.len()),
                });
            }
            for (m, (&[start, end], text)) in spans.iter().zip(texts).enumerate() {
                if start > end || end >= self.tokens.len() {
                    return Err(FormatError::OffsetOutOfBounds { cluster: c, mention: m, start, end, len: self.tokens.len() });
                }
                let expected = mention_text(&self.tokens, start, end);
                if &expected != text {
                    return Err(FormatError::TextMismatch { cluster: c, mention: m, expected, found: text.clone() });
                }
                mentions.push(PlainMention { entity_id: alloc::format!("e{}", c + 1), start, end });
            }
        }
        let tokens = self
            .tokens
            .iter()
            .map(|t| match t.strip_prefix(EMPTY_PREFIX) {
                Some(rest) => PlainToken::new(rest, true),
                None => PlainToken::new(t.as_str(), false),
            })
            .collect();
        Ok(PlainDoc::from_parts(tokens, &mentions))
    }
}

/// Projects the clusters of `j` onto `skeleton`, which supplies the tokens
/// and trees.
pub fn from_json(j: &JsonDoc, skeleton: &Document) -> Result<Converted<Document>, FormatError> {
    reconstruct_conllu(skeleton, &j.to_plain()?)
}
