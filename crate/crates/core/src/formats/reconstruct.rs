use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::plaintext::PlainDoc;
use super::{token_key, Converted, FormatError};
use crate::matching::TokenMismatch;
use crate::model::{Document, EnhancedDep, Entity, Mention, Node, NodeId, Parent};

/// The document as handed to a system: no empty nodes, no enhanced edges
/// into them, no entities.
pub fn strip_annotations(doc: &Document) -> Document {
    let mut out = doc.clone();
    out.entities.clear();
    for sentence in &mut out.sentences {
        sentence.nodes.retain(|n| !n.is_empty());
        for node in &mut sentence.nodes {
            node.deps.retain(|d| !matches!(d.parent, Parent::Node(p) if p.is_empty()));
        }
    }
    out
}

/// Rebuilds a CoNLL-U document from the tokens and brackets of `cleaned`.
///
/// Regular tokens must equal the words of `input`. Existing empty nodes and
/// entities of `input` are discarded; every `##` token becomes an empty node
/// numbered after, and attached to, the closest preceding word (`N.1`,
/// `N.2`, ...), with an unlabeled enhanced edge. Mentions crossing a
/// sentence boundary are cut at the end of their first sentence.
pub fn reconstruct_conllu(input: &Document, cleaned: &PlainDoc) -> Result<Converted<Document>, FormatError> {
    let mentions = cleaned.mentions()?;
    let mut doc = strip_annotations(input);
    let words: Vec<NodeId> = doc
        .sentences
        .iter()
        .enumerate()
        .flat_map(|(s, sentence)| sentence.words().map(move |n| NodeId::word(s, n.id.major)))
        .collect();
    let regular = cleaned.tokens.iter().filter(|t| !t.is_empty).count();
    if regular != words.len() {
        return Err(TokenMismatch {
            doc_id: doc.doc_id.clone(),
            detail: format!("{} regular tokens for {} words", regular, words.len()),
        }
        .into());
    }

    let mut node_of = Vec::with_capacity(cleaned.tokens.len());
    let mut next_word = 0;
    let mut last: Option<NodeId> = None;
    let mut minors: BTreeMap<(usize, u32), u32> = BTreeMap::new();
    let mut inserted: Vec<Node> = Vec::new();
    for (i, token) in cleaned.tokens.iter().enumerate() {
        if !token.is_empty {
            let id = words[next_word];
            next_word += 1;
            let form = &doc.sentences[id.sentence].node(id.major, 0).expect("word exists").form;
            if token_key(form) != token_key(&token.surface) {
                return Err(TokenMismatch {
                    doc_id: doc.doc_id.clone(),
                    detail: format!("token {i} is {:?}, expected {:?}", token.surface, form),
                }
                .into());
            }
            last = Some(id);
            node_of.push(id);
            continue;
        }
        let (sentence, major, parent) = match last {
            Some(w) => (w.sentence, w.major, Parent::Node(w)),
            None => (0, 0, Parent::Root),
        };
        if doc.sentences.is_empty() {
            return Err(TokenMismatch { doc_id: doc.doc_id.clone(), detail: "empty node in an empty document".into() }.into());
        }
        let minor = minors.entry((sentence, major)).or_insert(0);
        *minor += 1;
        let id = NodeId::new(sentence, major, *minor);
        let mut node = Node::bare(id, token.surface.as_str());
        node.deps.push(EnhancedDep { parent, label: None });
        inserted.push(node);
        node_of.push(id);
    }
    for node in inserted {
        doc.sentences[node.id.sentence].nodes.push(node);
    }
    for sentence in &mut doc.sentences {
        sentence.nodes.sort_by_key(|n| n.id);
    }

    let mut warnings = Vec::new();
    let mut entities: Vec<Entity> = Vec::new();
    let mut slot: BTreeMap<String, usize> = BTreeMap::new();
    for m in mentions {
        let first = node_of[m.start];
        let mut span: Vec<NodeId> = node_of[m.start..=m.end].iter().copied().filter(|n| n.sentence == first.sentence).collect();
        if span.len() != m.end - m.start + 1 {
            warnings.push(format!(
                "document {}: mention of {} at tokens {}..{} crosses a sentence boundary; cut at sentence end",
                doc.doc_id, m.entity_id, m.start, m.end
            ));
        }
        span.sort();
        let e = *slot.entry(m.entity_id.clone()).or_insert_with(|| {
            entities.push(Entity { id: m.entity_id.clone(), mentions: Vec::new() });
            entities.len() - 1
        });
        let head = span[0];
        let mention = Mention { entity_id: m.entity_id, span, head, is_zero: head.is_empty() };
        if !entities[e].mentions.contains(&mention) {
            entities[e].mentions.push(mention);
        }
    }
    doc.entities = entities;
    let fallbacks = doc.refresh_heads();
    if fallbacks > 0 {
        warnings.push(format!("document {}: {fallbacks} mention heads fell back to the first node", doc.doc_id));
    }
    doc.normalize_entity_order();
    Ok(Converted { value: doc, warnings })
}
