use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{linearize, surface_of, Converted, EMPTY_PREFIX};
use crate::model::{Document, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AnnotationKind {
    Open,
    Close,
    OpenClose,
}

/// One bracket item of a token suffix: `[e1`, `e1]` or `[e1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnnotationItem {
    pub kind: AnnotationKind,
    pub entity_id: String,
}

pub(crate) enum ItemParse {
    Item(AnnotationItem),
    BadId(String),
    NotItem,
}

impl AnnotationItem {
    pub fn new(kind: AnnotationKind, entity_id: impl Into<String>) -> Self {
        AnnotationItem { kind, entity_id: entity_id.into() }
    }

    fn write(&self, out: &mut String) {
        match self.kind {
            AnnotationKind::Open => {
                out.push('[');
                out.push_str(&self.entity_id);
            }
            AnnotationKind::Close => {
                out.push_str(&self.entity_id);
                out.push(']');
            }
            AnnotationKind::OpenClose => {
                out.push('[');
                out.push_str(&self.entity_id);
                out.push(']');
            }
        }
    }

    pub(crate) fn parse(s: &str) -> ItemParse {
        let (open, rest) = match s.strip_prefix('[') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let (close, id) = match rest.strip_suffix(']') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        if !open && !close {
            return ItemParse::NotItem;
        }
        if !is_entity_id(id) {
            return ItemParse::BadId(id.to_string());
        }
        let kind = match (open, close) {
            (true, true) => AnnotationKind::OpenClose,
            (true, false) => AnnotationKind::Open,
            _ => AnnotationKind::Close,
        };
        ItemParse::Item(AnnotationItem::new(kind, id))
    }
}

fn is_entity_id(s: &str) -> bool {
    s.strip_prefix('e').is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainToken {
    /// Surface form without the empty-node prefix.
    pub surface: String,
    pub annotations: Vec<AnnotationItem>,
    pub is_empty: bool,
}

impl PlainToken {
    pub fn new(surface: impl Into<String>, is_empty: bool) -> Self {
        PlainToken { surface: surface.into(), annotations: Vec::new(), is_empty }
    }

    pub fn write(&self, out: &mut String) {
        if self.is_empty {
            out.push_str(EMPTY_PREFIX);
        }
        out.push_str(&self.surface);
        for (i, item) in self.annotations.iter().enumerate() {
            out.push(if i == 0 { '|' } else { ',' });
            item.write(out);
        }
    }

    /// Surface as it appears in the rendered line, prefix included.
    pub fn rendered_surface(&self) -> String {
        if self.is_empty {
            format!("{EMPTY_PREFIX}{}", self.surface)
        } else {
            self.surface.clone()
        }
    }
}

/// Inclusive token range of one mention.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlainMention {
    pub entity_id: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlainErrorKind {
    EmptyToken,
    MalformedEntityId(String),
    UnopenedClose(String),
    UnclosedOpen(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainError {
    /// 0-based token index.
    pub token: usize,
    pub kind: PlainErrorKind,
}

impl fmt::Display for PlainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "token {}: ", self.token)?;
        match &self.kind {
            PlainErrorKind::EmptyToken => f.write_str("empty token"),
            PlainErrorKind::MalformedEntityId(id) => write!(f, "malformed entity id {id:?}"),
            PlainErrorKind::UnopenedClose(id) => write!(f, "{id}] closes a mention that was never opened"),
            PlainErrorKind::UnclosedOpen(id) => write!(f, "[{id} is never closed"),
        }
    }
}

impl core::error::Error for PlainError {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlainDoc {
    pub tokens: Vec<PlainToken>,
}

#[derive(Debug, Default)]
pub(crate) struct BracketWalk {
    pub mentions: Vec<PlainMention>,
    /// (token, entity) of closers without an opener.
    pub unopened: Vec<(usize, String)>,
    /// (position, entity) of openers never closed, by position.
    pub unclosed: Vec<(usize, String)>,
}

/// Pairs brackets with one stack per entity. Closers on a token are handled
/// before its openers, so a mention ending where another of the same entity
/// starts is read correctly. `position` maps each token to the position the
/// resulting mention boundaries should use.
pub(crate) fn walk_brackets<'a, I>(tokens: I) -> BracketWalk
where
    I: IntoIterator<Item = (usize, usize, &'a [AnnotationItem])>,
{
    let mut walk = BracketWalk::default();
    let mut stacks: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (index, position, items) in tokens {
        for item in items.iter().filter(|i| i.kind == AnnotationKind::Close) {
            match stacks.get_mut(item.entity_id.as_str()).and_then(Vec::pop) {
                Some(start) => walk.mentions.push(PlainMention { entity_id: item.entity_id.clone(), start, end: position }),
                None => walk.unopened.push((index, item.entity_id.clone())),
            }
        }
        for item in items {
            match item.kind {
                AnnotationKind::Open => stacks.entry(&item.entity_id).or_default().push(position),
                AnnotationKind::OpenClose => walk.mentions.push(PlainMention {
                    entity_id: item.entity_id.clone(),
                    start: position,
                    end: position,
                }),
                AnnotationKind::Close => {}
            }
        }
    }
    for (id, starts) in stacks {
        walk.unclosed.extend(starts.into_iter().map(|s| (s, id.to_string())));
    }
    walk.unclosed.sort();
    walk
}

/// Sorts mentions by start, longer first, and drops duplicates.
pub(crate) fn canonical_mentions(mut mentions: Vec<PlainMention>) -> Vec<PlainMention> {
    mentions.sort_by(|a, b| {
        a.start.cmp(&b.start).then(b.end.cmp(&a.end)).then_with(|| a.entity_id.cmp(&b.entity_id))
    });
    mentions.dedup();
    mentions
}

impl PlainDoc {
    /// Builds a document with canonical annotations: on each token, openers
    /// outermost first, then single-token items, then closers innermost
    /// first.
    pub fn from_parts(tokens: Vec<PlainToken>, mentions: &[PlainMention]) -> PlainDoc {
        let mut tokens: Vec<PlainToken> = tokens
            .into_iter()
            .map(|mut t| {
                t.annotations.clear();
                t
            })
            .collect();
        let mentions = canonical_mentions(mentions.to_vec());
        let mut opens: Vec<Vec<&PlainMention>> = vec_of(tokens.len());
        let mut singles: Vec<Vec<&PlainMention>> = vec_of(tokens.len());
        let mut closes: Vec<Vec<&PlainMention>> = vec_of(tokens.len());
        for m in &mentions {
            if m.start == m.end {
                singles[m.start].push(m);
            } else {
                opens[m.start].push(m);
                closes[m.end].push(m);
            }
        }
        for (i, token) in tokens.iter_mut().enumerate() {
            opens[i].sort_by(|a, b| b.end.cmp(&a.end).then_with(|| a.entity_id.cmp(&b.entity_id)));
            closes[i].sort_by(|a, b| b.start.cmp(&a.start).then_with(|| a.entity_id.cmp(&b.entity_id)));
            let item = |kind, m: &&PlainMention| AnnotationItem::new(kind, m.entity_id.clone());
            token.annotations.extend(opens[i].iter().map(|m| item(AnnotationKind::Open, m)));
            token.annotations.extend(singles[i].iter().map(|m| item(AnnotationKind::OpenClose, m)));
            token.annotations.extend(closes[i].iter().map(|m| item(AnnotationKind::Close, m)));
        }
        PlainDoc { tokens }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            t.write(&mut out);
        }
        out
    }

    /// Mentions encoded by the brackets, start-ordered; unbalanced brackets
    /// are an error.
    pub fn mentions(&self) -> Result<Vec<PlainMention>, PlainError> {
        let walk = walk_brackets(self.tokens.iter().enumerate().map(|(i, t)| (i, i, t.annotations.as_slice())));
        if let Some((token, id)) = walk.unopened.into_iter().next() {
            return Err(PlainError { token, kind: PlainErrorKind::UnopenedClose(id) });
        }
        if let Some((token, id)) = walk.unclosed.into_iter().next() {
            return Err(PlainError { token, kind: PlainErrorKind::UnclosedOpen(id) });
        }
        Ok(canonical_mentions(walk.mentions))
    }

    /// Mention ranges grouped by entity, entities in order of first mention.
    pub fn clusters(&self) -> Result<Vec<(String, Vec<(usize, usize)>)>, PlainError> {
        let mut out: Vec<(String, Vec<(usize, usize)>)> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for m in self.mentions()? {
            let slot = *index.entry(m.entity_id.clone()).or_insert_with(|| {
                out.push((m.entity_id.clone(), Vec::new()));
                out.len() - 1
            });
            out[slot].1.push((m.start, m.end));
        }
        Ok(out)
    }
}

fn vec_of<T>(n: usize) -> Vec<Vec<T>> {
    (0..n).map(|_| Vec::new()).collect()
}

pub(crate) enum TokenParse {
    Ok(PlainToken),
    BadId(String),
}

/// Splits `surface|items` at the last bar. A suffix that is not a bracket
/// list belongs to the surface.
pub(crate) fn parse_token(raw: &str, tolerant: bool) -> TokenParse {
    let (mut surface, mut annotations) = (raw, Vec::new());
    if let Some(bar) = raw.rfind('|') {
        let mut items = Vec::new();
        let mut bad = None;
        let mut plain = false;
        for piece in raw[bar + 1..].split(',') {
            match AnnotationItem::parse(piece) {
                ItemParse::Item(item) => items.push(item),
                ItemParse::BadId(id) => bad = bad.or(Some(id)),
                ItemParse::NotItem => plain = true,
            }
        }
        if tolerant {
            if !items.is_empty() || bad.is_some() {
                surface = &raw[..bar];
                annotations = items;
            }
        } else if !plain {
            if let Some(id) = bad {
                return TokenParse::BadId(id);
            }
            surface = &raw[..bar];
            annotations = items;
        }
    }
    let (surface, is_empty) = match surface.strip_prefix(EMPTY_PREFIX) {
        Some(rest) => (rest, true),
        None => (surface, false),
    };
    TokenParse::Ok(PlainToken { surface: surface.to_string(), annotations, is_empty })
}

/// Strict parse of one plaintext line.
pub fn from_plaintext(line: &str) -> Result<PlainDoc, PlainError> {
    let line = line.trim_end_matches(['\n', '\r']);
    let mut doc = PlainDoc::default();
    if line.is_empty() {
        return Ok(doc);
    }
    for (i, raw) in line.split(' ').enumerate() {
        let token = match parse_token(raw, false) {
            TokenParse::Ok(t) => t,
            TokenParse::BadId(id) => return Err(PlainError { token: i, kind: PlainErrorKind::MalformedEntityId(id) }),
        };
        if token.surface.is_empty() {
            return Err(PlainError { token: i, kind: PlainErrorKind::EmptyToken });
        }
        doc.tokens.push(token);
    }
    doc.mentions()?;
    Ok(doc)
}

/// Token positions of a mention span, reduced to the run of consecutive
/// positions around the head when the span is not contiguous.
pub(crate) fn contiguous_range(span: &[NodeId], head: NodeId, position: &BTreeMap<NodeId, usize>) -> (usize, usize, bool) {
    let mut positions: Vec<usize> =
        span.iter().filter(|n| n.sentence == head.sentence).filter_map(|n| position.get(n).copied()).collect();
    positions.sort_unstable();
    let reduced_sentence = positions.len() != span.len();
    let h = position[&head];
    let at = positions.binary_search(&h).unwrap_or(0);
    let (mut lo, mut hi) = (at, at);
    while lo > 0 && positions[lo - 1] + 1 == positions[lo] {
        lo -= 1;
    }
    while hi + 1 < positions.len() && positions[hi] + 1 == positions[hi + 1] {
        hi += 1;
    }
    let reduced = reduced_sentence || lo != 0 || hi != positions.len() - 1;
    (positions[lo], positions[hi], reduced)
}

/// Renders a document as one plaintext line. Entities are renumbered `e1`,
/// `e2`, ... by first mention.
pub fn to_plaintext(doc: &Document) -> Converted<PlainDoc> {
    let order = linearize(doc);
    let position: BTreeMap<NodeId, usize> = order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let tokens: Vec<PlainToken> = order
        .iter()
        .map(|&id| {
            let node = doc.node(id).expect("linearized node exists");
            PlainToken::new(surface_of(&node.form), id.is_empty())
        })
        .collect();
    let mut warnings = Vec::new();
    let mut ranges: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for (e, entity) in doc.entities.iter().enumerate() {
        let mut spans = Vec::new();
        for m in &entity.mentions {
            let (start, end, reduced) = contiguous_range(&m.span, m.head, &position);
            if reduced {
                warnings.push(format!(
                    "document {}: discontinuous mention of entity {} reduced to the segment around head {}",
                    doc.doc_id, entity.id, m.head
                ));
            }
            spans.push((start, end));
        }
        if !spans.is_empty() {
            ranges.push((e, spans));
        }
    }
    ranges.sort_by_key(|(e, spans)| (spans.iter().map(|s| s.0).min(), *e));
    let mentions: Vec<PlainMention> = ranges
        .iter()
        .enumerate()
        .flat_map(|(k, (_, spans))| {
            spans.iter().map(move |&(start, end)| PlainMention { entity_id: format!("e{}", k + 1), start, end })
        })
        .collect();
    Converted { value: PlainDoc::from_parts(tokens, &mentions), warnings }
}
