use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write};

use super::entity::{parse_items, render_items, EntityItem, ItemKind, PartTag};
use super::{
    Attrs, Corpus, Document, EnhancedDep, Entity, Mention, MultiwordToken, Node, NodeId, Parent, Sentence,
};

const ENTITY_KEY: &str = "Entity";
/// MISC keys carrying non-identity relations; kept verbatim, never decoded.
const NON_IDENTITY_KEYS: [&str; 2] = ["Bridge", "SplitAnte"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    InvalidUtf8,
    ColumnCount(usize),
    MalformedId(String),
    MalformedField { column: &'static str, value: String },
    UnknownParent(String),
    DuplicateSentId(String),
    DuplicateDocId(String),
    MalformedEntity(String),
    /// A mention opened by `eid` is never closed.
    UnclosedMention(String),
    /// A closing item for `eid` without an opener.
    UnopenedMention(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            ParseErrorKind::InvalidUtf8 => write!(f, "input is not valid UTF-8"),
            ParseErrorKind::ColumnCount(n) => write!(f, "expected 10 tab-separated columns, found {n}"),
            ParseErrorKind::MalformedId(id) => write!(f, "malformed ID field {id:?}"),
            ParseErrorKind::MalformedField { column, value } => write!(f, "malformed {column} field {value:?}"),
            ParseErrorKind::UnknownParent(p) => write!(f, "reference to nonexistent parent {p}"),
            ParseErrorKind::DuplicateSentId(s) => write!(f, "duplicate sent_id {s:?} within document"),
            ParseErrorKind::DuplicateDocId(s) => write!(f, "duplicate document id {s:?}"),
            ParseErrorKind::MalformedEntity(m) => write!(f, "malformed Entity attribute: {m}"),
            ParseErrorKind::UnclosedMention(e) => {
                write!(f, "mention of entity {e} is not closed within its sentence")
            }
            ParseErrorKind::UnopenedMention(e) => write!(f, "closing bracket for entity {e} without an opener"),
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

/// Parse result with the non-fatal diagnostics collected on the way.
#[derive(Clone, Debug, Default)]
pub struct Parsed {
    pub corpus: Corpus,
    pub warnings: Vec<Warning>,
}

pub fn parse_conllu_bytes(bytes: &[u8]) -> Result<Parsed, ParseError> {
    let text = core::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        ParseError { line, kind: ParseErrorKind::InvalidUtf8 }
    })?;
    parse_conllu(text)
}

/// Parses a CoNLL-U file into documents. Documents start at
/// `# newdoc id = ...`; sentences before the first such comment form a
/// document with a generated id.
pub fn parse_conllu(text: &str) -> Result<Parsed, ParseError> {
    let mut parser = Parser::default();
    for (i, raw) in text.lines().enumerate() {
        parser.line(i + 1, raw.strip_suffix('\r').unwrap_or(raw))?;
    }
    let last_line = text.lines().count() + 1;
    parser.finish_sentence(last_line)?;
    parser.finish_document(last_line)?;
    Ok(Parsed { corpus: Corpus { documents: parser.documents }, warnings: parser.warnings })
}

#[derive(Default)]
struct SentenceBuilder {
    sentence: Sentence,
    /// (node id, raw Entity value, line)
    entity_values: Vec<(NodeId, String, usize)>,
    node_lines: Vec<usize>,
    started_at: usize,
}

#[derive(Default)]
struct Parser {
    documents: Vec<Document>,
    warnings: Vec<Warning>,
    doc: Option<Document>,
    doc_line: usize,
    decoder: EntityDecoder,
    sent_ids: BTreeMap<String, ()>,
    doc_ids: BTreeMap<String, ()>,
    pending_doc_id: Option<String>,
    current: Option<SentenceBuilder>,
}

impl Parser {
    fn line(&mut self, line_no: usize, line: &str) -> Result<(), ParseError> {
        if line.trim().is_empty() {
            return self.finish_sentence(line_no);
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.strip_prefix(' ').unwrap_or(comment);
            if let Some(id) = key_value(comment, "newdoc id").or_else(|| (comment.trim() == "newdoc").then_some("")) {
                self.finish_sentence(line_no)?;
                self.finish_document(line_no)?;
                self.pending_doc_id = Some(id.to_string());
                self.doc_line = line_no;
                return Ok(());
            }
            let builder = self.builder(line_no);
            if let Some(id) = key_value(comment, "sent_id") {
                builder.sentence.sent_id = id.to_string();
            } else {
                builder.sentence.comments.push(comment.to_string());
            }
            return Ok(());
        }
        self.builder(line_no);
        let sentence_index = self.doc.as_ref().map_or(0, |d| d.sentences.len());
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ParseError { line: line_no, kind: ParseErrorKind::ColumnCount(cols.len()) });
        }
        let err = |kind| ParseError { line: line_no, kind };
        if let Some((a, b)) = cols[0].split_once('-') {
            let first = parse_u32(a).ok_or_else(|| err(ParseErrorKind::MalformedId(cols[0].into())))?;
            let last = parse_u32(b).ok_or_else(|| err(ParseErrorKind::MalformedId(cols[0].into())))?;
            if first == 0 || last < first {
                return Err(err(ParseErrorKind::MalformedId(cols[0].into())));
            }
            let misc = parse_attrs(cols[9]);
            let builder = self.current.as_mut().expect("builder exists");
            builder.sentence.mwts.push(MultiwordToken { first, last, form: cols[1].into(), misc });
            return Ok(());
        }
        let id = parse_node_id(cols[0], sentence_index).ok_or_else(|| err(ParseErrorKind::MalformedId(cols[0].into())))?;
        let head = match cols[6] {
            "_" => None,
            h => Some(parse_parent(h, sentence_index).ok_or_else(|| {
                err(ParseErrorKind::MalformedField { column: "HEAD", value: h.into() })
            })?),
        };
        let deps = if cols[8] == "_" {
            Vec::new()
        } else {
            cols[8]
                .split('|')
                .map(|item| {
                    let (p, label) = item.split_once(':')?;
                    let parent = parse_parent(p, sentence_index)?;
                    let label = (label != "_").then(|| label.to_string());
                    Some(EnhancedDep { parent, label })
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| err(ParseErrorKind::MalformedField { column: "DEPS", value: cols[8].into() }))?
        };
        let mut misc = parse_attrs(cols[9]);
        let entity_value = misc.remove(ENTITY_KEY);
        for key in NON_IDENTITY_KEYS {
            if misc.contains_key(key) {
                self.warnings.push(Warning {
                    line: line_no,
                    message: alloc::format!("{key} annotation kept verbatim but not scored"),
                });
            }
        }
        let builder = self.current.as_mut().expect("builder exists");
        if let Some(value) = entity_value {
            builder.entity_values.push((id, value.unwrap_or_default(), line_no));
        }
        builder.sentence.nodes.push(Node {
            id,
            form: cols[1].into(),
            lemma: cols[2].into(),
            upos: cols[3].into(),
            xpos: cols[4].into(),
            feats: parse_attrs(cols[5]),
            head,
            deprel: (cols[7] != "_").then(|| cols[7].to_string()),
            deps,
            misc,
        });
        builder.node_lines.push(line_no);
        Ok(())
    }

    fn builder(&mut self, line_no: usize) -> &mut SentenceBuilder {
        if self.doc.is_none() {
            let doc_id = self.pending_doc_id.take().unwrap_or_default();
            self.doc = Some(Document { doc_id, ..Default::default() });
            if self.doc_line == 0 {
                self.doc_line = line_no;
            }
        }
        self.current.get_or_insert_with(|| SentenceBuilder { started_at: line_no, ..Default::default() })
    }

    fn finish_sentence(&mut self, line_no: usize) -> Result<(), ParseError> {
        let Some(mut builder) = self.current.take() else {
            return Ok(());
        };
        let doc = self.doc.as_mut().expect("document open");
        let sentence_index = doc.sentences.len();
        let sentence = &mut builder.sentence;

        // ids: regular tokens 1..n, empties sorted after their anchor
        let order_ok = sentence
            .nodes
            .windows(2)
            .all(|w| (w[0].id.major, w[0].id.minor) < (w[1].id.major, w[1].id.minor));
        let mut expected = 1;
        for (node, &line) in sentence.nodes.iter().zip(&builder.node_lines) {
            if !order_ok {
                return Err(ParseError { line, kind: ParseErrorKind::MalformedId(node.id.to_string()) });
            }
            if !node.is_empty() {
                if node.id.major != expected {
                    return Err(ParseError { line, kind: ParseErrorKind::MalformedId(node.id.to_string()) });
                }
                expected += 1;
            }
        }
        for mwt in &sentence.mwts {
            if mwt.last >= expected {
                return Err(ParseError {
                    line: builder.started_at,
                    kind: ParseErrorKind::MalformedId(alloc::format!("{}-{}", mwt.first, mwt.last)),
                });
            }
        }
        // parents must exist
        for (node, &line) in sentence.nodes.iter().zip(&builder.node_lines) {
            let parents = node.head.iter().chain(node.deps.iter().map(|d| &d.parent));
            for parent in parents {
                if let Parent::Node(p) = parent {
                    if sentence.position(p.major, p.minor).is_none() {
                        return Err(ParseError { line, kind: ParseErrorKind::UnknownParent(p.to_string()) });
                    }
                }
            }
        }
        if !sentence.sent_id.is_empty()
            && self.sent_ids.insert(sentence.sent_id.clone(), ()).is_some() {
                return Err(ParseError {
                    line: builder.started_at,
                    kind: ParseErrorKind::DuplicateSentId(sentence.sent_id.clone()),
                });
            }
        self.decoder.sentence(sentence_index, sentence, &builder.entity_values)?;
        let _ = line_no;
        doc.sentences.push(builder.sentence);
        Ok(())
    }

    fn finish_document(&mut self, line_no: usize) -> Result<(), ParseError> {
        let decoder = core::mem::take(&mut self.decoder);
        self.sent_ids.clear();
        let Some(mut doc) = self.doc.take() else {
            return Ok(());
        };
        if doc.doc_id.is_empty() {
            doc.doc_id = alloc::format!("doc{}", self.documents.len() + 1);
        }
        if self.doc_ids.insert(doc.doc_id.clone(), ()).is_some() {
            return Err(ParseError { line: self.doc_line, kind: ParseErrorKind::DuplicateDocId(doc.doc_id) });
        }
        doc.entities = decoder.finish(line_no)?;
        let warnings = doc.refresh_heads();
        if warnings > 0 {
            self.warnings.push(Warning {
                line: self.doc_line,
                message: alloc::format!(
                    "{warnings} mention(s) in {} have no node attached outside the span; head set to first node",
                    doc.doc_id
                ),
            });
        }
        doc.normalize_entity_order();
        self.documents.push(doc);
        self.doc_line = 0;
        Ok(())
    }
}

/// Turns bracket items into mentions. Closing items on a node only match
/// openers from earlier nodes (a mention opened and closed on the same node
/// is written as a single item).
#[derive(Default)]
struct EntityDecoder {
    /// (eid, part) -> stack of (start position in sentence, line)
    open: BTreeMap<(String, Option<PartTag>), Vec<(usize, usize)>>,
    /// Discontinuous mentions still waiting for parts.
    pending: Vec<PendingParts>,
    mentions: Vec<(String, Vec<NodeId>)>,
    first_seen: BTreeMap<String, usize>,
}

struct PendingParts {
    eid: String,
    total: u32,
    next: u32,
    nodes: Vec<NodeId>,
    line: usize,
}

impl EntityDecoder {
    fn sentence(
        &mut self,
        sentence_index: usize,
        sentence: &Sentence,
        values: &[(NodeId, String, usize)],
    ) -> Result<(), ParseError> {
        for (id, value, line) in values {
            let items = parse_items(value)
                .map_err(|m| ParseError { line: *line, kind: ParseErrorKind::MalformedEntity(m) })?;
            let pos = sentence.position(id.major, id.minor).expect("node present");
            let (closers, others): (Vec<&EntityItem>, Vec<&EntityItem>) =
                items.iter().partition(|i| i.kind == ItemKind::Close);
            for item in closers {
                let key = (item.eid.clone(), item.part);
                let start = self
                    .open
                    .get_mut(&key)
                    .and_then(Vec::pop)
                    .ok_or_else(|| ParseError { line: *line, kind: ParseErrorKind::UnopenedMention(item.eid.clone()) })?;
                self.segment(sentence_index, sentence, item, start.0, pos, *line)?;
            }
            for item in others {
                match item.kind {
                    ItemKind::Open => {
                        self.open.entry((item.eid.clone(), item.part)).or_default().push((pos, *line));
                    }
                    _ => self.segment(sentence_index, sentence, item, pos, pos, *line)?,
                }
            }
        }
        // contiguous brackets never cross sentence boundaries
        for ((eid, _), stack) in &self.open {
            if let Some(&(_, line)) = stack.first() {
                return Err(ParseError { line, kind: ParseErrorKind::UnclosedMention(eid.clone()) });
            }
        }
        self.open.clear();
        Ok(())
    }

    fn segment(
        &mut self,
        sentence_index: usize,
        sentence: &Sentence,
        item: &EntityItem,
        start: usize,
        end: usize,
        line: usize,
    ) -> Result<(), ParseError> {
        let nodes: Vec<NodeId> = sentence.nodes[start..=end]
            .iter()
            .map(|n| NodeId::new(sentence_index, n.id.major, n.id.minor))
            .collect();
        let order = self.first_seen.len();
        self.first_seen.entry(item.eid.clone()).or_insert(order);
        let Some(part) = item.part else {
            self.mentions.push((item.eid.clone(), nodes));
            return Ok(());
        };
        if part.total == 1 {
            self.mentions.push((item.eid.clone(), nodes));
            return Ok(());
        }
        if part.index == 1 {
            self.pending.push(PendingParts { eid: item.eid.clone(), total: part.total, next: 2, nodes, line });
            return Ok(());
        }
        let slot = self
            .pending
            .iter()
            .rposition(|p| p.eid == item.eid && p.total == part.total && p.next == part.index)
            .ok_or_else(|| ParseError { line, kind: ParseErrorKind::UnopenedMention(item.eid.clone()) })?;
        let pending = &mut self.pending[slot];
        pending.nodes.extend(nodes);
        pending.next += 1;
        if pending.next > pending.total {
            let done = self.pending.remove(slot);
            let mut span = done.nodes;
            span.sort();
            span.dedup();
            self.mentions.push((done.eid, span));
        }
        Ok(())
    }

    fn finish(self, _line: usize) -> Result<Vec<Entity>, ParseError> {
        if let Some(p) = self.pending.first() {
            return Err(ParseError { line: p.line, kind: ParseErrorKind::UnclosedMention(p.eid.clone()) });
        }
        let mut entities: BTreeMap<String, Entity> = BTreeMap::new();
        for (eid, span) in self.mentions {
            let entity = entities
                .entry(eid.clone())
                .or_insert_with(|| Entity { id: eid.clone(), mentions: Vec::new() });
            let head = span[0];
            entity.mentions.push(Mention { entity_id: eid, span, head, is_zero: head.is_empty() });
        }
        Ok(entities.into_values().collect())
    }
}

fn key_value<'a>(comment: &'a str, key: &str) -> Option<&'a str> {
    let rest = comment.strip_prefix(key)?.trim_start();
    let rest = rest.strip_prefix('=')?;
    Some(rest.trim())
}

fn parse_u32(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_node_id(s: &str, sentence: usize) -> Option<NodeId> {
    match s.split_once('.') {
        Some((a, b)) => {
            let minor = parse_u32(b)?;
            (minor > 0).then_some(NodeId::new(sentence, parse_u32(a)?, minor))
        }
        None => {
            let major = parse_u32(s)?;
            (major > 0).then_some(NodeId::word(sentence, major))
        }
    }
}

fn parse_parent(s: &str, sentence: usize) -> Option<Parent> {
    if s == "0" {
        return Some(Parent::Root);
    }
    parse_node_id(s, sentence).map(Parent::Node)
}

fn parse_attrs(s: &str) -> Attrs {
    if s == "_" || s.is_empty() {
        return Attrs::new();
    }
    s.split('|')
        .map(|item| match item.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (item.to_string(), None),
        })
        .collect()
}

fn write_attrs(out: &mut String, attrs: &Attrs) {
    if attrs.is_empty() {
        out.push('_');
        return;
    }
    for (i, (k, v)) in attrs.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        out.push_str(k);
        if let Some(v) = v {
            out.push('=');
            out.push_str(v);
        }
    }
}

fn write_parent(out: &mut String, parent: &Parent) {
    match parent {
        Parent::Root => out.push('0'),
        Parent::Node(p) => {
            let _ = write!(out, "{p}");
        }
    }
}

/// Splits a span into runs of consecutive nodes (in sentence order).
pub(crate) fn segments(doc: &Document, span: &[NodeId]) -> Vec<(NodeId, NodeId)> {
    let mut out: Vec<(NodeId, NodeId)> = Vec::new();
    let mut prev: Option<(usize, usize)> = None;
    for &id in span {
        let pos = doc.sentences[id.sentence].position(id.major, id.minor).expect("span node exists");
        match (prev, out.last_mut()) {
            (Some((s, p)), Some(last)) if s == id.sentence && p + 1 == pos => last.1 = id,
            _ => out.push((id, id)),
        }
        prev = Some((id.sentence, pos));
    }
    out
}

/// Encodes the document's entities as per-node `Entity` items.
fn entity_items(doc: &Document) -> BTreeMap<NodeId, Vec<EntityItem>> {
    // per node: closers (innermost first), openers (outermost first), singles
    let mut closers: BTreeMap<NodeId, Vec<(NodeId, EntityItem)>> = BTreeMap::new();
    let mut openers: BTreeMap<NodeId, Vec<(NodeId, EntityItem)>> = BTreeMap::new();
    let mut singles: BTreeMap<NodeId, Vec<EntityItem>> = BTreeMap::new();
    for mention in doc.mentions() {
        let segs = segments(doc, &mention.span);
        let total = segs.len() as u32;
        for (k, &(start, end)) in segs.iter().enumerate() {
            let part = (total > 1).then_some(PartTag { index: k as u32 + 1, total });
            let eid = mention.entity_id.clone();
            if start == end {
                singles.entry(start).or_default().push(EntityItem { kind: ItemKind::Single, eid, part });
            } else {
                openers
                    .entry(start)
                    .or_default()
                    .push((end, EntityItem { kind: ItemKind::Open, eid: eid.clone(), part }));
                closers.entry(end).or_default().push((start, EntityItem { kind: ItemKind::Close, eid, part }));
            }
        }
    }
    let mut out: BTreeMap<NodeId, Vec<EntityItem>> = BTreeMap::new();
    for (node, mut items) in closers {
        items.sort_by_key(|x| core::cmp::Reverse(x.0));
        out.entry(node).or_default().extend(items.into_iter().map(|(_, i)| i));
    }
    for (node, mut items) in openers {
        items.sort_by_key(|x| core::cmp::Reverse(x.0));
        out.entry(node).or_default().extend(items.into_iter().map(|(_, i)| i));
    }
    for (node, items) in singles {
        out.entry(node).or_default().extend(items);
    }
    out
}

/// Writes the canonical CoNLL-U rendering: `_` for absent values, FEATS and
/// MISC keys sorted, `Entity` regenerated from the decoded mentions.
pub fn serialize_conllu(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        let items = entity_items(doc);
        for (s_idx, sentence) in doc.sentences.iter().enumerate() {
            if s_idx == 0 {
                let _ = writeln!(out, "# newdoc id = {}", doc.doc_id);
            }
            if !sentence.sent_id.is_empty() {
                let _ = writeln!(out, "# sent_id = {}", sentence.sent_id);
            }
            for c in &sentence.comments {
                let _ = writeln!(out, "# {c}");
            }
            for node in &sentence.nodes {
                if !node.is_empty() {
                    if let Some(mwt) = sentence.mwt_starting_at(node.id.major) {
                        let _ = write!(out, "{}-{}\t{}\t_\t_\t_\t_\t_\t_\t_\t", mwt.first, mwt.last, mwt.form);
                        write_attrs(&mut out, &mwt.misc);
                        out.push('\n');
                    }
                }
                let _ = write!(out, "{}\t{}\t{}\t{}\t{}\t", node.id, node.form, node.lemma, node.upos, node.xpos);
                write_attrs(&mut out, &node.feats);
                out.push('\t');
                match &node.head {
                    Some(p) => write_parent(&mut out, p),
                    None => out.push('_'),
                }
                out.push('\t');
                out.push_str(node.deprel.as_deref().unwrap_or("_"));
                out.push('\t');
                if node.deps.is_empty() {
                    out.push('_');
                }
                for (i, dep) in node.deps.iter().enumerate() {
                    if i > 0 {
                        out.push('|');
                    }
                    write_parent(&mut out, &dep.parent);
                    out.push(':');
                    out.push_str(dep.label.as_deref().unwrap_or("_"));
                }
                out.push('\t');
                let key = NodeId::new(s_idx, node.id.major, node.id.minor);
                match items.get(&key) {
                    Some(items) => {
                        let mut misc = node.misc.clone();
                        misc.insert(ENTITY_KEY.into(), Some(render_items(items)));
                        write_attrs(&mut out, &misc);
                    }
                    None => write_attrs(&mut out, &node.misc),
                }
                out.push('\n');
            }
            out.push('\n');
        }
    }
    out
}
