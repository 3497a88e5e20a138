//! CoNLL-U documents with empty nodes, multiword tokens and coreference
//! entities decoded from the `Entity` MISC attribute.

mod conllu;
mod entity;
mod head;
mod words;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use conllu::{parse_conllu, parse_conllu_bytes, serialize_conllu, ParseError, ParseErrorKind, Parsed};
pub use entity::{EntityItem, ItemKind, PartTag};
pub use head::{derive_head, node_depth, DerivedHead};
pub use words::{document_word_index, global_word_index, WordIndex, WordOrdinal};

/// Position of a node inside a document.
///
/// `minor == 0` marks a regular (surface) token; empty nodes carry the
/// sub-ordinal after the dot (`3.1` has `major = 3, minor = 1`). The derived
/// ordering is document order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub sentence: usize,
    pub major: u32,
    pub minor: u32,
}

impl NodeId {
    pub const fn new(sentence: usize, major: u32, minor: u32) -> Self {
        NodeId { sentence, major, minor }
    }

    pub const fn word(sentence: usize, major: u32) -> Self {
        NodeId { sentence, major, minor: 0 }
    }

    pub const fn is_empty(&self) -> bool {
        self.minor > 0
    }
}

/// Renders the in-sentence id as it appears in the ID column.
impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.minor == 0 {
            write!(f, "{}", self.major)
        } else {
            write!(f, "{}.{}", self.major, self.minor)
        }
    }
}

/// Target of a dependency edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parent {
    Root,
    Node(NodeId),
}

/// One item of the DEPS column. `label == None` stands for an unlabeled
/// edge (written as `_`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnhancedDep {
    pub parent: Parent,
    pub label: Option<String>,
}

/// `Key=Value|Key2=Value2` attribute list; a bare `Key` has no value.
pub type Attrs = BTreeMap<String, Option<String>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: Attrs,
    /// Basic-tree head; `None` when the column is `_` (always for empty nodes).
    pub head: Option<Parent>,
    pub deprel: Option<String>,
    pub deps: Vec<EnhancedDep>,
    /// MISC without the `Entity` key, which is decoded into [`Entity`] values.
    pub misc: Attrs,
}

impl Node {
    /// A node with every column but the id and form unset.
    pub fn bare(id: NodeId, form: impl Into<String>) -> Self {
        Node {
            id,
            form: form.into(),
            lemma: String::from("_"),
            upos: String::from("_"),
            xpos: String::from("_"),
            feats: Attrs::new(),
            head: None,
            deprel: None,
            deps: Vec::new(),
            misc: Attrs::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.id.is_empty()
    }

    /// Syntactic parent: the basic head for regular tokens, the first
    /// enhanced dependency for empty nodes.
    pub fn parent(&self) -> Option<Parent> {
        self.head.or_else(|| self.deps.first().map(|d| d.parent))
    }

    /// Relation to [`Node::parent`], if labeled.
    pub fn relation(&self) -> Option<&str> {
        if self.head.is_some() {
            self.deprel.as_deref()
        } else {
            self.deps.first().and_then(|d| d.label.as_deref())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiwordToken {
    pub first: u32,
    pub last: u32,
    pub form: String,
    pub misc: Attrs,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sentence {
    pub sent_id: String,
    /// Comment lines other than `newdoc id` and `sent_id`, without the
    /// leading `# `.
    pub comments: Vec<String>,
    /// Regular tokens and empty nodes, sorted by id.
    pub nodes: Vec<Node>,
    pub mwts: Vec<MultiwordToken>,
}

impl Sentence {
    pub fn node(&self, major: u32, minor: u32) -> Option<&Node> {
        self.position(major, minor).map(|i| &self.nodes[i])
    }

    /// Index of the node in [`Sentence::nodes`].
    pub fn position(&self, major: u32, minor: u32) -> Option<usize> {
        self.nodes
            .binary_search_by(|n| (n.id.major, n.id.minor).cmp(&(major, minor)))
            .ok()
    }

    pub fn words(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| !n.is_empty())
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    pub fn empty_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_empty()).count()
    }

    pub fn mwt_starting_at(&self, major: u32) -> Option<&MultiwordToken> {
        self.mwts.iter().find(|m| m.first == major)
    }
}

/// A coreference mention. `span` is sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mention {
    pub entity_id: String,
    pub span: Vec<NodeId>,
    pub head: NodeId,
    pub is_zero: bool,
}

impl Mention {
    pub fn first(&self) -> NodeId {
        self.span[0]
    }

    pub fn last(&self) -> NodeId {
        self.span[self.span.len() - 1]
    }

    /// Number of regular (non-empty) nodes in the span.
    pub fn word_len(&self) -> usize {
        self.span.iter().filter(|n| !n.is_empty()).count()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.span.binary_search(&id).is_ok()
    }

    /// Document-order key used to sort mentions within an entity.
    pub fn order_key(&self) -> (NodeId, core::cmp::Reverse<NodeId>) {
        (self.first(), core::cmp::Reverse(self.last()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entity {
    pub id: String,
    pub mentions: Vec<Mention>,
}

impl Entity {
    pub fn is_singleton(&self) -> bool {
        self.mentions.len() == 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub sentences: Vec<Sentence>,
    /// Entities ordered by the position of their first mention.
    pub entities: Vec<Entity>,
}

impl Document {
    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.sentences.get(id.sentence)?.node(id.major, id.minor)
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::word_count).sum()
    }

    pub fn empty_count(&self) -> usize {
        self.sentences.iter().map(Sentence::empty_count).sum()
    }

    pub fn mentions(&self) -> impl Iterator<Item = &Mention> {
        self.entities.iter().flat_map(|e| e.mentions.iter())
    }

    /// Re-derives every mention head and `is_zero` flag from the trees.
    pub fn refresh_heads(&mut self) -> usize {
        let mut warnings = 0;
        let sentences = &self.sentences;
        for entity in &mut self.entities {
            for mention in &mut entity.mentions {
                let derived = derive_head(&mention.span, &sentences[mention.first().sentence]);
                warnings += derived.warning as usize;
                mention.head = derived.head;
                mention.is_zero = derived.head.is_empty();
            }
        }
        warnings
    }

    /// Sorts mentions inside entities and entities by first mention.
    pub fn normalize_entity_order(&mut self) {
        for entity in &mut self.entities {
            entity.mentions.sort_by_key(Mention::order_key);
        }
        self.entities.retain(|e| !e.mentions.is_empty());
        self.entities
            .sort_by(|a, b| a.mentions[0].order_key().cmp(&b.mentions[0].order_key()).then_with(|| a.id.cmp(&b.id)));
    }

    /// Regular-token forms per sentence, the key compared when two files
    /// must describe the same text.
    pub fn token_forms(&self) -> Vec<Vec<&str>> {
        self.sentences
            .iter()
            .map(|s| s.words().map(|n| n.form.as_str()).collect())
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn word_count(&self) -> usize {
        self.documents.iter().map(Document::word_count).sum()
    }
}
