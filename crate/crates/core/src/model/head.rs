use super::{NodeId, Parent, Sentence};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DerivedHead {
    pub head: NodeId,
    /// Set when no span node attaches outside the span (malformed tree).
    pub warning: bool,
}

/// Number of edges between the node and the root; `None` when the parent
/// chain is broken or cyclic.
pub fn node_depth(sentence: &Sentence, major: u32, minor: u32) -> Option<usize> {
    let mut current = sentence.node(major, minor)?;
    let mut depth = 0;
    loop {
        match current.parent() {
            Some(Parent::Root) => return Some(depth),
            Some(Parent::Node(p)) => {
                depth += 1;
                if depth > sentence.nodes.len() {
                    return None;
                }
                current = sentence.node(p.major, p.minor)?;
            }
            None => return None,
        }
    }
}

/// Picks the mention head from the dependency tree.
///
/// Candidates are span nodes whose parent lies outside the span. The
/// shallowest candidate wins, ties go to the earliest node. Span nodes from
/// other sentences than `sentence` are ignored.
pub fn derive_head(span: &[NodeId], sentence: &Sentence) -> DerivedHead {
    let sentence_index = span[0].sentence;
    let local = || span.iter().filter(move |n| n.sentence == sentence_index);
    let in_span = |p: NodeId| p.sentence == sentence_index && span.binary_search(&p).is_ok();

    let mut best: Option<(usize, NodeId)> = None;
    for &id in local() {
        let Some(node) = sentence.node(id.major, id.minor) else {
            continue;
        };
        let outside = match node.parent() {
            Some(Parent::Node(p)) => !in_span(NodeId::new(sentence_index, p.major, p.minor)),
            Some(Parent::Root) | None => true,
        };
        if !outside {
            continue;
        }
        let depth = node_depth(sentence, id.major, id.minor).unwrap_or(usize::MAX);
        // span is sorted, so the first node at a given depth is the earliest
        if best.is_none_or(|(d, _)| depth < d) {
            best = Some((depth, id));
        }
    }
    match best {
        Some((_, head)) => DerivedHead { head, warning: false },
        None => DerivedHead { head: span[0], warning: true },
    }
}
