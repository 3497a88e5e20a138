use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::plaintext::{parse_token, walk_brackets, PlainDoc, PlainMention, PlainToken, TokenParse};
use super::{surface_of, token_key, Converted, FormatError};
use crate::model::Document;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CleanerConfig {
    /// Largest accepted edit distance as a fraction of the reference length.
    pub max_cost_ratio: f64,
}

impl Default for CleanerConfig {
    fn default() -> Self {
        CleanerConfig { max_cost_ratio: 0.5 }
    }
}

/// One step of a word alignment from noisy tokens onto reference tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EditOp {
    Match,
    Substitute,
    /// Noisy token without a reference counterpart.
    Delete,
    /// Reference token missing from the noisy output.
    Insert,
}

const INF: u32 = u32::MAX / 2;
const DIAG: u8 = 0;
const UP: u8 = 1;
const LEFT: u8 = 2;

fn banded<T: PartialEq>(reference: &[T], noisy: &[T], d: usize) -> (usize, Vec<EditOp>) {
    let (n, m) = (noisy.len(), reference.len());
    let w = 2 * d + 1;
    let mut dirs = alloc::vec![DIAG; (n + 1) * w];
    let mut prev = alloc::vec![INF; w];
    let mut cur = alloc::vec![INF; w];
    for i in 0..=n {
        cur.fill(INF);
        let lo = i.saturating_sub(d);
        let hi = (i + d).min(m);
        for j in lo..=hi {
            let k = j + d - i;
            let (cost, dir) = if i == 0 {
                (j as u32, LEFT)
            } else if j == 0 {
                (i as u32, UP)
            } else {
                let diag = prev[k].saturating_add((noisy[i - 1] != reference[j - 1]) as u32);
                let up = if k + 1 < w { prev[k + 1].saturating_add(1) } else { INF };
                let left = if k >= 1 { cur[k - 1].saturating_add(1) } else { INF };
                if diag <= up && diag <= left {
                    (diag, DIAG)
                } else if up <= left {
                    (up, UP)
                } else {
                    (left, LEFT)
                }
            };
            cur[k] = cost;
            dirs[i * w + k] = dir;
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    let total = prev[m + d - n] as usize;
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let dir = if i == 0 {
            LEFT
        } else if j == 0 {
            UP
        } else {
            dirs[i * w + (j + d - i)]
        };
        match dir {
            DIAG => {
                ops.push(if noisy[i - 1] == reference[j - 1] { EditOp::Match } else { EditOp::Substitute });
                i -= 1;
                j -= 1;
            }
            UP => {
                ops.push(EditOp::Delete);
                i -= 1;
            }
            _ => {
                ops.push(EditOp::Insert);
                j -= 1;
            }
        }
    }
    ops.reverse();
    (total, ops)
}

/// Minimum-cost alignment (unit costs) of `noisy` onto `reference`, or
/// `None` when the cost exceeds `limit`. The band around the diagonal is
/// doubled until it provably contains an optimal path.
pub fn align_tokens<T: PartialEq>(reference: &[T], noisy: &[T], limit: usize) -> Option<(usize, Vec<EditOp>)> {
    let full = reference.len().max(noisy.len());
    let mut d = reference.len().abs_diff(noisy.len()).max(16).min(full.max(1));
    loop {
        let (cost, ops) = banded(reference, noisy, d);
        if cost <= d || d >= full {
            return (cost <= limit).then_some((cost, ops));
        }
        if d >= limit {
            return None;
        }
        d = (2 * d).min(full);
    }
}

pub fn edit_distance<T: PartialEq>(reference: &[T], noisy: &[T]) -> usize {
    align_tokens(reference, noisy, usize::MAX).map(|(c, _)| c).unwrap_or(usize::MAX)
}

#[derive(Default)]
struct Projection {
    out: Vec<PlainToken>,
    out_sentence: Vec<usize>,
    /// Output position of each noisy token.
    pos: Vec<Option<usize>>,
    /// Noisy tokens deleted before any output token existed.
    waiting: Vec<usize>,
    last: Option<usize>,
}

impl Projection {
    fn emit(&mut self, token: PlainToken, sentence: usize) -> usize {
        self.out.push(token);
        self.out_sentence.push(sentence);
        let at = self.out.len() - 1;
        for t in self.waiting.drain(..) {
            self.pos[t] = Some(at);
        }
        at
    }

    fn flush_empties(&mut self, noisy: &[PlainToken], next: &mut usize, sentence: usize) {
        while *next < noisy.len() && noisy[*next].is_empty {
            let at = self.emit(PlainToken::new(noisy[*next].surface.as_str(), true), sentence);
            self.pos[*next] = Some(at);
            self.last = Some(at);
            *next += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cleaned {
    pub doc: PlainDoc,
    pub cost: usize,
}

/// Repairs a generated plaintext line against the reference document.
///
/// The result has exactly the reference words, plus the generated `##`
/// tokens after the word they followed. Annotations of noisy tokens that do
/// not align go to the closest preceding kept token, or to the first kept
/// token at the start of the document. Closers without an opener are
/// dropped and openers never closed are closed at the end of their sentence.
pub fn clean_output(reference: &Document, noisy: &str, config: &CleanerConfig) -> Result<Converted<Cleaned>, FormatError> {
    let mut ref_tokens = Vec::new();
    let mut ref_sentence = Vec::new();
    for (s, sentence) in reference.sentences.iter().enumerate() {
        for w in sentence.words() {
            ref_tokens.push(surface_of(&w.form));
            ref_sentence.push(s);
        }
    }
    let noisy: Vec<PlainToken> = noisy
        .split_whitespace()
        .map(|raw| match parse_token(raw, true) {
            TokenParse::Ok(t) => t,
            TokenParse::BadId(_) => unreachable!("tolerant parsing drops malformed items"),
        })
        .collect();
    let regular: Vec<usize> = (0..noisy.len()).filter(|&t| !noisy[t].is_empty).collect();
    let ref_keys: Vec<String> = ref_tokens.iter().map(|t| token_key(t)).collect();
    let noisy_keys: Vec<String> = regular.iter().map(|&t| token_key(&noisy[t].surface)).collect();
    let limit = (config.max_cost_ratio * ref_tokens.len() as f64) as usize;
    let Some((cost, ops)) = align_tokens(&ref_keys, &noisy_keys, limit) else {
        return Err(FormatError::Refused {
            doc_id: reference.doc_id.clone(),
            limit,
            reference_len: ref_tokens.len(),
        });
    };

    let mut b = Projection { pos: alloc::vec![None; noisy.len()], ..Projection::default() };
    let mut sentence = 0;
    let mut next_noisy = 0;
    let mut ref_iter = ref_tokens.into_iter().zip(ref_sentence);
    b.flush_empties(&noisy, &mut next_noisy, sentence);
    for op in ops {
        match op {
            EditOp::Match | EditOp::Substitute | EditOp::Insert => {
                let (surface, s) = ref_iter.next().expect("reference token");
                sentence = s;
                let at = b.emit(PlainToken::new(surface, false), sentence);
                if op != EditOp::Insert {
                    b.pos[next_noisy] = Some(at);
                    b.last = Some(at);
                    next_noisy += 1;
                }
            }
            EditOp::Delete => {
                match b.last {
                    Some(at) => b.pos[next_noisy] = Some(at),
                    None => b.waiting.push(next_noisy),
                }
                next_noisy += 1;
            }
        }
        if op != EditOp::Insert {
            b.flush_empties(&noisy, &mut next_noisy, sentence);
        }
    }
    let Projection { out, out_sentence, pos, .. } = b;

    let walk = walk_brackets(
        noisy.iter().enumerate().filter_map(|(t, token)| pos[t].map(|p| (t, p, token.annotations.as_slice()))),
    );
    let mut warnings = Vec::new();
    if !walk.unopened.is_empty() {
        warnings.push(format!("document {}: dropped {} unmatched closing brackets", reference.doc_id, walk.unopened.len()));
    }
    if !walk.unclosed.is_empty() {
        warnings.push(format!(
            "document {}: closed {} unterminated mentions at sentence end",
            reference.doc_id,
            walk.unclosed.len()
        ));
    }
    let mut mentions = walk.mentions;
    for (start, entity_id) in walk.unclosed {
        let s = out_sentence[start];
        let end = start + out_sentence[start..].iter().take_while(|&&x| x == s).count() - 1;
        mentions.push(PlainMention { entity_id, start, end });
    }
    if cost > 0 {
        warnings.push(format!("document {}: {cost} token edits against the reference", reference.doc_id));
    }
    Ok(Converted { value: Cleaned { doc: PlainDoc::from_parts(out, &mentions), cost }, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{from_plaintext, to_plaintext};
    use crate::model::parse_conllu;

    fn full_dp(a: &[&str], b: &[&str]) -> usize {
        let mut d: Vec<Vec<usize>> = (0..=b.len()).map(|i| (0..=a.len()).map(|j| i + j).collect()).collect();
        for i in 1..=b.len() {
            for j in 1..=a.len() {
                d[i][j] = (d[i - 1][j - 1] + (a[j - 1] != b[i - 1]) as usize).min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
            }
        }
        d[b.len()][a.len()]
    }

    #[test]
    fn banded_matches_full_table() {
        let a: Vec<&str> = "the cat sat on the mat and then it left the room".split(' ').collect();
        let cases: [&str; 5] = [
            "the cat sat on the mat and then it left the room",
            "cat sat on a mat and it left room now",
            "",
            "x y z",
            "the the cat cat sat sat on on the the mat mat",
        ];
        for c in cases {
            let b: Vec<&str> = c.split(' ').filter(|s| !s.is_empty()).collect();
            let (cost, ops) = align_tokens(&a, &b, usize::MAX).unwrap();
            assert_eq!(cost, full_dp(&a, &b), "{c}");
            let consumed_ref = ops.iter().filter(|o| **o != EditOp::Delete).count();
            let consumed_noisy = ops.iter().filter(|o| **o != EditOp::Insert).count();
            assert_eq!((consumed_ref, consumed_noisy), (a.len(), b.len()));
        }
    }

    const TEXT: &str = "# newdoc id = d\n# sent_id = 1\n\
        1\tJohn\t_\tPROPN\t_\t_\t2\tnsubj\t_\tEntity=(a)\n\
        2\tsaw\t_\tVERB\t_\t_\t0\troot\t_\t_\n\
        3\this\t_\tPRON\t_\t_\t4\tnmod\t_\tEntity=(a)(b\n\
        4\tdog\t_\tNOUN\t_\t_\t2\tobj\t_\tEntity=b)\n\n\
        # sent_id = 2\n\
        1\tIt\t_\tPRON\t_\t_\t2\tnsubj\t_\tEntity=(b)\n\
        2\tbarked\t_\tVERB\t_\t_\t0\troot\t_\t_\n\n";

    fn reference() -> Document {
        parse_conllu(TEXT).unwrap().corpus.documents.remove(0)
    }

    fn clean(noisy: &str) -> Converted<Cleaned> {
        clean_output(&reference(), noisy, &CleanerConfig::default()).unwrap()
    }

    #[test]
    fn valid_input_unchanged() {
        let plain = to_plaintext(&reference()).value;
        let c = clean(&plain.render());
        assert_eq!(c.value.cost, 0);
        assert_eq!(c.value.doc, plain);
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn hallucinated_token_dropped() {
        let c = clean("John|[e1] saw his|[e1],[e2 big dog|e2] It|[e2] barked");
        assert_eq!(c.value.doc.render(), "John|[e1] saw his|[e2,[e1] dog|e2] It|[e2] barked");
    }

    #[test]
    fn missing_closer_closed_at_sentence_end() {
        let c = clean("John|[e1 saw his dog It barked");
        assert_eq!(c.value.doc.render(), "John|[e1 saw his dog|e1] It barked");
        let c = clean("John saw|e1] his dog It barked");
        assert_eq!(c.value.doc.render(), "John saw his dog It barked");
    }

    #[test]
    fn deletions_merge_backward_and_forward() {
        let c = clean("Hey|[e3] John saw his dog It barked extra|[e1]");
        assert_eq!(c.value.doc.render(), "John|[e3] saw his dog It barked|[e1]");
        let c = clean("John saw his dog It barked");
        assert_eq!(c.value.cost, 0);
        let c = clean("John saw ##he|[e1] his dog");
        assert_eq!(c.value.doc.render(), "John saw ##he|[e1] his dog It barked");
    }

    #[test]
    fn idempotent() {
        let once = clean("John|[e1 saw saw his|e1],[e2 cat It|e2] ##x barked|[e2]").value.doc.render();
        let twice = clean(&once).value.doc.render();
        assert_eq!(once, twice);
        assert!(from_plaintext(&once).is_ok());
    }

    #[test]
    fn refuses_unrelated_text() {
        let err = clean_output(&reference(), "a b c d e f g h", &CleanerConfig::default()).unwrap_err();
        assert!(matches!(err, FormatError::Refused { .. }));
    }
}
