//! The `Entity=` MISC value.
//!
//! A value is a concatenation of items: `(eid` opens a mention, `eid)`
//! closes it and `(eid)` marks a single-node mention. Segments of a
//! discontinuous mention carry a `[k/n` part tag right after the id:
//! `(e3[1/2`, `e3[1/2)`, `(e3[2/2)`. A trailing `]` after the part tag is
//! accepted on input but never written. Anything between the id (or part tag)
//! of an opener and the next parenthesis, such as `-person-1`, is an
//! attribute list that is skipped.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartTag {
    pub index: u32,
    pub total: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ItemKind {
    Open,
    Close,
    Single,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityItem {
    pub kind: ItemKind,
    pub eid: String,
    pub part: Option<PartTag>,
}

fn is_id_char(c: char) -> bool {
    !matches!(c, '(' | ')' | '[' | ']' | '-' | '|' | '=' | '/') && !c.is_whitespace()
}

fn take_id(s: &str) -> (&str, &str) {
    let end = s.find(|c: char| !is_id_char(c)).unwrap_or(s.len());
    s.split_at(end)
}

fn take_part(s: &str) -> Result<(Option<PartTag>, &str), String> {
    let Some(rest) = s.strip_prefix('[') else {
        return Ok((None, s));
    };
    let end = rest
        .find(|c: char| !(c.is_ascii_digit() || c == '/'))
        .unwrap_or(rest.len());
    let (k, n) = rest[..end]
        .split_once('/')
        .ok_or_else(|| String::from("part tag must be k/n"))?;
    let index: u32 = k.parse().map_err(|_| String::from("bad part index"))?;
    let total: u32 = n.parse().map_err(|_| String::from("bad part total"))?;
    if index == 0 || index > total {
        return Err(alloc::format!("part {index}/{total} out of range"));
    }
    let rest = &rest[end..];
    Ok((Some(PartTag { index, total }), rest.strip_prefix(']').unwrap_or(rest)))
}

/// Splits an `Entity=` value into items.
pub fn parse_items(value: &str) -> Result<Vec<EntityItem>, String> {
    let mut items = Vec::new();
    let mut rest = value;
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix('(') {
            let (eid, after) = take_id(after);
            if eid.is_empty() {
                return Err(alloc::format!("missing entity id in {value:?}"));
            }
            let (part, after) = take_part(after)?;
            // attributes run until the next parenthesis
            let attr_end = after.find(['(', ')']).unwrap_or(after.len());
            let after = &after[attr_end..];
            let (kind, after) = match after.strip_prefix(')') {
                Some(a) => (ItemKind::Single, a),
                None => (ItemKind::Open, after),
            };
            items.push(EntityItem { kind, eid: eid.into(), part });
            rest = after;
        } else {
            let (eid, after) = take_id(rest);
            if eid.is_empty() {
                return Err(alloc::format!("unexpected character in {value:?}"));
            }
            let (part, after) = take_part(after)?;
            let after = after
                .strip_prefix(')')
                .ok_or_else(|| alloc::format!("closing item {eid} lacks ')' in {value:?}"))?;
            items.push(EntityItem { kind: ItemKind::Close, eid: eid.into(), part });
            rest = after;
        }
    }
    Ok(items)
}

pub fn render_items(items: &[EntityItem]) -> String {
    let mut out = String::new();
    for item in items {
        let part = item
            .part
            .map(|p| alloc::format!("[{}/{}", p.index, p.total))
            .unwrap_or_default();
        let _ = match item.kind {
            ItemKind::Open => write!(out, "({}{}", item.eid, part),
            ItemKind::Close => write!(out, "{}{})", item.eid, part),
            ItemKind::Single => write!(out, "({}{})", item.eid, part),
        };
    }
    out
}
