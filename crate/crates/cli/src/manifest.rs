//! Dataset manifests: blank-line separated stanzas of `key = value` lines.
//!
//! ```text
//! # settings for every dataset
//! regime = head
//! seed = 7
//!
//! name = en_gum
//! gold = gold/en_gum.conllu
//! pred = sys/en_gum.conllu
//! exempt = false
//! ```
//!
//! A stanza without `name` holds global settings. Relative paths resolve
//! against the manifest's directory. `#` starts a comment line.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

pub const SETTING_KEYS: [&str; 9] = [
    "regime",
    "singletons",
    "seed",
    "cap_words",
    "window_tokens",
    "min_p95",
    "zero_parent_weight",
    "zero_label_bonus",
    "max_cost_ratio",
];
const DATASET_KEYS: [&str; 4] = ["name", "gold", "pred", "exempt"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub name: String,
    pub gold: PathBuf,
    pub pred: Option<PathBuf>,
    pub exempt: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub settings: BTreeMap<String, String>,
    pub datasets: Vec<Dataset>,
}

pub fn parse_bool(value: &str) -> Option<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn flush(
    stanza: &mut Vec<(usize, String, String)>,
    manifest: &mut Manifest,
    names: &mut BTreeSet<String>,
    base: &Path,
) -> std::result::Result<(), String> {
    if stanza.is_empty() {
        return Ok(());
    }
    let first_line = stanza[0].0;
    let has_name = stanza.iter().any(|(_, k, _)| k == "name");
    if !has_name {
        for (line, key, value) in stanza.drain(..) {
            if !SETTING_KEYS.contains(&key.as_str()) {
                return Err(format!("line {line}: unknown setting {key:?}"));
            }
            if manifest.settings.insert(key.clone(), value).is_some() {
                return Err(format!("line {line}: setting {key:?} given twice"));
            }
        }
        return Ok(());
    }
    let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (line, key, value) in stanza.drain(..) {
        if !DATASET_KEYS.contains(&key.as_str()) {
            return Err(format!("line {line}: unknown dataset key {key:?}"));
        }
        if fields.insert(key.clone(), (line, value)).is_some() {
            return Err(format!("line {line}: key {key:?} given twice in one dataset"));
        }
    }
    let name = fields["name"].1.clone();
    if !names.insert(name.clone()) {
        return Err(format!("line {first_line}: duplicate dataset name {name:?}"));
    }
    let gold = match fields.get("gold") {
        Some((_, v)) => base.join(v),
        None => return Err(format!("line {first_line}: dataset {name:?} has no gold path")),
    };
    let exempt = match fields.get("exempt") {
        Some((line, v)) => parse_bool(v).ok_or_else(|| format!("line {line}: exempt must be true or false"))?,
        None => false,
    };
    manifest.datasets.push(Dataset { name, gold, pred: fields.get("pred").map(|(_, v)| base.join(v)), exempt });
    Ok(())
}

pub fn parse_manifest(text: &str, base: &Path) -> std::result::Result<Manifest, String> {
    let mut manifest = Manifest::default();
    let mut names = BTreeSet::new();
    let mut stanza = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            flush(&mut stanza, &mut manifest, &mut names, base)?;
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected key = value", i + 1));
        };
        stanza.push((i + 1, key.trim().to_string(), value.trim().to_string()));
    }
    flush(&mut stanza, &mut manifest, &mut names, base)?;
    Ok(manifest)
}

pub fn load(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, base).map_err(|m| CliError::Config(format!("{}: {m}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stanzas_and_settings() {
        let text = "# top\nregime = exact\nseed=3\n\nname = a\ngold = g/a.conllu\npred = p/a.conllu\n\n\
                    name = b\ngold = /abs/b.conllu\nexempt = yes\n";
        let m = parse_manifest(text, Path::new("/data")).unwrap();
        assert_eq!(m.settings["regime"], "exact");
        assert_eq!(m.settings["seed"], "3");
        assert_eq!(m.datasets.len(), 2);
        assert_eq!(m.datasets[0].gold, PathBuf::from("/data/g/a.conllu"));
        assert_eq!(m.datasets[0].pred, Some(PathBuf::from("/data/p/a.conllu")));
        assert_eq!(m.datasets[1].gold, PathBuf::from("/abs/b.conllu"));
        assert!(m.datasets[1].exempt);
    }

    #[test]
    fn rejects_bad_manifests() {
        let base = Path::new(".");
        assert!(parse_manifest("name = a\ngold = x\n\nname = a\ngold = y\n", base).unwrap_err().contains("duplicate"));
        assert!(parse_manifest("colour = red\n", base).unwrap_err().contains("unknown setting"));
        assert!(parse_manifest("name = a\n", base).unwrap_err().contains("no gold"));
        assert!(parse_manifest("name a\n", base).unwrap_err().contains("line 1"));
    }
}
